"""Three-valued signals and the metastable closure.

A signal is ``0``, ``1`` or ``M`` (metastable). Gates follow the closure of
their Boolean behaviour: a controlling input masks an ``M`` on the other leg,
anything else propagates it.

Words are written most-significant bit first, so ``Word.parse("0M10")[0]`` is
the first bit ``g_1``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence, Union


class Trit(enum.Enum):
    ZERO = "0"
    ONE = "1"
    META = "M"

    def __str__(self) -> str:
        return self.value

    def __repr__(self) -> str:
        return f"Trit({self.value!r})"

    @classmethod
    def parse(cls, ch: str) -> "Trit":
        try:
            return _CHAR_TO_TRIT[ch]
        except KeyError:
            raise ValueError(f"not a trit: {ch!r}") from None

    @classmethod
    def of(cls, bit: int | bool) -> "Trit":
        return cls.ONE if bit else cls.ZERO

    @property
    def is_binary(self) -> bool:
        return self is not Trit.META

    def to_bit(self) -> int:
        if self is Trit.META:
            raise ValueError("metastable trit has no binary value")
        return 1 if self is Trit.ONE else 0


ZERO, ONE, META = Trit.ZERO, Trit.ONE, Trit.META
_CHAR_TO_TRIT = {"0": ZERO, "1": ONE, "M": META}


class GateKind(enum.Enum):
    AND = "AND"
    OR = "OR"
    NOT = "NOT"
    CONST0 = "CONST0"
    CONST1 = "CONST1"

    @property
    def arity(self) -> int:
        return _ARITY[self]


_ARITY = {GateKind.AND: 2, GateKind.OR: 2, GateKind.NOT: 1, GateKind.CONST0: 0, GateKind.CONST1: 0}


def eval_gate(kind: GateKind | str, a: Trit | None = None, b: Trit | None = None) -> Trit:
    """Evaluate one gate on trits.

    ``AND(0, M) = 0`` and ``OR(1, M) = 1``; every other ``M`` input yields ``M``.
    """
    kind = GateKind(kind)
    given = sum(x is not None for x in (a, b))
    if given != kind.arity or (kind.arity == 1 and a is None):
        raise TypeError(f"{kind.value} takes {kind.arity} operand(s), got {given}")
    if kind is GateKind.AND:
        if a is ZERO or b is ZERO:
            return ZERO
        return ONE if a is ONE and b is ONE else META
    if kind is GateKind.OR:
        if a is ONE or b is ONE:
            return ONE
        return ZERO if a is ZERO and b is ZERO else META
    if kind is GateKind.NOT:
        return {ZERO: ONE, ONE: ZERO, META: META}[a]
    return ONE if kind is GateKind.CONST1 else ZERO


WordLike = Union["Word", str, Sequence[Trit]]


@dataclass(frozen=True)
class Word:
    """Fixed-width ternary word, ``bits[0]`` being the most significant bit."""

    bits: tuple[Trit, ...]

    @classmethod
    def parse(cls, text: str) -> "Word":
        return cls(tuple(Trit.parse(ch) for ch in text))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "Word":
        return cls(tuple(Trit.of(b) for b in bits))

    def __str__(self) -> str:
        return "".join(t.value for t in self.bits)

    def __repr__(self) -> str:
        return f"Word('{self}')"

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self) -> Iterator[Trit]:
        return iter(self.bits)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return Word(self.bits[idx])
        return self.bits[idx]

    def __add__(self, other: "Word") -> "Word":
        return Word(self.bits + as_word(other).bits)

    def bit(self, i: int) -> Trit:
        """1-based access, ``bit(1)`` is ``g_1``."""
        if not 1 <= i <= len(self.bits):
            raise IndexError(i)
        return self.bits[i - 1]

    def sub(self, i: int, j: int) -> "Word":
        """The 1-based inclusive slice ``g_i ... g_j``."""
        if not 1 <= i <= j <= len(self.bits):
            raise IndexError((i, j))
        return Word(self.bits[i - 1 : j])

    @property
    def is_binary(self) -> bool:
        return META not in self.bits

    @property
    def meta_count(self) -> int:
        return self.bits.count(META)

    def to_bits(self) -> tuple[int, ...]:
        return tuple(t.to_bit() for t in self.bits)


def as_word(w: WordLike) -> Word:
    if isinstance(w, Word):
        return w
    if isinstance(w, str):
        return Word.parse(w)
    if isinstance(w, Trit):
        return Word((w,))
    bits = tuple(w)
    if not all(isinstance(t, Trit) for t in bits):
        raise TypeError(f"not a sequence of trits: {w!r}")
    return Word(bits)


def resolutions(x: WordLike) -> Iterator[Word]:
    """All binary words obtained by replacing each ``M`` of *x* by 0 or 1."""
    x = as_word(x)
    choices = [(ZERO, ONE) if t is META else (t,) for t in x.bits]
    for combo in itertools.product(*choices):
        yield Word(combo)


def superpose(words: Iterable[WordLike]) -> Word:
    """Positionwise merge: agreeing bits are kept, disagreements become ``M``."""
    it = iter(words)
    try:
        acc = list(as_word(next(it)).bits)
    except StopIteration:
        raise ValueError("cannot superpose an empty set") from None
    for w in it:
        w = as_word(w)
        if len(w) != len(acc):
            raise ValueError(f"width mismatch: {len(w)} != {len(acc)}")
        for i, t in enumerate(w.bits):
            if acc[i] is not t:
                acc[i] = META
    return Word(tuple(acc))


def closure_eval(f: Callable[..., object], *args: WordLike) -> Word:
    """Metastable closure of *f* evaluated at *args*.

    *f* receives one binary :class:`Word` per argument and returns a Word
    (a single Trit, or anything :func:`as_word` accepts). Resolutions are
    enumerated lazily; the loop stops once every output bit is ``M``.
    """
    words = [as_word(a) for a in args]
    acc: list[Trit] | None = None
    for combo in itertools.product(*(resolutions(w) for w in words)):
        out = as_word(f(*combo)).bits
        if acc is None:
            acc = list(out)
        else:
            if len(out) != len(acc):
                raise ValueError("closure target returned words of differing width")
            for i, t in enumerate(out):
                if acc[i] is not t:
                    acc[i] = META
        if all(t is META for t in acc):
            break
    assert acc is not None
    return Word(tuple(acc))


def boolean_gate(kind: GateKind | str) -> Callable[..., Trit]:
    """Plain Boolean version of a gate, usable as a :func:`closure_eval` target."""
    kind = GateKind(kind)

    def f(*ws: Word) -> Trit:
        bits = [w.bits[0].to_bit() for w in ws]
        if kind is GateKind.AND:
            return Trit.of(bits[0] & bits[1])
        if kind is GateKind.OR:
            return Trit.of(bits[0] | bits[1])
        if kind is GateKind.NOT:
            return Trit.of(1 - bits[0])
        return Trit.of(kind is GateKind.CONST1)

    return f


def add_mod(width: int) -> Callable[[Word, Word], Word]:
    """Binary addition modulo ``2**width`` on MSB-first words."""

    def f(a: Word, b: Word) -> Word:
        total = (_to_int(a) + _to_int(b)) % (1 << width)
        return Word.from_bits((total >> (width - 1 - i)) & 1 for i in range(width))

    return f


def _to_int(w: Word) -> int:
    v = 0
    for b in w.to_bits():
        v = (v << 1) | b
    return v
