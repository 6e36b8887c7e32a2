"""Binary reflected Gray code and valid strings.

A valid string of width ``B`` is either a codeword ``rg_B(x)`` or the
superposition of two consecutive codewords ``rg_B(x) * rg_B(x+1)``. Valid
strings are totally ordered by *rank*: ``2x`` for ``rg_B(x)`` and ``2x + 1``
for the superposition that sits between ``x`` and ``x + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .ternary import META, ONE, ZERO, Word, WordLike, as_word, closure_eval, superpose

MAX_WIDTH = 32


def _check_width(width: int) -> None:
    if not 1 <= width <= MAX_WIDTH:
        raise ValueError(f"width must be in [1, {MAX_WIDTH}], got {width}")


@dataclass(frozen=True, order=False)
class ValidGrayWord:
    word: Word
    rank: int

    def __str__(self) -> str:
        return str(self.word)

    @property
    def width(self) -> int:
        return len(self.word)


def encode(x: int, width: int) -> Word:
    """``rg_width(x)``: first bit 0 then count up, or 1 then count down."""
    _check_width(width)
    if not 0 <= x < (1 << width):
        raise ValueError(f"{x} out of range for {width}-bit code")
    bits = []
    for k in range(width, 0, -1):
        half = 1 << (k - 1)
        if x < half:
            bits.append(ZERO)
        else:
            bits.append(ONE)
            x = (1 << k) - 1 - x
    return Word(tuple(bits))


def decode(g: WordLike) -> int:
    g = as_word(g)
    if not g.is_binary:
        raise ValueError(f"cannot decode metastable word {g}")
    value = par = 0
    for t in g.bits:
        b = 1 if t is ONE else 0
        value = 2 * value + (par ^ b)
        par ^= b
    return value


def parity(g: WordLike, prefix_len: int | None = None) -> int:
    g = as_word(g)
    if prefix_len is None:
        prefix_len = len(g)
    if not 0 <= prefix_len <= len(g):
        raise ValueError(f"prefix length {prefix_len} out of range")
    return sum(t.to_bit() for t in g.bits[:prefix_len]) % 2


@lru_cache(maxsize=64)
def _valid_list(width: int) -> tuple[ValidGrayWord, ...]:
    out = []
    prev = None
    for x in range(1 << width):
        cur = encode(x, width)
        if prev is not None:
            out.append(ValidGrayWord(superpose((prev, cur)), 2 * x - 1))
        out.append(ValidGrayWord(cur, 2 * x))
        prev = cur
    return tuple(out)


def enumerate_valid(width: int) -> list[ValidGrayWord]:
    """All ``2**(width+1) - 1`` valid strings in ascending rank order."""
    _check_width(width)
    if width > 20:
        raise ValueError("refusing to enumerate more than 2**21 valid strings")
    return list(_valid_list(width))


def rank_of(w: WordLike) -> int | None:
    """Rank of *w* in the valid-string order, or None if *w* is not valid."""
    w = as_word(w)
    _check_width(len(w))
    metas = [i for i, t in enumerate(w.bits) if t is META]
    if not metas:
        return 2 * decode(w)
    if len(metas) > 1:
        return None
    m = metas[0]
    lo = decode(w.bits[:m] + (ZERO,) + w.bits[m + 1 :])
    hi = decode(w.bits[:m] + (ONE,) + w.bits[m + 1 :])
    if abs(lo - hi) != 1:
        return None
    return 2 * min(lo, hi) + 1


def is_valid(w: WordLike) -> bool:
    return rank_of(w) is not None


def validate(w: WordLike | ValidGrayWord) -> ValidGrayWord:
    if isinstance(w, ValidGrayWord):
        return w
    w = as_word(w)
    r = rank_of(w)
    if r is None:
        raise ValueError(f"{w} is not a valid Gray code string")
    return ValidGrayWord(w, r)


def from_rank(rank: int, width: int) -> ValidGrayWord:
    _check_width(width)
    if not 0 <= rank <= (1 << (width + 1)) - 2:
        raise ValueError(f"rank {rank} out of range for width {width}")
    x, half = divmod(rank, 2)
    if half:
        return ValidGrayWord(superpose((encode(x, width), encode(x + 1, width))), rank)
    return ValidGrayWord(encode(x, width), rank)


def stable_max_min(g: Word, h: Word) -> Word:
    """``max^rg`` followed by ``min^rg`` of two binary words, concatenated."""
    return g + h if decode(g) >= decode(h) else h + g


def max_min_oracle(
    g: WordLike | ValidGrayWord, h: WordLike | ValidGrayWord
) -> tuple[ValidGrayWord, ValidGrayWord]:
    """Closure of the stable max/min pair over all resolutions of *g* and *h*."""
    gv, hv = validate(g), validate(h)
    width = gv.width
    if hv.width != width:
        raise ValueError("operands differ in width")
    out = closure_eval(stable_max_min, gv.word, hv.word)
    return validate(out[:width]), validate(out[width:])
