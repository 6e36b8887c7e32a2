"""Reference comparator for Gray code words.

The comparison is a four-state machine fed with ``g_i h_i`` from the most
significant bit down. States are 2-bit words:

==== =======================================
00   prefixes equal, parity 0
11   prefixes equal, parity 1
10   ``<g> > <h>`` (absorbing)
01   ``<g> < <h>`` (absorbing)
==== =======================================

``diamond`` is the transition function, ``out_op`` the per-position output
rule. Their metastable closures ``diamond_m`` and ``out_m`` exist in two
forms here: brute-force closures (``*_closure``) and frozen 9x9 tables. The
tables are what the gate-level checks compare against.

Bits are 1-indexed (``g_1`` first) throughout.
"""

from __future__ import annotations

from .gray import ValidGrayWord, validate
from .ternary import Word, WordLike, as_word, closure_eval, eval_gate

_DIAMOND = {
    "00": {"00": "00", "01": "01", "11": "11", "10": "10"},
    "01": {"00": "01", "01": "01", "11": "01", "10": "01"},
    "11": {"00": "11", "01": "10", "11": "00", "10": "01"},
    "10": {"00": "10", "01": "10", "11": "10", "10": "10"},
}

# row: state before position i, column: g_i h_i, entry: max_i min_i
_OUT = {
    "00": {"00": "00", "01": "10", "11": "11", "10": "10"},
    "01": {"00": "00", "01": "10", "11": "11", "10": "01"},
    "11": {"00": "00", "01": "01", "11": "11", "10": "01"},
    "10": {"00": "00", "01": "01", "11": "11", "10": "10"},
}

_TERNARY_PAIRS = ("00", "01", "0M", "10", "11", "1M", "M0", "M1", "MM")

_DIAMOND_M_ROWS = {
    "00": "00 01 0M 10 11 1M M0 M1 MM",
    "01": "01 01 01 01 01 01 01 01 01",
    "0M": "0M 01 0M MM M1 MM MM M1 MM",
    "10": "10 10 10 10 10 10 10 10 10",
    "11": "11 10 1M 01 00 0M M1 M0 MM",
    "1M": "1M 10 1M MM M0 MM MM M0 MM",
    "M0": "M0 MM MM 10 1M 1M M0 MM MM",
    "M1": "M1 MM MM 01 0M 0M M1 MM MM",
    "MM": "MM MM MM MM MM MM MM MM MM",
}

_OUT_M_ROWS = {
    "00": "00 10 M0 10 11 1M M0 1M MM",
    "01": "00 10 M0 01 11 M1 0M 1M MM",
    "0M": "00 10 M0 MM 11 MM MM 1M MM",
    "10": "00 01 0M 10 11 1M M0 M1 MM",
    "11": "00 01 0M 01 11 M1 0M M1 MM",
    "1M": "00 01 0M MM 11 MM MM M1 MM",
    "M0": "00 MM MM 10 11 1M M0 MM MM",
    "M1": "00 MM MM 01 11 M1 0M MM MM",
    "MM": "00 MM MM MM 11 MM MM MM MM",
}


def _table(rows: dict[str, str]) -> dict[tuple[str, str], Word]:
    return {
        (s, b): Word.parse(cell)
        for s, row in rows.items()
        for b, cell in zip(_TERNARY_PAIRS, row.split())
    }


DIAMOND_M_TABLE = _table(_DIAMOND_M_ROWS)
OUT_M_TABLE = _table(_OUT_M_ROWS)

INITIAL_STATE = Word.parse("00")


def _pair(x: WordLike, what: str) -> Word:
    x = as_word(x)
    if len(x) != 2:
        raise ValueError(f"{what} must be 2 trits wide, got {x}")
    return x


def _stable_pair(x: WordLike, what: str) -> str:
    x = _pair(x, what)
    if not x.is_binary:
        raise ValueError(f"{what} {x} is metastable; use the closed operator")
    return str(x)


def diamond(s: WordLike, b: WordLike) -> Word:
    return Word.parse(_DIAMOND[_stable_pair(s, "state")][_stable_pair(b, "input")])


def out_op(s: WordLike, b: WordLike) -> Word:
    return Word.parse(_OUT[_stable_pair(s, "state")][_stable_pair(b, "input")])


def fsm_sort2(g: WordLike, h: WordLike) -> tuple[Word, Word]:
    """Sort two binary Gray words by running the machine bit by bit."""
    g, h = as_word(g), as_word(h)
    if len(g) != len(h):
        raise ValueError("operands differ in width")
    state = INITIAL_STATE
    hi, lo = [], []
    for gi, hi_bit in zip(g.bits, h.bits):
        col = Word((gi, hi_bit))
        o = out_op(state, col)
        hi.append(o[0])
        lo.append(o[1])
        state = diamond(state, col)
    return Word(tuple(hi)), Word(tuple(lo))


def diamond_m_closure(x: WordLike, y: WordLike) -> Word:
    return closure_eval(diamond, _pair(x, "state"), _pair(y, "input"))


def out_m_closure(s: WordLike, b: WordLike) -> Word:
    return closure_eval(out_op, _pair(s, "state"), _pair(b, "input"))


def diamond_m(x: WordLike, y: WordLike) -> Word:
    return DIAMOND_M_TABLE[str(_pair(x, "state")), str(_pair(y, "input"))]


def out_m(s: WordLike, b: WordLike) -> Word:
    return OUT_M_TABLE[str(_pair(s, "state")), str(_pair(b, "input"))]


def hat(x: WordLike) -> Word:
    """Invert the first trit of a state pair; an involution."""
    x = _pair(x, "state")
    return Word((eval_gate("NOT", x[0]), x[1]))


def hat_diamond_m(x: WordLike, y: WordLike) -> Word:
    """``x`` and ``y`` are in hat form; so is the result."""
    return hat(diamond_m(hat(x), hat(y)))


def column(g: WordLike, h: WordLike, i: int) -> Word:
    """The input pair ``g_i h_i`` (1-based)."""
    g, h = as_word(g), as_word(h)
    return Word((g.bit(i), h.bit(i)))


def prefix_state_oracle(
    g: WordLike | ValidGrayWord, h: WordLike | ValidGrayWord, i: int
) -> Word:
    """Closure of the machine state after the first *i* positions."""
    gw, hw = validate(g).word, validate(h).word
    if len(gw) != len(hw):
        raise ValueError("operands differ in width")
    if not 0 <= i <= len(gw):
        raise ValueError(f"prefix length {i} out of range")
    if i == 0:
        return INITIAL_STATE

    def run(gp: Word, hp: Word) -> Word:
        state = INITIAL_STATE
        for a, b in zip(gp.bits, hp.bits):
            state = diamond(state, Word((a, b)))
        return state

    return closure_eval(run, gw[:i], hw[:i])
