"""Gate-level construction of the metastability-containing 2-sort(B).

Structure of ``build_two_sort(B)``:

* ``B-1`` input inverters producing ``NOT g_i`` for ``i < B``;
* a parallel prefix tree over ``delta_i = (NOT g_i, h_i)`` whose operator is
  the hat-form state combiner (one 10-gate block per operator);
* output stage: position 1 sees the initial state, so it is just
  ``OR(g_1, h_1)`` / ``AND(g_1, h_1)``; positions ``2..B`` each get a 10-gate
  output block fed with the prefix state of the positions before it.

Every block is wired gate for gate from the selection cell below. Boolean
re-synthesis is deliberately avoided: equivalent formulas can differ on
``M`` inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

from .netlist import Netlist, NetlistBuilder, bus

T = TypeVar("T")
Pair = tuple[str, str]


def build_selection(
    nb: NetlistBuilder, a: str, b: str, sel1: str, sel2_n: str, prefix: str, out: str | None = None
) -> str:
    """Selection cell ``f = b*(sel1 + a) + a*NOT(sel2)``.

    ``sel2_n`` must already carry ``NOT sel2``; the inverter is owned by the
    enclosing block. With ``sel1 == sel2 == s`` this is a closed multiplexer:
    ``s=0`` picks ``a``, ``s=1`` picks ``b``. Two AND and two OR gates, depth 3.
    """
    t = nb.OR(sel1, a, name=f"{prefix}or1")
    u = nb.AND(b, t, name=f"{prefix}and2")
    v = nb.AND(a, sel2_n, name=f"{prefix}and1")
    return nb.OR(u, v, name=out or f"{prefix}or2")


def build_hat_diamond_op(nb: NetlistBuilder, x: Pair, y: Pair, prefix: str) -> Pair:
    """Combine two hat-form states: ``N(Nx <>_M Ny)``. Ten gates."""
    x1, x2 = x
    y1, y2 = y
    b1 = nb.NOT(y1, name=f"{prefix}inv1")
    b2_n = nb.NOT(y2, name=f"{prefix}inv2")
    f1 = build_selection(nb, a=x2, b=x1, sel1=y1, sel2_n=b1, prefix=f"{prefix}s1_")
    f2 = build_selection(nb, a=x2, b=x1, sel1=y2, sel2_n=b2_n, prefix=f"{prefix}s2_")
    return f1, f2


def build_out_m(
    nb: NetlistBuilder, s: Pair, b: Pair, prefix: str, names: tuple[str, str] | None = None
) -> Pair:
    """Output bits ``max_i min_i`` from a hat-form state and ``g_i h_i``. Ten gates."""
    s1_n, s2 = s
    b1, b2 = b
    s2_n = nb.NOT(s2, name=f"{prefix}inv1")
    s1 = nb.NOT(s1_n, name=f"{prefix}inv2")
    n1, n2 = names or (None, None)
    f1 = build_selection(nb, a=b1, b=b2, sel1=s1_n, sel2_n=s2_n, prefix=f"{prefix}s1_", out=n1)
    f2 = build_selection(nb, a=b2, b=b1, sel1=s2, sel2_n=s1, prefix=f"{prefix}s2_", out=n2)
    return f1, f2


def build_base_out(
    nb: NetlistBuilder, g1: str, h1: str, names: tuple[str, str] | None = None
) -> Pair:
    """Output block for the initial state: reduces to one OR and one AND."""
    n1, n2 = names or (None, None)
    return nb.OR(g1, h1, name=n1), nb.AND(g1, h1, name=n2)


def build_ppc(deltas: Sequence[T], op: Callable[[T, T], T]) -> list[T]:
    """All prefixes ``pi_i = delta_0 op ... op delta_i``.

    Recursive construction: combine neighbouring pairs, recurse on the
    ``ceil(n/2)`` results (an odd trailing input is passed through), then
    fill the even positions with one more operator each. ``op`` is called in
    left-to-right operand order, so it need not be commutative.
    """
    n = len(deltas)
    if n == 0:
        return []
    if n == 1:
        return [deltas[0]]
    paired = [op(deltas[2 * k], deltas[2 * k + 1]) for k in range(n // 2)]
    if n % 2:
        paired.append(deltas[-1])
    inner = build_ppc(paired, op)
    out = [deltas[0]]
    for i in range(1, n):
        if i % 2:
            out.append(inner[i // 2])
        elif i == n - 1:
            out.append(inner[-1])
        else:
            out.append(op(inner[i // 2 - 1], deltas[i]))
    return out


@dataclass(frozen=True)
class PpcShape:
    n: int
    op_count: int
    op_depth_levels: int


def ppc_shape(n: int) -> PpcShape:
    """Count operators and operator levels by running the construction symbolically."""
    if n < 1:
        raise ValueError("PPC needs at least one input")
    count = 0

    def op(a: int, b: int) -> int:
        nonlocal count
        count += 1
        return max(a, b) + 1

    levels = build_ppc([0] * n, op)
    return PpcShape(n, count, max(levels))


def ppc_op_count(n: int) -> int:
    """Closed recurrence for the operator count: ``f(1)=0``, ``f(n)=f(ceil(n/2)) + n-1 or n-2``."""
    if n < 1:
        raise ValueError("PPC needs at least one input")
    total = 0
    while n > 1:
        total += n - 1 if n % 2 == 0 else n - 2
        n = (n + 1) // 2
    return total


def predict_ppc_delay(n: int) -> int:
    """Upper bound on operator levels: ``2*ceil(log2 n) - 1``."""
    if n < 1:
        raise ValueError("PPC needs at least one input")
    return 0 if n == 1 else 2 * math.ceil(math.log2(n)) - 1


def two_sort_gate_count(width: int) -> int:
    return 10 * ppc_op_count(width - 1) + 11 * (width - 1) + 2 if width > 1 else 2


def build_two_sort(width: int, name: str | None = None) -> Netlist:
    """Netlist with inputs ``g_1..g_B, h_1..h_B`` and outputs ``max_*``, ``min_*``."""
    if width < 1:
        raise ValueError("width must be at least 1")
    nb = NetlistBuilder(name or f"two_sort_{width}")
    g = [nb.input(s) for s in bus("g", width)]
    h = [nb.input(s) for s in bus("h", width)]
    g_n = [nb.NOT(g[i], name=f"gn_{i + 1}") for i in range(width - 1)]
    deltas = [(g_n[i], h[i]) for i in range(width - 1)]

    counter = 0

    def op(x: Pair, y: Pair) -> Pair:
        nonlocal counter
        counter += 1
        return build_hat_diamond_op(nb, x, y, prefix=f"pp{counter}_")

    prefixes = build_ppc(deltas, op)
    outs = [build_base_out(nb, g[0], h[0], names=("max_1", "min_1"))]
    for i in range(1, width):
        outs.append(
            build_out_m(
                nb,
                prefixes[i - 1],
                (g[i], h[i]),
                prefix=f"o{i + 1}_",
                names=(f"max_{i + 1}", f"min_{i + 1}"),
            )
        )
    for i, (hi, lo) in enumerate(outs, start=1):
        nb.output(f"max_{i}", hi)
    for i, (hi, lo) in enumerate(outs, start=1):
        nb.output(f"min_{i}", lo)
    return nb.build()


def block_netlist(kind: str) -> Netlist:
    """A single operator block as a standalone netlist (for exhaustive checks).

    ``kind`` is ``"selection"``, ``"hat_diamond"``, ``"out_m"`` or ``"base_out"``.
    Port names: ``x_1 x_2 y_1 y_2`` for hat_diamond, ``s_1 s_2 b_1 b_2`` for
    out_m (``s`` in hat form), ``a b sel1 sel2`` for selection, ``g h`` for
    base_out; outputs ``f_1 f_2`` (``f`` for selection).
    """
    nb = NetlistBuilder(kind)
    if kind == "selection":
        a, b, s1, s2 = (nb.input(p) for p in ("a", "b", "sel1", "sel2"))
        s2_n = nb.NOT(s2, name="sel2_n")
        nb.output("f", build_selection(nb, a, b, s1, s2_n, prefix="c_"))
    elif kind == "hat_diamond":
        x = (nb.input("x_1"), nb.input("x_2"))
        y = (nb.input("y_1"), nb.input("y_2"))
        f1, f2 = build_hat_diamond_op(nb, x, y, prefix="op_")
        nb.output("f_1", f1)
        nb.output("f_2", f2)
    elif kind == "out_m":
        s = (nb.input("s_1"), nb.input("s_2"))
        b = (nb.input("b_1"), nb.input("b_2"))
        f1, f2 = build_out_m(nb, s, b, prefix="out_")
        nb.output("f_1", f1)
        nb.output("f_2", f2)
    elif kind == "base_out":
        f1, f2 = build_base_out(nb, nb.input("g"), nb.input("h"))
        nb.output("f_1", f1)
        nb.output("f_2", f2)
    else:
        raise ValueError(f"unknown block {kind!r}")
    return nb.build()
