import itertools
import math

import pytest

from mcsort import fsm
from mcsort.gray import encode
from mcsort.netlist import NetlistBuilder, metrics, simulate, word_assignment
from mcsort.synth import (
    block_netlist,
    build_selection,
    build_ppc,
    build_two_sort,
    ppc_op_count,
    ppc_shape,
    predict_ppc_delay,
    two_sort_gate_count,
)
from mcsort.ternary import Trit, closure_eval

import oracles

TERN = ["".join(p) for p in itertools.product("01M", repeat=2)]


def run_block(kind, **ports):
    n = block_netlist(kind)
    out = simulate(n, {k: Trit.parse(v) for k, v in ports.items()})
    return "".join(str(out[o]) for o in sorted(out))


def test_selection_cell_structure():
    n = block_netlist("selection")
    m = metrics(n)
    # the port inverter on sel2 belongs to the test harness, not the cell
    assert (m.count_and, m.count_or, m.count_not) == (2, 2, 1)
    cell = [g for g in n.gates if g.id.startswith("c_")]
    assert len(cell) == 4


def test_selection_cell_depth():
    nb = NetlistBuilder("cell")
    a, b, s1, s2n = (nb.input(p) for p in ("a", "b", "s1", "s2n"))
    nb.output("f", build_selection(nb, a, b, s1, s2n, prefix="c_"))
    assert metrics(nb.build()).depth == 3


def test_selection_with_tied_selects_is_a_closed_mux():
    def mux(s, a, b):
        return b if s.bits[0] is Trit.ONE else a

    for s, a, b in itertools.product("01M", repeat=3):
        want = str(closure_eval(mux, s, a, b))
        assert run_block("selection", a=a, b=b, sel1=s, sel2=s) == want
    assert run_block("selection", a="1", b="1", sel1="M", sel2="M") == "1"


def test_hat_diamond_block_matches_closed_operator():
    m = metrics(block_netlist("hat_diamond"))
    assert (m.count_and, m.count_or, m.count_not, m.total) == (4, 4, 2, 10)
    assert m.depth <= 4
    for x, y in itertools.product(TERN, repeat=2):
        got = run_block("hat_diamond", x_1=x[0], x_2=x[1], y_1=y[0], y_2=y[1])
        assert got == str(fsm.hat_diamond_m(x, y)), (x, y)
    ports = dict(zip(("x_1", "x_2", "y_1", "y_2"), str(fsm.hat("00")) + str(fsm.hat("01"))))
    assert run_block("hat_diamond", **ports) == str(fsm.hat("01"))


def test_out_block_matches_closed_operator():
    m = metrics(block_netlist("out_m"))
    assert (m.count_and, m.count_or, m.count_not, m.total) == (4, 4, 2, 10)
    for s, b in itertools.product(TERN, repeat=2):
        hs = str(fsm.hat(s))
        got = run_block("out_m", s_1=hs[0], s_2=hs[1], b_1=b[0], b_2=b[1])
        assert got == str(fsm.out_m(s, b)), (s, b)


def test_base_out_block():
    assert run_block("base_out", g="0", h="1") == "10"
    assert run_block("base_out", g="M", h="1") == "1M"
    assert run_block("base_out", g="0", h="0") == "00"
    assert metrics(block_netlist("base_out")).total == 2


def test_unknown_block():
    with pytest.raises(ValueError):
        block_netlist("xor")


@pytest.mark.parametrize("n", range(1, 40))
def test_ppc_computes_every_prefix(n):
    # string concatenation is associative but not commutative
    items = [chr(65 + i % 26) for i in range(n)]
    got = build_ppc(items, lambda a, b: a + b)
    assert got == ["".join(items[: i + 1]) for i in range(n)]


@pytest.mark.parametrize("n", range(1, 64))
def test_ppc_shape(n):
    shape = ppc_shape(n)
    assert shape.op_count == ppc_op_count(n)
    assert shape.op_depth_levels <= predict_ppc_delay(n)
    if n & (n - 1) == 0:
        assert shape.op_count == 2 * n - int(math.log2(n)) - 2


@pytest.mark.parametrize("n,count", [(1, 0), (2, 1), (3, 2), (4, 4), (7, 9), (15, 24)])
def test_ppc_op_count_values(n, count):
    assert ppc_op_count(n) == count


@pytest.mark.parametrize("n,levels", [(1, 0), (4, 3), (16, 7)])
def test_predicted_ppc_delay(n, levels):
    assert predict_ppc_delay(n) == levels


def test_ppc_rejects_empty():
    assert build_ppc([], lambda a, b: a) == []
    with pytest.raises(ValueError):
        ppc_shape(0)


@pytest.mark.parametrize("width,total", [(1, 2), (2, 13), (4, 55), (8, 169), (16, 407)])
def test_two_sort_gate_totals(width, total):
    assert metrics(build_two_sort(width)).total == total == two_sort_gate_count(width)


@pytest.mark.parametrize("width", range(1, 17))
def test_two_sort_kind_breakdown(width):
    m = metrics(build_two_sort(width))
    f = ppc_op_count(width - 1) if width > 1 else 0
    assert m.count_and == m.count_or == 4 * f + 4 * (width - 1) + 1
    assert m.count_not == 2 * f + 3 * (width - 1)
    assert m.count_const == 0
    assert m.total == 10 * f + 11 * (width - 1) + 2


def test_two_sort_ports():
    n = build_two_sort(3)
    assert n.inputs == ("g_1", "g_2", "g_3", "h_1", "h_2", "h_3")
    assert list(n.outputs) == ["max_1", "max_2", "max_3", "min_1", "min_2", "min_3"]
    with pytest.raises(ValueError):
        build_two_sort(0)


def test_two_sort_depth_grows_logarithmically():
    depth = {b: metrics(build_two_sort(b)).depth for b in (2, 4, 8, 16, 32)}
    for b in (2, 4, 8, 16):
        assert 1 <= depth[2 * b] - depth[b] <= 8


@pytest.mark.parametrize("width", range(1, 7))
def test_two_sort_on_stable_inputs_matches_fsm(width):
    n = build_two_sort(width)
    for x, y in itertools.product(range(1 << width), repeat=2):
        g, h = encode(x, width), encode(y, width)
        out = simulate(n, word_assignment({"g": g, "h": h}))
        hi = "".join(str(out[f"max_{i}"]) for i in range(1, width + 1))
        lo = "".join(str(out[f"min_{i}"]) for i in range(1, width + 1))
        assert (hi, lo) == tuple(map(str, fsm.fsm_sort2(g, h)))


@pytest.mark.parametrize("width", range(1, 5))
def test_two_sort_gate_by_gate_on_valid_pairs(width):
    n = build_two_sort(width)
    vals = oracles.valid_strings(width)
    for g, h in itertools.product(vals, repeat=2):
        out = simulate(n, word_assignment({"g": g, "h": h}))
        hi = "".join(str(out[f"max_{i}"]) for i in range(1, width + 1))
        lo = "".join(str(out[f"min_{i}"]) for i in range(1, width + 1))
        assert (hi, lo) == oracles.closed_max_min(g, h), (g, h)


def test_metastable_input_example():
    out = simulate(build_two_sort(4), word_assignment({"g": "0M10", "h": "0010"}))
    assert "".join(str(out[f"max_{i}"]) for i in range(1, 5)) == "0M10"
    assert "".join(str(out[f"min_{i}"]) for i in range(1, 5)) == "0010"
