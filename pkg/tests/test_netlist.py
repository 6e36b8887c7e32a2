import json
import logging
import shutil
import subprocess

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcsort.netlist import (
    BatchSimulator,
    CycleError,
    FormatError,
    Gate,
    Netlist,
    NetlistBuilder,
    NetlistError,
    collect_words,
    export_structural_hdl,
    from_json,
    metrics,
    propagate_constants,
    simulate,
    to_json,
    validate_and_sort,
)
from mcsort.synth import build_two_sort
from mcsort.ternary import META, ONE, ZERO, GateKind, Trit

import oracles

KINDS = [GateKind.AND, GateKind.OR, GateKind.NOT, GateKind.CONST0, GateKind.CONST1]


@st.composite
def random_netlists(draw, max_inputs=4, max_gates=14):
    k = draw(st.integers(1, max_inputs))
    inputs = [f"i{j}" for j in range(k)]
    sigs = list(inputs)
    gates = []
    for j in range(draw(st.integers(1, max_gates))):
        kind = draw(st.sampled_from(KINDS))
        args = tuple(draw(st.sampled_from(sigs)) for _ in range(kind.arity))
        gates.append(Gate(f"n{j}", kind, args))
        sigs.append(f"n{j}")
    outs = draw(st.lists(st.sampled_from(sigs), min_size=1, max_size=3))
    return Netlist("rand", tuple(inputs), tuple(gates), {f"o{j}": s for j, s in enumerate(outs)})


def trit_assignments(n):
    return st.fixed_dictionaries({s: st.sampled_from(list(Trit)) for s in n.inputs})


def small():
    nb = NetlistBuilder("small")
    a, b = nb.input("a"), nb.input("b")
    x = nb.AND(a, b, name="x")
    y = nb.NOT(x, name="y")
    nb.output("y", y)
    nb.output("x", x)
    return nb.build()


def test_simulate_examples():
    nb = NetlistBuilder("inv")
    nb.output("q", nb.NOT(nb.input("a")))
    assert simulate(nb.build(), {"a": META})["q"] is META

    nb = NetlistBuilder("const")
    nb.input("a")
    nb.output("q", nb.gate("CONST1"))
    n = nb.build()
    assert all(simulate(n, {"a": t})["q"] is ONE for t in Trit)

    nb = NetlistBuilder("base")
    g, h = nb.input("g"), nb.input("h")
    nb.output("hi", nb.OR(g, h))
    nb.output("lo", nb.AND(g, h))
    assert simulate(nb.build(), {"g": META, "h": ONE}) == {"hi": ONE, "lo": META}


def test_simulate_missing_input():
    with pytest.raises(NetlistError):
        simulate(small(), {"a": ONE})


@settings(max_examples=200, deadline=None)
@given(random_netlists(), st.data())
def test_simulate_agrees_with_naive_evaluators(n, data):
    assign = data.draw(trit_assignments(n))
    got = {k: str(v) for k, v in simulate(n, assign).items()}
    assert got == oracles.naive_ternary_eval(n, {k: str(v) for k, v in assign.items()})
    bits = {s: data.draw(st.integers(0, 1)) for s in n.inputs}
    got = simulate(n, {s: Trit.of(b) for s, b in bits.items()})
    assert {k: v.to_bit() for k, v in got.items()} == oracles.naive_boolean_eval(n, bits)


@settings(max_examples=200, deadline=None)
@given(random_netlists(), st.data())
def test_resolving_inputs_never_unresolves_outputs(n, data):
    assign = data.draw(trit_assignments(n))
    finer = {
        s: (data.draw(st.sampled_from([ZERO, ONE])) if t is META and data.draw(st.booleans()) else t)
        for s, t in assign.items()
    }
    coarse, fine = simulate(n, assign), simulate(n, finer)
    for k in coarse:
        assert coarse[k] is META or coarse[k] is fine[k]


@settings(max_examples=100, deadline=None)
@given(random_netlists(), st.data())
def test_batch_simulator_agrees_with_simulate(n, data):
    rows = data.draw(st.lists(trit_assignments(n), min_size=1, max_size=70))
    code = {ZERO: 0, ONE: 1, META: 2}
    arrays = {s: np.array([code[r[s]] for r in rows], dtype=np.int8) for s in n.inputs}
    out = BatchSimulator(n).run(arrays)
    for k, r in enumerate(rows):
        want = simulate(n, r)
        assert {o: int(out[o][k]) for o in n.outputs} == {o: code[t] for o, t in want.items()}


@settings(max_examples=100, deadline=None)
@given(random_netlists(), st.data())
def test_constant_propagation_preserves_behaviour(n, data):
    folded = propagate_constants(n)
    assert metrics(folded).total <= metrics(n).total
    assign = data.draw(trit_assignments(n))
    assert simulate(folded, assign) == simulate(n, assign)


def test_validate_and_sort():
    n = small()
    assert validate_and_sort(n).gates == n.gates
    rev = Netlist(n.name, n.inputs, tuple(reversed(n.gates)), n.outputs)
    fixed = validate_and_sort(rev)
    assert [g.id for g in fixed.gates] == ["x", "y"]


def test_self_loop_names_the_gate():
    n = Netlist("loop", ("a",), (Gate("z", GateKind.AND, ("a", "z")),), {"q": "z"})
    with pytest.raises(CycleError) as err:
        validate_and_sort(n)
    assert "z" in str(err.value)


def test_cycle_error_names_a_member():
    gates = (Gate("p", GateKind.NOT, ("q",)), Gate("q", GateKind.NOT, ("p",)), Gate("r", GateKind.NOT, ("a",)))
    with pytest.raises(CycleError) as err:
        validate_and_sort(Netlist("c", ("a",), gates, {"o": "r"}))
    assert err.value.gate_id in {"p", "q"}


@pytest.mark.parametrize(
    "gates,outputs",
    [
        ((Gate("x", GateKind.NOT, ("a",)), Gate("x", GateKind.NOT, ("a",))), {"o": "x"}),
        ((Gate("x", GateKind.NOT, ("nope",)),), {"o": "x"}),
        ((Gate("x", GateKind.NOT, ("a",)),), {"o": "nope"}),
        ((Gate("x", GateKind.AND, ("a",)),), {"o": "x"}),
    ],
)
def test_structural_errors(gates, outputs):
    with pytest.raises(NetlistError):
        validate_and_sort(Netlist("bad", ("a",), gates, outputs))


def test_metrics_examples():
    empty = Netlist("wire", ("a",), (), {"a": "a"})
    m = metrics(empty)
    assert (m.total, m.depth) == (0, 0)
    m = metrics(small())
    assert (m.count_and, m.count_not, m.total, m.depth) == (1, 1, 2, 2)
    assert metrics(build_two_sort(2)).total == 13


def test_json_round_trip():
    n = build_two_sort(4)
    back = from_json(to_json(n))
    assert back == n
    doc = json.loads(to_json(n))
    assert set(doc) == {"name", "inputs", "gates", "outputs"}
    assert set(doc["gates"][0]) == {"id", "kind", "in"}


def _doc(**override):
    doc = json.loads(to_json(small()))
    doc.update(override)
    return doc


@pytest.mark.parametrize(
    "mutate,where",
    [
        (lambda d: d["gates"][0].update(kind="XOR"), "$.gates[0].kind"),
        (lambda d: d["gates"].append(dict(d["gates"][0])), "duplicate"),
        (lambda d: d.pop("outputs"), "$.outputs"),
        (lambda d: d["gates"][1].update({"in": [7]}), "$.gates[1].in[0]"),
        (lambda d: d.update(extra=1), "extra"),
    ],
)
def test_from_json_format_errors(mutate, where):
    doc = _doc()
    mutate(doc)
    with pytest.raises(FormatError) as err:
        from_json(json.dumps(doc))
    assert where in str(err.value)


def test_from_json_rejects_bad_json():
    with pytest.raises(FormatError):
        from_json("{not json")


def test_hdl_export_cells():
    nb = NetlistBuilder("one_and")
    nb.output("q", nb.AND(nb.input("a"), nb.input("b")))
    text = export_structural_hdl(nb.build())
    assert text.count("AND2_X1") == 1
    text = export_structural_hdl(build_two_sort(2))
    assert sum(text.count(c) for c in ("AND2_X1", "OR2_X1", "INV_X1")) == 13
    empty = export_structural_hdl(Netlist("empty", (), (), {}))
    assert "module empty ();" in empty and "endmodule" in empty


def test_hdl_export_renames_bad_identifiers(caplog):
    nb = NetlistBuilder("my-design")
    a = nb.input("in[0]")
    nb.output("wire", nb.NOT(a, name="module"))
    with caplog.at_level(logging.WARNING):
        text = export_structural_hdl(nb.build())
    assert "renamed identifiers" in text
    assert "in[0]" not in text.split("renamed identifiers")[1].split("module ")[1]
    assert caplog.records
    assert export_structural_hdl(nb.build()) == text


def test_hdl_is_syntactically_plausible():
    text = export_structural_hdl(build_two_sort(3))
    body = [l for l in text.splitlines() if l.strip() and not l.startswith("//")]
    assert body[0].startswith("module ") and body[-1] == "endmodule"
    assert all(l.rstrip().endswith(";") for l in body[1:-1])


def test_collect_words_groups_buses():
    words = collect_words({"max_2": ONE, "max_1": ZERO, "q": META})
    assert {k: str(v) for k, v in words.items()} == {"max": "01", "q": "M"}


def test_builder_rejects_duplicates_and_unknown_signals():
    nb = NetlistBuilder("b")
    nb.input("a")
    with pytest.raises(NetlistError):
        nb.input("a")
    with pytest.raises(NetlistError):
        nb.NOT("zz")
    with pytest.raises(NetlistError):
        nb.output("o", "zz")


CELL_STUBS = """
module AND2_X1 (input A1, input A2, output ZN); assign ZN = A1 & A2; endmodule
module OR2_X1 (input A1, input A2, output ZN); assign ZN = A1 | A2; endmodule
module INV_X1 (input A, output ZN); assign ZN = ~A; endmodule
module LOGIC0_X1 (output Z); assign Z = 1'b0; endmodule
module LOGIC1_X1 (output Z); assign Z = 1'b1; endmodule
"""


@pytest.mark.skipif(shutil.which("iverilog") is None, reason="iverilog not installed")
def test_hdl_compiles_with_iverilog(tmp_path):
    src = tmp_path / "ts.v"
    src.write_text(CELL_STUBS + export_structural_hdl(build_two_sort(4)))
    subprocess.run(["iverilog", "-o", str(tmp_path / "a.out"), str(src)], check=True)
