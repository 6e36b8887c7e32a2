"""Gate-level netlists over AND2/OR2/INV plus constants.

A :class:`Netlist` is immutable once validated. Two simulators are provided:
:func:`simulate` evaluates one assignment gate by gate with
:func:`~mcsort.ternary.eval_gate`, and :class:`BatchSimulator` evaluates many
assignments at once on packed bit-planes (a "may be 0" and a "may be 1" plane
per signal, which is exactly Kleene logic).
"""

from __future__ import annotations

import heapq
import json
import logging
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .ternary import META, ONE, ZERO, GateKind, Trit, Word, eval_gate

log = logging.getLogger(__name__)

# Trit codes used by the batch simulator and by verification campaigns.
CODE_ZERO, CODE_ONE, CODE_META = 0, 1, 2
TRIT_CODE = {ZERO: CODE_ZERO, ONE: CODE_ONE, META: CODE_META}
CODE_TRIT = (ZERO, ONE, META)


class NetlistError(ValueError):
    pass


class CycleError(NetlistError):
    def __init__(self, gate_id: str):
        super().__init__(f"combinational cycle through {gate_id!r}")
        self.gate_id = gate_id


class FormatError(NetlistError):
    pass


@dataclass(frozen=True)
class Gate:
    id: str
    kind: GateKind
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Netlist:
    name: str
    inputs: tuple[str, ...]
    gates: tuple[Gate, ...]
    outputs: Mapping[str, str] = field(default_factory=dict)

    def gate_map(self) -> dict[str, Gate]:
        return {g.id: g for g in self.gates}


@dataclass(frozen=True)
class Metrics:
    count_and: int
    count_or: int
    count_not: int
    count_const: int
    total: int
    depth: int

    def as_dict(self) -> dict[str, int]:
        return {
            "and": self.count_and,
            "or": self.count_or,
            "not": self.count_not,
            "const": self.count_const,
            "total": self.total,
            "depth": self.depth,
        }


def validate_and_sort(n: Netlist) -> Netlist:
    """Check structure and return the netlist with gates in topological order.

    Ties are broken by the original position, so an already sorted netlist
    comes back in the same order.
    """
    seen: set[str] = set()
    for sig in n.inputs:
        if sig in seen:
            raise NetlistError(f"duplicate input {sig!r}")
        seen.add(sig)
    for g in n.gates:
        if g.id in seen:
            raise NetlistError(f"duplicate signal id {g.id!r}")
        seen.add(g.id)
        if len(g.args) != g.kind.arity:
            raise NetlistError(
                f"gate {g.id!r}: {g.kind.value} takes {g.kind.arity} args, got {len(g.args)}"
            )
    for g in n.gates:
        for a in g.args:
            if a not in seen:
                raise NetlistError(f"gate {g.id!r} references undefined signal {a!r}")
    for name, sig in n.outputs.items():
        if sig not in seen:
            raise NetlistError(f"output {name!r} references undefined signal {sig!r}")

    index = {g.id: i for i, g in enumerate(n.gates)}
    pending = [0] * len(n.gates)
    users: list[list[int]] = [[] for _ in n.gates]
    for i, g in enumerate(n.gates):
        for a in g.args:
            j = index.get(a)
            if j is not None:
                pending[i] += 1
                users[j].append(i)
    ready = [i for i, p in enumerate(pending) if p == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for u in users[i]:
            pending[u] -= 1
            if pending[u] == 0:
                heapq.heappush(ready, u)
    if len(order) != len(n.gates):
        raise CycleError(_find_cycle_member(n, {i for i, p in enumerate(pending) if p}))
    return Netlist(n.name, tuple(n.inputs), tuple(n.gates[i] for i in order), dict(n.outputs))


def _find_cycle_member(n: Netlist, stuck: set[int]) -> str:
    gates = n.gates
    index = {gates[i].id: i for i in stuck}
    i = min(stuck)
    visited = set()
    # every stuck gate has a stuck predecessor, so walking back must revisit
    while i not in visited:
        visited.add(i)
        i = next(index[a] for a in gates[i].args if a in index)
    return gates[i].id


def simulate(n: Netlist, assignment: Mapping[str, Trit]) -> dict[str, Trit]:
    """Evaluate every output for one input assignment."""
    missing = [s for s in n.inputs if s not in assignment]
    if missing:
        raise NetlistError(f"no value for input(s) {', '.join(missing)}")
    values: dict[str, Trit] = {s: assignment[s] for s in n.inputs}
    for g in n.gates:
        try:
            values[g.id] = eval_gate(g.kind, *(values[a] for a in g.args))
        except KeyError as exc:
            # only reachable with an unsorted or cyclic gate list
            validate_and_sort(n)
            raise NetlistError(f"gate {g.id!r} evaluated before {exc.args[0]!r}") from None
    return {name: values[sig] for name, sig in n.outputs.items()}


def bus(prefix: str, width: int) -> list[str]:
    return [f"{prefix}_{i}" for i in range(1, width + 1)]


def assign_words(words: Mapping[str, Word]) -> dict[str, Trit]:
    """Spread named words over ``name_1 .. name_B`` input signals."""
    out = {}
    for prefix, w in words.items():
        for sig, t in zip(bus(prefix, len(w)), w.bits):
            out[sig] = t
    return out


def collect_words(values: Mapping[str, Trit]) -> dict[str, Word]:
    """Group ``name_i`` signals back into words; other names become 1-trit words."""
    groups: dict[str, dict[int, Trit]] = {}
    for name, t in values.items():
        m = re.fullmatch(r"(.+)_(\d+)", name)
        prefix, idx = (m.group(1), int(m.group(2))) if m else (name, 1)
        groups.setdefault(prefix, {})[idx] = t
    return {p: Word(tuple(bits[i] for i in sorted(bits))) for p, bits in groups.items()}


class BatchSimulator:
    """Bit-parallel ternary simulation of one netlist over many assignments.

    Inputs and outputs are integer arrays of trit codes (0, 1, 2 for ``M``).
    Intermediate signals are dropped after their last use, so memory stays
    proportional to the live frontier rather than the gate count.
    """

    def __init__(self, n: Netlist):
        self.netlist = n
        slot = {s: i for i, s in enumerate(n.inputs)}
        for g in n.gates:
            slot[g.id] = len(slot)
        last_use = {}
        for k, g in enumerate(n.gates):
            for a in g.args:
                last_use[slot[a]] = k
        keep = {slot[s] for s in n.outputs.values()}
        self._ops = []
        for k, g in enumerate(n.gates):
            args = tuple(slot[a] for a in g.args)
            free = tuple(
                sorted({a for a in args if last_use.get(a) == k and a not in keep})
            )
            self._ops.append((g.kind, slot[g.id], args, free))
        self._nslots = len(slot)
        self._inputs = [slot[s] for s in n.inputs]
        self._outputs = {name: slot[s] for name, s in n.outputs.items()}

    def run(self, inputs: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
        arrays = [np.asarray(inputs[s]) for s in self.netlist.inputs]
        count = len(arrays[0]) if arrays else 0
        if any(len(a) != count for a in arrays):
            raise ValueError("input arrays differ in length")
        if not arrays:
            count = max((len(v) for v in inputs.values()), default=1)
        nbytes = -(-count // 8)
        pad = (-nbytes) % 8

        def pack(bits: np.ndarray) -> np.ndarray:
            return np.concatenate([np.packbits(bits), np.zeros(pad, np.uint8)]).view(np.uint64)

        width = (nbytes + pad) // 8
        ones = np.full(width, np.uint64(0xFFFFFFFFFFFFFFFF))
        zeros = np.zeros(width, np.uint64)
        lo: list = [None] * self._nslots  # plane: may be 0
        hi: list = [None] * self._nslots  # plane: may be 1
        for slot, arr in zip(self._inputs, arrays):
            lo[slot] = pack(arr != CODE_ONE)
            hi[slot] = pack(arr != CODE_ZERO)
        for kind, out, args, free in self._ops:
            if kind is GateKind.AND:
                a, b = args
                lo[out] = lo[a] | lo[b]
                hi[out] = hi[a] & hi[b]
            elif kind is GateKind.OR:
                a, b = args
                lo[out] = lo[a] & lo[b]
                hi[out] = hi[a] | hi[b]
            elif kind is GateKind.NOT:
                (a,) = args
                lo[out], hi[out] = hi[a], lo[a]
            elif kind is GateKind.CONST0:
                lo[out], hi[out] = ones, zeros
            else:
                lo[out], hi[out] = zeros, ones
            for a in free:
                lo[a] = hi[a] = None
        result = {}
        for name, slot in self._outputs.items():
            may0 = np.unpackbits(lo[slot].view(np.uint8), count=count).astype(bool)
            may1 = np.unpackbits(hi[slot].view(np.uint8), count=count).astype(bool)
            codes = np.where(may0 & may1, CODE_META, np.where(may1, CODE_ONE, CODE_ZERO))
            result[name] = codes.astype(np.int8)
        return result


def metrics(n: Netlist) -> Metrics:
    counts = {k: 0 for k in GateKind}
    level = {s: 0 for s in n.inputs}
    for g in n.gates:
        counts[g.kind] += 1
        level[g.id] = 1 + max((level[a] for a in g.args), default=0)
    depth = max((level[s] for s in n.outputs.values()), default=0)
    const = counts[GateKind.CONST0] + counts[GateKind.CONST1]
    return Metrics(
        count_and=counts[GateKind.AND],
        count_or=counts[GateKind.OR],
        count_not=counts[GateKind.NOT],
        count_const=const,
        total=len(n.gates),
        depth=depth,
    )


def propagate_constants(n: Netlist) -> Netlist:
    """Fold constant gates and drop gates no output depends on.

    Only rewrites that are exact under ternary semantics are used:
    ``AND(0,x)=0``, ``AND(1,x)=x``, ``OR(1,x)=1``, ``OR(0,x)=x`` and inverted
    constants. Never applied implicitly.
    """
    alias: dict[str, str] = {}
    const: dict[str, GateKind] = {}
    gates: list[Gate] = []
    for g in n.gates:
        args = tuple(alias.get(a, a) for a in g.args)
        cs = [const.get(a) for a in args]
        kind = g.kind
        if kind in (GateKind.CONST0, GateKind.CONST1):
            const[g.id] = kind
        elif kind is GateKind.NOT and cs[0] is not None:
            kind = GateKind.CONST1 if cs[0] is GateKind.CONST0 else GateKind.CONST0
            const[g.id] = kind
            args = ()
        elif kind in (GateKind.AND, GateKind.OR) and any(c is not None for c in cs):
            dominant = GateKind.CONST0 if kind is GateKind.AND else GateKind.CONST1
            if dominant in cs:
                kind, args = dominant, ()
                const[g.id] = kind
            else:
                other = args[1] if cs[0] is not None else args[0]
                alias[g.id] = other
                if other in const:
                    const[g.id] = const[other]
                continue
        gates.append(Gate(g.id, kind, args))
    outputs = {name: alias.get(sig, sig) for name, sig in n.outputs.items()}
    live = set(outputs.values())
    kept = []
    for g in reversed(gates):
        if g.id in live:
            kept.append(g)
            live.update(g.args)
    return validate_and_sort(Netlist(n.name, n.inputs, tuple(reversed(kept)), outputs))


class NetlistBuilder:
    """Incremental construction with automatic, collision-free gate names."""

    def __init__(self, name: str):
        self.name = name
        self._inputs: list[str] = []
        self._gates: list[Gate] = []
        self._outputs: dict[str, str] = {}
        self._ids: set[str] = set()
        self._counter = 0

    def _claim(self, sig: str) -> str:
        if sig in self._ids:
            raise NetlistError(f"duplicate signal id {sig!r}")
        self._ids.add(sig)
        return sig

    def fresh(self, hint: str = "n") -> str:
        while True:
            self._counter += 1
            sig = f"{hint}{self._counter}"
            if sig not in self._ids:
                return sig

    def input(self, sig: str) -> str:
        self._inputs.append(self._claim(sig))
        return sig

    def gate(self, kind: GateKind | str, *args: str, name: str | None = None) -> str:
        kind = GateKind(kind)
        for a in args:
            if a not in self._ids:
                raise NetlistError(f"unknown signal {a!r}")
        sig = self._claim(name if name is not None else self.fresh(f"{kind.value.lower()}_"))
        self._gates.append(Gate(sig, kind, tuple(args)))
        return sig

    def AND(self, a: str, b: str, name: str | None = None) -> str:
        return self.gate(GateKind.AND, a, b, name=name)

    def OR(self, a: str, b: str, name: str | None = None) -> str:
        return self.gate(GateKind.OR, a, b, name=name)

    def NOT(self, a: str, name: str | None = None) -> str:
        return self.gate(GateKind.NOT, a, name=name)

    def output(self, name: str, sig: str) -> None:
        if name in self._outputs:
            raise NetlistError(f"duplicate output {name!r}")
        if sig not in self._ids:
            raise NetlistError(f"unknown signal {sig!r}")
        self._outputs[name] = sig

    def instantiate(
        self, sub: Netlist, prefix: str, bindings: Mapping[str, str]
    ) -> dict[str, str]:
        """Inline *sub* with its inputs wired to *bindings*; returns output signals."""
        rename = {}
        for s in sub.inputs:
            if s not in bindings:
                raise NetlistError(f"unbound input {s!r} of {sub.name}")
            rename[s] = bindings[s]
        for g in sub.gates:
            rename[g.id] = self.gate(
                g.kind, *(rename[a] for a in g.args), name=f"{prefix}{g.id}"
            )
        return {name: rename[sig] for name, sig in sub.outputs.items()}

    def build(self) -> Netlist:
        return validate_and_sort(
            Netlist(self.name, tuple(self._inputs), tuple(self._gates), dict(self._outputs))
        )


# --- serialization ---------------------------------------------------------

_ID_RE = re.compile(r"[\x21-\x7e]+")


def to_json(n: Netlist, indent: int | None = 1) -> str:
    doc = {
        "name": n.name,
        "inputs": list(n.inputs),
        "gates": [{"id": g.id, "kind": g.kind.value, "in": list(g.args)} for g in n.gates],
        "outputs": dict(n.outputs),
    }
    return json.dumps(doc, indent=indent)


def from_json(text: str) -> Netlist:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise FormatError("$: expected an object")
    for key, typ in (("name", str), ("inputs", list), ("gates", list), ("outputs", dict)):
        if key not in doc:
            raise FormatError(f"$.{key}: missing")
        if not isinstance(doc[key], typ):
            raise FormatError(f"$.{key}: expected {typ.__name__}")
    extra = set(doc) - {"name", "inputs", "gates", "outputs"}
    if extra:
        raise FormatError(f"$: unknown field(s) {sorted(extra)}")

    def ident(value, where: str) -> str:
        if not isinstance(value, str) or not _ID_RE.fullmatch(value):
            raise FormatError(f"{where}: expected an ASCII identifier, got {value!r}")
        return value

    inputs = tuple(ident(s, f"$.inputs[{i}]") for i, s in enumerate(doc["inputs"]))
    gates = []
    for i, g in enumerate(doc["gates"]):
        where = f"$.gates[{i}]"
        if not isinstance(g, dict) or set(g) != {"id", "kind", "in"}:
            raise FormatError(f"{where}: expected fields id, kind, in")
        try:
            kind = GateKind(g["kind"])
        except ValueError:
            raise FormatError(f"{where}.kind: unknown gate kind {g['kind']!r}") from None
        if not isinstance(g["in"], list):
            raise FormatError(f"{where}.in: expected list")
        args = tuple(ident(a, f"{where}.in[{j}]") for j, a in enumerate(g["in"]))
        gates.append(Gate(ident(g["id"], f"{where}.id"), kind, args))
    outputs = {
        ident(k, "$.outputs"): ident(v, f"$.outputs.{k}") for k, v in doc["outputs"].items()
    }
    try:
        return validate_and_sort(Netlist(doc["name"], inputs, tuple(gates), outputs))
    except NetlistError as exc:
        raise FormatError(str(exc)) from None


# --- structural HDL ----------------------------------------------------------

CELLS = {
    GateKind.AND: ("AND2_X1", ("A1", "A2"), "ZN"),
    GateKind.OR: ("OR2_X1", ("A1", "A2"), "ZN"),
    GateKind.NOT: ("INV_X1", ("A",), "ZN"),
    GateKind.CONST0: ("LOGIC0_X1", (), "Z"),
    GateKind.CONST1: ("LOGIC1_X1", (), "Z"),
}

VERILOG_KEYWORDS = frozenset(
    """always and assign automatic begin buf bufif0 bufif1 case casex casez cell cmos
    config deassign default defparam design disable edge else end endcase endconfig
    endfunction endgenerate endmodule endprimitive endspecify endtable endtask event
    for force forever fork function generate genvar highz0 highz1 if ifnone incdir
    include initial inout input instance integer join large liblist library localparam
    macromodule medium module nand negedge nmos nor noshowcancelled not notif0 notif1
    or output parameter pmos posedge primitive pull0 pull1 pulldown pullup
    pulsestyle_onevent pulsestyle_ondetect rcmos real realtime reg release repeat rnmos
    rpmos rtran rtranif0 rtranif1 scalared showcancelled signed small specify specparam
    strong0 strong1 supply0 supply1 table task time tran tranif0 tranif1 tri tri0 tri1
    triand trior trireg unsigned use uwire vectored wait wand weak0 weak1 while wire
    wor xnor xor""".split()
)

_VERILOG_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_$]*")


class _Namer:
    def __init__(self):
        self.used: set[str] = set()
        self.renames: dict[str, str] = {}

    def claim(self, raw: str) -> str:
        name = raw
        if not _VERILOG_ID.fullmatch(name) or name in VERILOG_KEYWORDS:
            name = re.sub(r"[^A-Za-z0-9_]", "_", name)
            if not name or not (name[0].isalpha() or name[0] == "_") or name in VERILOG_KEYWORDS:
                name = "s_" + name
        base, k = name, 1
        while name in self.used:
            k += 1
            name = f"{base}_{k}"
        self.used.add(name)
        if name != raw:
            self.renames[raw] = name
        return name


def export_structural_hdl(n: Netlist) -> str:
    """Structural Verilog, one library cell instance per gate.

    Identifiers that are not plain Verilog names (or collide after cleanup)
    are renamed deterministically; the renames are listed in a header comment
    and logged.
    """
    namer = _Namer()
    module = namer.claim(n.name)
    sig_name = {s: namer.claim(s) for s in n.inputs}
    out_port = {}
    for out, sig in n.outputs.items():
        # an output named after the gate that drives it is the same net
        if out == sig and sig not in n.inputs:
            continue
        out_port[out] = namer.claim(out)
    for g in n.gates:
        sig_name[g.id] = namer.claim(g.id)
    for out, sig in n.outputs.items():
        if out not in out_port:
            out_port[out] = sig_name[sig]
    wires = [sig_name[g.id] for g in n.gates if sig_name[g.id] not in out_port.values()]

    ports = [sig_name[s] for s in n.inputs] + list(out_port.values())
    lines = [f"// generated netlist {n.name!r}: {len(n.gates)} cells"]
    if namer.renames:
        lines.append("// renamed identifiers:")
        lines += [f"//   {raw} -> {new}" for raw, new in namer.renames.items()]
        log.warning("renamed %d identifier(s) for HDL export", len(namer.renames))
    lines.append(f"module {module} ({', '.join(ports)});")
    lines += [f"  input {sig_name[s]};" for s in n.inputs]
    lines += [f"  output {p};" for p in out_port.values()]
    lines += [f"  wire {w};" for w in wires]
    for k, g in enumerate(n.gates):
        cell, pins, opin = CELLS[g.kind]
        conns = [f".{p}({sig_name[a]})" for p, a in zip(pins, g.args)]
        conns.append(f".{opin}({sig_name[g.id]})")
        lines.append(f"  {cell} u{k} ({', '.join(conns)});")
    for out, sig in n.outputs.items():
        if out_port[out] != sig_name[sig]:
            lines.append(f"  assign {out_port[out]} = {sig_name[sig]};")
    lines.append("endmodule")
    return "\n".join(lines) + "\n"


def word_assignment(words: Mapping[str, str | Word]) -> dict[str, Trit]:
    return assign_words({k: v if isinstance(v, Word) else Word.parse(v) for k, v in words.items()})


def trits_to_codes(words: Sequence[Word]) -> np.ndarray:
    return np.array([[TRIT_CODE[t] for t in w.bits] for w in words], dtype=np.int8)
