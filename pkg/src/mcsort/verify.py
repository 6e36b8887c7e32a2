"""Verification campaigns: circuits against brute-force closure oracles.

Every campaign returns a :class:`VerifyReport`. Failures are data, never
exceptions; the report keeps the total count and the first 100 cases.

Random sampling draws ranks uniformly from the valid-string order, one per
channel, with ``numpy.random.Generator(PCG64(seed))``; the algorithm name is
recorded in the report so a run can be replayed exactly.
"""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import fsm
from .gray import decode, encode, enumerate_valid, from_rank, is_valid, max_min_oracle, rank_of
from .netlist import CODE_META, CODE_TRIT, BatchSimulator, Gate, Netlist, bus, metrics
from .networks import ComparatorSchedule, Variant, build_n_sort, oracle_sort_valid, resolve_schedule
from .synth import build_two_sort
from .ternary import GateKind, Word, add_mod, closure_eval

MAX_FAILURES = 100
RNG_NAME = "numpy.random.Generator(PCG64)"
CHUNK = 1 << 17


@dataclass
class VerifyReport:
    target: str
    mode: str
    cases_run: int = 0
    failure_count: int = 0
    failures: list[dict] = field(default_factory=list)
    seed: int | None = None
    samples: int | None = None
    rng: str | None = None
    metrics: dict | None = None
    details: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0 and self.cases_run > 0

    def record(self, failure: dict) -> None:
        self.failure_count += 1
        if len(self.failures) < MAX_FAILURES:
            self.failures.append(failure)

    def merge(self, other: "VerifyReport") -> "VerifyReport":
        """Combine shards of the same campaign; order of merging does not matter."""
        if (self.target, self.mode) != (other.target, other.mode):
            raise ValueError("can only merge shards of one campaign")
        failures = sorted(self.failures + other.failures, key=lambda f: f.get("case", 0))
        return VerifyReport(
            target=self.target,
            mode=self.mode,
            cases_run=self.cases_run + other.cases_run,
            failure_count=self.failure_count + other.failure_count,
            failures=failures[:MAX_FAILURES],
            seed=self.seed,
            samples=self.samples,
            rng=self.rng,
            metrics=self.metrics or other.metrics,
            details=self.details + other.details,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.target} [{self.mode}] cases={self.cases_run} failures={self.failure_count}"


# --- vectorized word <-> code helpers --------------------------------------


def codes_from_ranks(ranks: np.ndarray, width: int) -> np.ndarray:
    """Trit codes, shape ``(N, width)``, of the valid strings with the given ranks."""
    ranks = np.asarray(ranks, dtype=np.int64)
    x = ranks >> 1
    a = x ^ (x >> 1)
    b = (x + 1) ^ ((x + 1) >> 1)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    bits = (a[:, None] >> shifts) & 1
    differs = (((a ^ b)[:, None] >> shifts) & 1).astype(bool) & (ranks[:, None] & 1).astype(bool)
    return np.where(differs, CODE_META, bits).astype(np.int8)


def _gray_values(bits: np.ndarray) -> np.ndarray:
    binary = np.bitwise_xor.accumulate(bits.astype(np.int64), axis=1)
    weights = 1 << np.arange(bits.shape[1] - 1, -1, -1, dtype=np.int64)
    return binary @ weights


def ranks_from_codes(codes: np.ndarray) -> np.ndarray:
    """Rank of each row of trit codes, ``-1`` where the row is not a valid string."""
    codes = np.asarray(codes)
    metas = codes == CODE_META
    nmeta = metas.sum(axis=1)
    lo = _gray_values(np.where(metas, 0, codes))
    hi = _gray_values(np.where(metas, 1, codes))
    out = np.full(len(codes), -1, dtype=np.int64)
    stable = nmeta == 0
    out[stable] = 2 * lo[stable]
    single = (nmeta == 1) & (np.abs(lo - hi) == 1)
    out[single] = 2 * np.minimum(lo, hi)[single] + 1
    return out


_CODE_CHARS = bytes.maketrans(bytes(range(3)), b"".join(str(t).encode() for t in CODE_TRIT))


def _word(codes: np.ndarray) -> str:
    return np.asarray(codes, dtype=np.uint8).tobytes().translate(_CODE_CHARS).decode()


def _shards(total: int, size: int) -> list[tuple[int, int]]:
    return [(s, min(s + size, total)) for s in range(0, total, size)]


def _run_shards(work: Callable[[int, int], VerifyReport], total: int, threads: int) -> VerifyReport:
    shards = _shards(total, CHUNK)
    if threads > 1 and len(shards) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda r: work(*r), shards))
    else:
        parts = [work(*r) for r in shards]
    report = parts[0]
    for p in parts[1:]:
        report = report.merge(p)
    return report


def _valid_count(width: int) -> int:
    return (1 << (width + 1)) - 1


# --- 2-sort -------------------------------------------------------------------


def verify_two_sort(
    width: int,
    *,
    samples: int | None = None,
    seed: int = 0,
    netlist: Netlist | None = None,
    threads: int = 1,
) -> VerifyReport:
    """Simulate 2-sort(width) on valid pairs and compare with :func:`max_min_oracle`.

    ``samples=None`` means every pair of valid strings (``width <= 8``).
    """
    exhaustive = samples is None
    if exhaustive and width > 8:
        raise ValueError("exhaustive 2-sort verification is limited to width 8")
    if not exhaustive and width > 16:
        raise ValueError("random 2-sort verification is limited to width 16")
    n = netlist if netlist is not None else build_two_sort(width)
    sim = BatchSimulator(n)
    nvalid = _valid_count(width)
    if exhaustive:
        total = nvalid * nvalid
        pick = None
    else:
        total = samples
        rng = np.random.Generator(np.random.PCG64(seed))
        pick = rng.integers(0, nvalid, size=(samples, 2))

    target = f"two-sort(B={width}) {n.name}"
    mode = "exhaustive" if exhaustive else "random"

    def work(start: int, stop: int) -> VerifyReport:
        idx = np.arange(start, stop, dtype=np.int64)
        if pick is None:
            rg, rh = np.divmod(idx, nvalid)
        else:
            rg, rh = pick[start:stop, 0], pick[start:stop, 1]
        gc, hc = codes_from_ranks(rg, width), codes_from_ranks(rh, width)
        inputs = {s: gc[:, k] for k, s in enumerate(bus("g", width))}
        inputs.update({s: hc[:, k] for k, s in enumerate(bus("h", width))})
        out = sim.run(inputs)
        got_max = np.stack([out[s] for s in bus("max", width)], axis=1)
        got_min = np.stack([out[s] for s in bus("min", width)], axis=1)
        rep = VerifyReport(target, mode, cases_run=stop - start)
        for k in range(stop - start):
            g, h = _word(gc[k]), _word(hc[k])
            mx, mn = max_min_oracle(g, h)
            want = str(mx.word) + str(mn.word)
            have = _word(got_max[k]) + _word(got_min[k])
            if want != have:
                rep.record(
                    {
                        "case": int(start + k),
                        "inputs": [g, h],
                        "expected": [want[:width], want[width:]],
                        "actual": [have[:width], have[width:]],
                    }
                )
        return rep

    report = _run_shards(work, total, threads)
    report.seed, report.samples = (None, None) if exhaustive else (seed, samples)
    report.rng = None if exhaustive else RNG_NAME
    report.metrics = metrics(n).as_dict()
    return report


# --- n-sort -------------------------------------------------------------------


def verify_network(
    v: Variant | ComparatorSchedule | str,
    width: int,
    *,
    samples: int | None = None,
    seed: int = 0,
    netlist: Netlist | None = None,
    ascending: bool = False,
    threads: int = 1,
    max_exhaustive: int = 10**7,
) -> VerifyReport:
    """Simulate an n-sort netlist on tuples of valid strings against rank sorting."""
    schedule = resolve_schedule(v)
    channels = schedule.channels
    if width > 16:
        raise ValueError("network verification is limited to width 16")
    n = netlist if netlist is not None else build_n_sort(v, width, ascending=ascending)
    sim = BatchSimulator(n)
    nvalid = _valid_count(width)
    exhaustive = samples is None
    if exhaustive:
        total = nvalid**channels
        if total > max_exhaustive:
            raise ValueError(f"{total} tuples is too many for exhaustive verification")
        pick = None
    else:
        total = samples
        rng = np.random.Generator(np.random.PCG64(seed))
        pick = rng.integers(0, nvalid, size=(samples, channels), dtype=np.int32)

    label = v.value if isinstance(v, Variant) else "custom" if isinstance(v, ComparatorSchedule) else str(v)
    target = f"{label} n={channels} B={width} {n.name}"
    mode = "exhaustive" if exhaustive else "random"

    def work(start: int, stop: int) -> VerifyReport:
        if pick is None:
            idx = np.arange(start, stop, dtype=np.int64)
            ranks = np.stack(np.unravel_index(idx, (nvalid,) * channels), axis=1)
        else:
            ranks = pick[start:stop].astype(np.int64)
        codes = [codes_from_ranks(ranks[:, c], width) for c in range(channels)]
        inputs = {}
        for c in range(channels):
            inputs.update({s: codes[c][:, k] for k, s in enumerate(bus(f"in{c}", width))})
        out = sim.run(inputs)
        got = np.stack(
            [ranks_from_codes(np.stack([out[s] for s in bus(f"out{c}", width)], axis=1)) for c in range(channels)],
            axis=1,
        )
        want = np.sort(ranks, axis=1)
        if not ascending:
            want = want[:, ::-1]
        bad = np.nonzero(np.any(got != want, axis=1))[0]
        rep = VerifyReport(target, mode, cases_run=stop - start)
        for k in bad:
            words = [_word(codes[c][k]) for c in range(channels)]
            expected = [str(w) for w in oracle_sort_valid(words)]
            if ascending:
                expected.reverse()
            actual = [_word(np.array([out[s][k] for s in bus(f"out{c}", width)])) for c in range(channels)]
            rep.record({"case": int(start + k), "inputs": words, "expected": expected, "actual": actual})
        return rep

    report = _run_shards(work, total, threads)
    report.seed, report.samples = (None, None) if exhaustive else (seed, samples)
    report.rng = None if exhaustive else RNG_NAME
    report.metrics = metrics(n).as_dict()
    return report


# --- mutation controls --------------------------------------------------------


def mutate_gate(n: Netlist, index: int, kind: GateKind | None = None) -> Netlist:
    """Swap AND<->OR (or set *kind*) on gate *index*; a single-gate fault."""
    gates = list(n.gates)
    g = gates[index]
    if kind is None:
        swap = {GateKind.AND: GateKind.OR, GateKind.OR: GateKind.AND}
        if g.kind not in swap:
            raise ValueError(f"gate {g.id} is {g.kind.value}; pass an explicit kind")
        kind = swap[g.kind]
    gates[index] = Gate(g.id, kind, g.args)
    return Netlist(n.name + "_mut", n.inputs, tuple(gates), dict(n.outputs))


# --- property suites ----------------------------------------------------------


def _pairs(width: int):
    vals = enumerate_valid(width)
    return itertools.product(vals, vals)


def _col(g: Word, h: Word, i: int) -> Word:
    return Word((g.bit(i), h.bit(i)))


def check_diamond_associativity():
    pairs = [Word.from_bits(p) for p in itertools.product((0, 1), repeat=2)]
    for a, b, c in itertools.product(pairs, repeat=3):
        lhs = fsm.diamond(fsm.diamond(a, b), c)
        rhs = fsm.diamond(a, fsm.diamond(b, c))
        yield (lhs == rhs), {"a": str(a), "b": str(b), "c": str(c), "lhs": str(lhs), "rhs": str(rhs)}


def all_parenthesizations(cols: Sequence[Word], op: Callable[[Word, Word], Word]) -> list[Word]:
    """Value of every binary bracketing of ``cols[0] op ... op cols[-1]`` (Catalan many)."""
    if len(cols) == 1:
        return [cols[0]]
    out = []
    for k in range(1, len(cols)):
        for a in all_parenthesizations(cols[:k], op):
            for b in all_parenthesizations(cols[k:], op):
                out.append(op(a, b))
    return out


def check_parenthesization(width: int):
    """Every bracketing of the closed combiner over the columns equals the prefix oracle."""
    for g, h in _pairs(width):
        cols = [_col(g.word, h.word, i) for i in range(1, width + 1)]
        want = fsm.prefix_state_oracle(g, h, width)
        values = all_parenthesizations(cols, fsm.diamond_m)
        bad = [str(x) for x in values if x != want]
        yield (not bad), {"g": str(g), "h": str(h), "trees": len(values), "expected": str(want), "bad": bad[:3]}


def check_output_decomposition(width: int):
    """Closed output rule on the prefix state reproduces the closed max/min bit by bit."""
    for g, h in _pairs(width):
        mx, mn = max_min_oracle(g, h)
        for i in range(1, width + 1):
            s = fsm.prefix_state_oracle(g, h, i - 1)
            got = fsm.out_m(s, _col(g.word, h.word, i))
            want = Word((mx.word.bit(i), mn.word.bit(i)))
            yield got == want, {"g": str(g), "h": str(h), "i": i, "got": str(got), "expected": str(want)}


def check_hat_fold(width: int):
    for g, h in _pairs(width):
        acc = None
        for i in range(1, width + 1):
            d = fsm.hat(_col(g.word, h.word, i))
            acc = d if acc is None else fsm.hat_diamond_m(acc, d)
            want = fsm.hat(fsm.prefix_state_oracle(g, h, i))
            yield acc == want, {"g": str(g), "h": str(h), "i": i, "got": str(acc), "expected": str(want)}


def check_mod4_counterexample():
    add = add_mod(2)
    left = closure_eval(add, closure_eval(add, "0M", "01"), "01")
    right = closure_eval(add, "0M", closure_eval(add, "01", "01"))
    ok = str(left) == "MM" and str(right) == "1M" and left != right
    yield ok, {"left": str(left), "right": str(right)}


def check_substrings(width: int):
    for g in enumerate_valid(width):
        for i in range(1, width + 1):
            for j in range(i, width + 1):
                sub = g.word.sub(i, j)
                yield is_valid(sub), {"g": str(g), "i": i, "j": j, "slice": str(sub)}


def check_truncation(width: int):
    """Deduplicated slices of the ascending code list count up and down through the shorter code."""
    codes = [encode(x, width) for x in range(1 << width)]
    for i in range(1, width):
        for j in range(i + 1, width + 1):
            seq = [w.sub(i, j) for w in codes]
            seq = [w for k, w in enumerate(seq) if k == 0 or w != seq[k - 1]]
            top = (1 << (j - i + 1)) - 1
            values = [decode(w) for w in seq]
            # triangle wave 0..top..0..; one full sweep at least
            wave = [t % (2 * top) if t % (2 * top) <= top else 2 * top - t % (2 * top) for t in range(len(values))]
            ok = values == wave and values[-1] in (0, top) and len(values) >= top + 1
            yield ok, {"width": width, "i": i, "j": j, "values": values[:40]}


def check_order_equivalence(width: int):
    for g, h in _pairs(width):
        mx, mn = max_min_oracle(g, h)
        hi, lo = (g, h) if g.rank >= h.rank else (h, g)
        yield (mx.rank, mn.rank) == (hi.rank, lo.rank), {"g": str(g), "h": str(h), "max": str(mx), "min": str(mn)}


def check_gray_code(width: int):
    prev = None
    for x in range(1 << width):
        w = encode(x, width)
        ok = decode(w) == x and rank_of(w) == 2 * x
        if prev is not None:
            ok = ok and sum(a != b for a, b in zip(prev.bits, w.bits)) == 1
        prev = w
        yield ok, {"x": x, "word": str(w)}


def check_valid_count(width: int):
    vals = enumerate_valid(width)
    ok = len(vals) == (1 << (width + 1)) - 1 and [v.rank for v in vals] == list(range(len(vals)))
    ok = ok and all(from_rank(v.rank, width) == v for v in vals)
    yield ok, {"width": width, "count": len(vals)}


def property_suites(max_tree_width: int = 5, max_decomp_width: int = 6, max_word_width: int = 8):
    """(name, generator) pairs for every structural property."""
    suites = [("diamond-associativity", check_diamond_associativity())]
    suites += [(f"parenthesization-B{w}", check_parenthesization(w)) for w in range(1, max_tree_width + 1)]
    suites += [(f"output-decomposition-B{w}", check_output_decomposition(w)) for w in range(1, max_decomp_width + 1)]
    suites += [(f"hat-fold-B{w}", check_hat_fold(w)) for w in range(1, max_tree_width + 1)]
    suites.append(("mod4-non-associativity", check_mod4_counterexample()))
    suites += [(f"substrings-B{w}", check_substrings(w)) for w in range(1, max_word_width + 1)]
    suites += [(f"truncation-B{w}", check_truncation(w)) for w in range(2, max_word_width + 1)]
    suites += [(f"order-equivalence-B{w}", check_order_equivalence(w)) for w in range(1, max_decomp_width + 1)]
    suites += [(f"gray-code-B{w}", check_gray_code(w)) for w in range(1, 13)]
    suites += [(f"valid-count-B{w}", check_valid_count(w)) for w in range(1, max_word_width + 1)]
    return suites


def run_suite(name: str, cases: Iterable[tuple[bool, dict]]) -> VerifyReport:
    rep = VerifyReport(target=name, mode="exhaustive")
    for k, (ok, info) in enumerate(cases):
        rep.cases_run += 1
        if not ok:
            rep.record({"case": k, "property": name, **info})
    rep.details.append({"property": name, "cases": rep.cases_run, "failures": rep.failure_count})
    return rep


def run_property_suites(**limits) -> VerifyReport:
    total = VerifyReport(target="property-suites", mode="exhaustive")
    for name, cases in property_suites(**limits):
        part = run_suite(name, cases)
        total.cases_run += part.cases_run
        total.failure_count += part.failure_count
        total.failures.extend(part.failures[: MAX_FAILURES - len(total.failures)])
        total.details.extend(part.details)
    return total


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)
