"""Comparator schedules and n-channel sorting netlists built from 2-sort(B).

Orientation: comparator ``(i, j)`` with ``i < j`` routes the maximum to
channel ``i``, so channel 0 ends up holding the largest value. Passing
``ascending=True`` swaps the port wiring instead.

The fixed schedules are known optimal-size or optimal-depth networks for
4, 7 and 10 channels. Each is checked with the zero-one principle the first
time it is requested.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .gray import ValidGrayWord, validate
from .netlist import Netlist, NetlistBuilder, bus
from .synth import build_two_sort
from .ternary import WordLike

Layer = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ComparatorSchedule:
    channels: int
    layers: tuple[Layer, ...]

    def __post_init__(self):
        if self.channels < 1:
            raise ValueError("a schedule needs at least one channel")
        for depth, layer in enumerate(self.layers):
            used: set[int] = set()
            for i, j in layer:
                if not 0 <= i < j < self.channels:
                    raise ValueError(f"layer {depth}: bad comparator ({i}, {j})")
                if i in used or j in used:
                    raise ValueError(f"layer {depth}: channel reused by ({i}, {j})")
                used.update((i, j))

    @classmethod
    def from_layers(cls, channels: int, layers: Sequence[Sequence[Sequence[int]]]) -> "ComparatorSchedule":
        return cls(channels, tuple(tuple((int(i), int(j)) for i, j in layer) for layer in layers))

    @classmethod
    def from_comparators(cls, channels: int, comparators: Sequence[tuple[int, int]]) -> "ComparatorSchedule":
        """Pack a comparator sequence into layers, each as early as its channels allow."""
        ready = [0] * channels
        layers: list[list[tuple[int, int]]] = []
        for i, j in comparators:
            d = max(ready[i], ready[j])
            if d == len(layers):
                layers.append([])
            layers[d].append((i, j))
            ready[i] = ready[j] = d + 1
        return cls.from_layers(channels, layers)

    @property
    def comparators(self) -> list[tuple[int, int]]:
        return [c for layer in self.layers for c in layer]

    @property
    def size(self) -> int:
        return sum(len(layer) for layer in self.layers)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def to_json(self) -> str:
        return json.dumps({"channels": self.channels, "layers": [[list(c) for c in l] for l in self.layers]})

    @classmethod
    def from_json(cls, text: str) -> "ComparatorSchedule":
        doc = json.loads(text)
        if not isinstance(doc, dict) or set(doc) != {"channels", "layers"}:
            raise ValueError("schedule document needs exactly 'channels' and 'layers'")
        return cls.from_layers(int(doc["channels"]), doc["layers"])

    def without(self, index: int) -> "ComparatorSchedule":
        """Copy with the *index*-th comparator (in schedule order) removed."""
        comps = self.comparators
        del comps[index]
        return ComparatorSchedule.from_comparators(self.channels, comps)


class Variant(enum.Enum):
    SORT4 = "sort4"
    SORT7 = "sort7"
    SORT10_SIZE = "sort10-size"
    SORT10_DEPTH = "sort10-depth"


# (channels, comparators, layers)
EXPECTED_SHAPE = {
    Variant.SORT4: (4, 5, 3),
    Variant.SORT7: (7, 16, 6),
    Variant.SORT10_SIZE: (10, 29, 8),
    Variant.SORT10_DEPTH: (10, 31, 7),
}

_SCHEDULES = {
    Variant.SORT4: [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(1, 2)]],
    Variant.SORT7: [
        [(0, 6), (2, 3), (4, 5)],
        [(0, 2), (1, 4), (3, 6)],
        [(0, 1), (2, 5), (3, 4)],
        [(1, 2), (4, 6)],
        [(2, 3), (4, 5)],
        [(1, 2), (3, 4), (5, 6)],
    ],
    Variant.SORT10_SIZE: [
        [(0, 8), (1, 9), (2, 7), (3, 5), (4, 6)],
        [(0, 2), (1, 4), (5, 8), (7, 9)],
        [(0, 3), (2, 4), (5, 7), (6, 9)],
        [(0, 1), (3, 6), (8, 9)],
        [(1, 5), (2, 3), (4, 8), (6, 7)],
        [(1, 2), (3, 5), (4, 6), (7, 8)],
        [(2, 3), (4, 5), (6, 7)],
        [(3, 4), (5, 6)],
    ],
    Variant.SORT10_DEPTH: [
        [(0, 1), (2, 5), (3, 6), (4, 7), (8, 9)],
        [(0, 6), (1, 8), (2, 4), (3, 9), (5, 7)],
        [(0, 2), (1, 3), (4, 5), (6, 8), (7, 9)],
        [(0, 1), (2, 7), (3, 5), (4, 6), (8, 9)],
        [(1, 2), (3, 4), (5, 6), (7, 8)],
        [(1, 3), (2, 4), (5, 7), (6, 8)],
        [(2, 3), (4, 5), (6, 7)],
    ],
}


@lru_cache(maxsize=None)
def builtin_schedule(v: Variant) -> ComparatorSchedule:
    v = Variant(v)
    channels, size, depth = EXPECTED_SHAPE[v]
    s = ComparatorSchedule.from_layers(channels, _SCHEDULES[v])
    if (s.size, s.depth) != (size, depth):
        raise AssertionError(f"{v.value}: shape {s.size}/{s.depth}, expected {size}/{depth}")
    if not validate_schedule(s):
        raise AssertionError(f"{v.value}: schedule does not sort")
    return s


def batcher_schedule(n: int) -> ComparatorSchedule:
    """Batcher's odd-even merge sort for any ``n`` (not one of the fixed networks)."""
    comps = []
    p = 1
    while p < n:
        k = p
        while k >= 1:
            for j in range(k % p, n - k, 2 * k):
                for i in range(min(k, n - j - k)):
                    if (i + j) // (2 * p) == (i + j + k) // (2 * p):
                        comps.append((i + j, i + j + k))
            k //= 2
        p *= 2
    return ComparatorSchedule.from_comparators(n, comps)


def resolve_schedule(v: Variant | ComparatorSchedule | str) -> ComparatorSchedule:
    if isinstance(v, ComparatorSchedule):
        return v
    if isinstance(v, str) and v.startswith("batcher"):
        return batcher_schedule(int(v.split(":", 1)[1]))
    return builtin_schedule(Variant(v))


def validate_schedule(s: ComparatorSchedule) -> bool:
    """Zero-one principle: the schedule sorts every 0/1 input (up to 20 channels)."""
    n = s.channels
    if n > 20:
        raise ValueError("exhaustive zero-one check limited to 20 channels")
    codes = np.arange(1 << n, dtype=np.uint32)
    v = ((codes[:, None] >> np.arange(n, dtype=np.uint32)) & 1).astype(bool)
    for i, j in s.comparators:
        hi = v[:, i] | v[:, j]
        lo = v[:, i] & v[:, j]
        v[:, i], v[:, j] = hi, lo
    # descending: no channel may hold a 1 after a 0
    return bool(np.all(v[:, :-1] >= v[:, 1:])) if n > 1 else True


def build_n_sort(
    v: Variant | ComparatorSchedule | str, width: int, *, ascending: bool = False
) -> Netlist:
    """One 2-sort(width) instance per comparator.

    Inputs ``in{c}_{1..B}``, outputs ``out{c}_{1..B}`` for each channel ``c``.
    """
    s = resolve_schedule(v)
    name = v.value if isinstance(v, Variant) else "custom" if isinstance(v, ComparatorSchedule) else str(v)
    nb = NetlistBuilder(f"{name.replace('-', '_').replace(':', '_')}_{width}")
    block = build_two_sort(width)
    wires = [[nb.input(sig) for sig in bus(f"in{c}", width)] for c in range(s.channels)]
    for k, (i, j) in enumerate(s.comparators):
        bind = dict(zip(bus("g", width), wires[i]))
        bind.update(zip(bus("h", width), wires[j]))
        outs = nb.instantiate(block, f"c{k}_", bind)
        hi = [outs[p] for p in bus("max", width)]
        lo = [outs[p] for p in bus("min", width)]
        wires[i], wires[j] = (lo, hi) if ascending else (hi, lo)
    for c in range(s.channels):
        for sig, w in zip(bus(f"out{c}", width), wires[c]):
            nb.output(sig, w)
    return nb.build()


def oracle_sort_valid(inputs: Sequence[WordLike | ValidGrayWord]) -> list[ValidGrayWord]:
    """Stable sort by descending rank in the valid-string order."""
    vals = [validate(w) for w in inputs]
    if len({v.width for v in vals}) > 1:
        raise ValueError("inputs differ in width")
    return sorted(vals, key=lambda v: -v.rank)
