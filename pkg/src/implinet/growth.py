"""Growth of an implication network by repeated local transformations."""

from __future__ import annotations

import enum
from functools import reduce
from operator import and_, invert, or_
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

from implinet.bitstring import BitString, RandomSource, deduce_pair_int
from implinet.graph import DirectedGraph


class RecheckMode(str, enum.Enum):
    RECOMPUTE = "recompute"
    PRUNE_ONLY = "prune_only"


class Direction(str, enum.Enum):
    """Which endpoint of the copied edge the chosen node occupies."""

    P_LEFT = "p_left"
    P_PRIME_LEFT = "p_prime_left"


class ConfigError(ValueError):
    pass


def default_label(n_bits: int) -> BitString:
    """Left half zeros, right half ones; gives 00000001111111 at 14 bits."""
    zeros = n_bits // 2
    return BitString.parse("0" * zeros + "1" * (n_bits - zeros))


@dataclass
class GrowthConfig:
    n_bits: int = 14
    m: int = 2
    initial_labels: Optional[list] = None
    target_n: int = 10_000
    seed: int = 0
    recheck_mode: RecheckMode = RecheckMode.RECOMPUTE

    def __post_init__(self):
        if not isinstance(self.n_bits, int) or not 1 <= self.n_bits <= 64:
            raise ConfigError(f"n_bits must be in [1, 64], got {self.n_bits!r}")
        if not isinstance(self.m, int) or self.m < 1:
            raise ConfigError(f"m must be >= 1, got {self.m!r}")
        if not isinstance(self.target_n, int) or self.target_n < self.m:
            raise ConfigError(f"target_n must be >= m ({self.m}), got {self.target_n!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        try:
            self.recheck_mode = RecheckMode(self.recheck_mode)
        except ValueError:
            raise ConfigError(f"unknown recheck mode {self.recheck_mode!r}") from None
        if self.initial_labels is None:
            self.initial_labels = [default_label(self.n_bits)] * self.m
        labels = []
        for lab in self.initial_labels:
            if isinstance(lab, str):
                try:
                    lab = BitString.parse(lab)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None
            if lab.width != self.n_bits:
                raise ConfigError(f"initial label {lab} has width {lab.width}, expected {self.n_bits}")
            labels.append(lab)
        if len(labels) != self.m:
            raise ConfigError(f"expected {self.m} initial labels, got {len(labels)}")
        self.initial_labels = labels

    def to_dict(self) -> dict:
        d = asdict(self)
        d["initial_labels"] = [str(lab) for lab in self.initial_labels]
        d["recheck_mode"] = self.recheck_mode.value
        return d


@dataclass
class TransformReport:
    chosen: int
    created: int
    direction: Direction
    label_before: BitString
    label_after: BitString
    created_label: BitString
    rejection_rounds: int
    edges_added: list = field(default_factory=list)
    edges_removed: list = field(default_factory=list)

    @property
    def deduced_edge(self) -> tuple[int, int]:
        if self.direction is Direction.P_LEFT:
            return (self.chosen, self.created)
        return (self.created, self.chosen)

    def to_dict(self) -> dict:
        return {
            "chosen": self.chosen,
            "created": self.created,
            "direction": self.direction.value,
            "label_before": str(self.label_before),
            "label_after": str(self.label_after),
            "created_label": str(self.created_label),
            "rejection_rounds": self.rejection_rounds,
            "edges_added": [list(e) for e in self.edges_added],
            "edges_removed": [list(e) for e in self.edges_removed],
        }


def init_network(cfg: GrowthConfig) -> DirectedGraph:
    """Initial nodes with an edge u -> v for every implying ordered pair."""
    g = DirectedGraph(cfg.n_bits)
    for lab in cfg.initial_labels:
        g.add_node(lab)
    values = [lab.value for lab in cfg.initial_labels]
    for u, a in enumerate(values):
        for v, c in enumerate(values):
            if u != v and a & ~c == 0:
                g.add_edge(u, v)
    return g


def local_transform(
    g: DirectedGraph,
    p: int,
    r: RandomSource,
    mode: RecheckMode = RecheckMode.RECOMPUTE,
    *,
    direction: Optional[Direction] = None,
    pair: Optional[tuple[BitString, BitString]] = None,
) -> TransformReport:
    """Copy node ``p``, deduce the copied edge, and recheck ``p``'s neighbourhood.

    ``direction`` and ``pair`` replace the corresponding random draws when
    given (the coin and the collapse/expand rounds respectively), which makes
    hand-worked transformations reproducible. Only edges between {p, p'} and
    the pre-step neighbours of ``p`` are examined.
    """
    mode = RecheckMode(mode)
    adjacent = g.adjacent_set(p)
    n_bits = g.n_bits
    if direction is None:
        direction = Direction.P_LEFT if r.bit() == 0 else Direction.P_PRIME_LEFT
    else:
        direction = Direction(direction)
    before = g.label(p)
    if pair is None:
        left, right, rounds = deduce_pair_int(before.value, n_bits, r)
    else:
        left, right = pair[0].value, pair[1].value
        rounds = 0

    if direction is Direction.P_LEFT:
        p_val, pp_val = left, right
    else:
        p_val, pp_val = right, left
    g.set_label(p, BitString(n_bits, p_val))
    pp = g.add_node(BitString(n_bits, pp_val))
    report = TransformReport(
        chosen=p,
        created=pp,
        direction=direction,
        label_before=before,
        label_after=BitString(n_bits, p_val),
        created_label=BitString(n_bits, pp_val),
        rejection_rounds=rounds,
    )
    src, dst = report.deduced_edge
    g.add_edge(src, dst)
    report.edges_added.append((src, dst))

    added, removed = report.edges_added, report.edges_removed
    prune = mode is RecheckMode.PRUNE_ONLY
    for q in adjacent:
        q_val = g.label_value(q)
        for x, x_val in ((p, p_val), (pp, pp_val)):
            fwd = x_val & ~q_val == 0
            bwd = q_val & ~x_val == 0
            if prune and x == p:
                if not fwd and g.remove_edge(x, q):
                    removed.append((x, q))
                if not bwd and g.remove_edge(q, x):
                    removed.append((q, x))
                continue
            for s, d, holds in ((x, q, fwd), (q, x, bwd)):
                if holds:
                    if g.add_edge(s, d):
                        added.append((s, d))
                elif g.remove_edge(s, d):
                    removed.append((s, d))
    return report


StepHook = Callable[[DirectedGraph, TransformReport], None]


def grow(
    cfg: GrowthConfig,
    *,
    trace: bool = False,
    on_step: Optional[StepHook] = None,
) -> tuple[DirectedGraph, list[TransformReport]]:
    """Grow from the initial network until ``cfg.target_n`` nodes exist.

    Each step draws, in order: the node to transform (uniform over current
    nodes), the direction coin, then the collapse/expand rounds. Reports are
    kept only when ``trace`` is set; ``on_step`` sees every report regardless.
    """
    r = RandomSource(cfg.seed)
    g = init_network(cfg)
    reports = []
    while g.node_count < cfg.target_n:
        p = r.below(g.node_count)
        rep = local_transform(g, p, r, cfg.recheck_mode)
        if trace:
            reports.append(rep)
        if on_step is not None:
            on_step(g, rep)
    return g, reports


def validate_soundness(g: DirectedGraph) -> list[tuple[int, int]]:
    """Edges ``u -> v`` whose labels violate ``implies(label(u), label(v))``."""
    labels = g._labels
    fetch = labels.__getitem__
    # every in-neighbour of v implies v iff their bitwise OR does
    joined = [reduce(or_, map(fetch, inc), 0) for inc in g._in]
    if not any(map(and_, joined, map(invert, labels))):
        return []
    bad = []
    for v, inc in enumerate(g._in):
        lv = labels[v]
        bad.extend((u, v) for u in inc if labels[u] & ~lv)
    bad.sort()
    return bad
