"""Metrics over grown networks: degree-rank tables, clustering, path length, sweeps.

Clustering and path length are computed on the undirected projection, where
u and v are linked if either directed edge exists.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from implinet.bitstring import RandomSource
from implinet.graph import DirectedGraph
from implinet.growth import GrowthConfig, grow, validate_soundness

EXACT_APL_LIMIT = 20_000
DEFAULT_APL_SAMPLES = 1000
_BFS_CHUNK = 1024

SWEEP_HEADER = [
    "N", "seed", "clustering_excl", "clustering_incl0", "apl",
    "giant_fraction", "edge_count", "wall_time_ms",
]


def fmt_num(x) -> str:
    """Render a number with 9 significant digits (integers verbatim)."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".9g")


def round_sig(x: float) -> float:
    return float(format(float(x), ".9g"))


@dataclass
class UndirectedGraph:
    """Simple undirected graph as one neighbour set per node id."""

    adj: list

    @classmethod
    def empty(cls, n: int) -> UndirectedGraph:
        return cls([set() for _ in range(n)])

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> UndirectedGraph:
        g = cls.empty(n)
        for u, v in edges:
            g.add_edge(u, v)
        return g

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"self-loop on node {u}")
        self.adj[u].add(v)
        self.adj[v].add(u)

    @property
    def node_count(self) -> int:
        return len(self.adj)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.adj) // 2

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nbrs in enumerate(self.adj) for v in sorted(nbrs) if u < v]

    def to_csr(self) -> csr_matrix:
        n = len(self.adj)
        indptr = np.zeros(n + 1, dtype=np.int64)
        indices = []
        for u, nbrs in enumerate(self.adj):
            indices.extend(sorted(nbrs))
            indptr[u + 1] = len(indices)
        data = np.ones(len(indices), dtype=np.int8)
        return csr_matrix((data, np.asarray(indices, dtype=np.int64), indptr), shape=(n, n))


def undirected_projection(g: DirectedGraph) -> UndirectedGraph:
    return UndirectedGraph([set(out) | set(inc) for out, inc in zip(g._out, g._in)])


@dataclass
class DegreeRankTable:
    kind: str
    rows: list

    @property
    def degrees(self) -> list[int]:
        return [d for _, d in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rank", "degree"])
        w.writerows(self.rows)
        return buf.getvalue()


def _degrees(g, kind: str) -> list[int]:
    if isinstance(g, UndirectedGraph):
        if kind != "undirected":
            raise ValueError(f"an undirected graph has no {kind!r} degree")
        return [len(s) for s in g.adj]
    if kind == "out":
        return [len(s) for s in g._out]
    if kind == "in":
        return [len(s) for s in g._in]
    if kind == "undirected":
        return [len(out | inc) for out, inc in zip(g._out, g._in)]
    raise ValueError(f"unknown degree kind {kind!r}")


def degree_rank(g, kind: str = "out") -> DegreeRankTable:
    """Degrees sorted descending; ties keep ascending node id (ordinal ranks)."""
    degs = _degrees(g, kind)
    order = sorted(range(len(degs)), key=lambda u: (-degs[u], u))
    return DegreeRankTable(kind, [(rank, degs[u]) for rank, u in enumerate(order, start=1)])


@dataclass(frozen=True)
class ClusteringResult:
    excl: float
    incl0: float
    eligible: int  # nodes with degree >= 2; excl is reported as 0 when this is 0

    def __iter__(self):
        return iter((self.excl, self.incl0))


def local_clustering(u: UndirectedGraph) -> list[Optional[float]]:
    """Per-node coefficient, ``None`` where degree < 2."""
    adj = u.adj
    twice_tri = [0] * len(adj)
    for a, nbrs in enumerate(adj):
        for b in nbrs:
            if a < b:
                common = len(nbrs & adj[b])
                twice_tri[a] += common
                twice_tri[b] += common
    out = []
    for a, nbrs in enumerate(adj):
        k = len(nbrs)
        out.append(twice_tri[a] / (k * (k - 1)) if k >= 2 else None)
    return out


def clustering(u: UndirectedGraph) -> ClusteringResult:
    """Mean local clustering, excluding (``excl``) or zero-filling (``incl0``) degree<2 nodes."""
    local = local_clustering(u)
    eligible = [c for c in local if c is not None]
    total = math.fsum(eligible)
    excl = total / len(eligible) if eligible else 0.0
    incl0 = total / len(local) if local else 0.0
    return ClusteringResult(excl, incl0, len(eligible))


def giant_component(u: UndirectedGraph) -> list[int]:
    """Node ids of the largest component; size ties go to the smallest node id."""
    n = u.node_count
    if n == 0:
        return []
    ncomp, labels = connected_components(u.to_csr(), directed=False)
    sizes = np.bincount(labels, minlength=ncomp)
    first = np.full(ncomp, n, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(n))
    best = min(range(ncomp), key=lambda c: (-sizes[c], first[c]))
    return np.flatnonzero(labels == best).tolist()


@dataclass(frozen=True)
class PathLengthResult:
    apl: float
    giant_fraction: float
    giant_size: int
    sampled: bool = False
    sources: int = 0

    def __iter__(self):
        return iter((self.apl, self.giant_fraction))


def _distance_sum(indptr: np.ndarray, indices: np.ndarray, sources: np.ndarray) -> int:
    """Sum of BFS distances from ``sources`` to every node, one bit lane per source.

    Every node must have degree >= 1 (true inside a component of size >= 2).
    """
    n = len(indptr) - 1
    words = (len(sources) + 63) // 64
    lanes = np.arange(len(sources))
    frontier = np.zeros((n, words), dtype=np.uint64)
    np.bitwise_or.at(
        frontier,
        (sources, lanes // 64),
        np.left_shift(np.uint64(1), (lanes % 64).astype(np.uint64)),
    )
    visited = frontier.copy()
    starts = indptr[:-1]
    total = 0
    depth = 0
    while True:
        depth += 1
        reached = np.bitwise_or.reduceat(frontier[indices], starts, axis=0)
        reached &= ~visited
        found = int(np.bitwise_count(reached).sum())
        if found == 0:
            return total
        total += depth * found
        visited |= reached
        frontier = reached


def average_path_length(
    u: UndirectedGraph,
    *,
    workers: int = 1,
    exact_limit: float = EXACT_APL_LIMIT,
    samples: int = DEFAULT_APL_SAMPLES,
    seed: int = 0,
) -> PathLengthResult:
    """Mean shortest-path length over unordered pairs of the giant component.

    One breadth-first search runs from every giant node. Above ``exact_limit``
    nodes, ``samples`` seeded random sources are used instead and the result
    is flagged as sampled. Distances are summed as integers, so the value does
    not depend on ``workers``.
    """
    n = u.node_count
    giant = giant_component(u)
    size = len(giant)
    if n == 0:
        return PathLengthResult(0.0, 0.0, 0)
    frac = size / n
    if size < 2:
        return PathLengthResult(0.0, frac, size)
    sub = u.to_csr()[giant][:, giant].tocsr()
    sub.sort_indices()
    indptr, indices = sub.indptr.astype(np.int64), sub.indices.astype(np.int64)
    sampled = size > exact_limit
    if sampled:
        r = RandomSource(seed)
        pool = list(range(size))
        for i in range(min(samples, size)):
            j = i + r.below(size - i)
            pool[i], pool[j] = pool[j], pool[i]
        sources = np.asarray(sorted(pool[: min(samples, size)]), dtype=np.int64)
    else:
        sources = np.arange(size, dtype=np.int64)
    chunks = [sources[i:i + _BFS_CHUNK] for i in range(0, len(sources), _BFS_CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool_exec:
            total = sum(pool_exec.map(lambda c: _distance_sum(indptr, indices, c), chunks))
    else:
        total = sum(_distance_sum(indptr, indices, c) for c in chunks)
    pairs = len(sources) * (size - 1)
    return PathLengthResult(total / pairs, frac, size, sampled, len(sources))


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r2: float
    points: int

    def __iter__(self):
        return iter((self.slope, self.r2))


def loglog_slope(table: DegreeRankTable, rank_min: int = 1, rank_max: Optional[int] = None) -> SlopeFit:
    """Least-squares line through (log10 rank, log10 degree) for ranks in range.

    Rows with degree 0 are dropped. A constant response gives r2 = 1.0.
    """
    if rank_min < 1:
        raise ValueError(f"rank_min must be >= 1, got {rank_min}")
    hi = math.inf if rank_max is None else rank_max
    pts = [(r, d) for r, d in table.rows if rank_min <= r <= hi and d >= 1]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 rows with degree >= 1 in ranks [{rank_min}, {rank_max}], got {len(pts)}")
    x = np.log10(np.array([r for r, _ in pts], dtype=float))
    y = np.log10(np.array([d for _, d in pts], dtype=float))
    if np.all(y == y[0]):
        return SlopeFit(0.0, float(y[0]), 1.0, len(pts))
    dx = x - x.mean()
    dy = y - y.mean()
    slope = float(dx @ dy / (dx @ dx))
    intercept = float(y.mean() - slope * x.mean())
    resid = dy - slope * dx
    r2 = 1.0 - float(resid @ resid) / float(dy @ dy)
    return SlopeFit(slope, intercept, r2, len(pts))


def generate_ba(n: int, links_per_node: int, seed: int) -> UndirectedGraph:
    """Barabási-Albert baseline grown from a clique of ``links_per_node + 1`` nodes.

    Targets are drawn proportionally to degree from the endpoint list,
    rejecting repeats within one step.
    """
    m = links_per_node
    if m < 1 or n < m + 1:
        raise ValueError(f"need n >= links_per_node + 1 >= 2, got n={n}, links_per_node={m}")
    r = RandomSource(seed)
    g = UndirectedGraph.empty(n)
    endpoints = []
    for a in range(m + 1):
        for b in range(a + 1, m + 1):
            g.add_edge(a, b)
            endpoints += (a, b)
    for new in range(m + 1, n):
        targets = []
        while len(targets) < m:
            t = endpoints[r.below(len(endpoints))]
            if t not in targets:
                targets.append(t)
        for t in targets:
            g.add_edge(new, t)
            endpoints += (new, t)
    return g


@dataclass
class MetricsReport:
    node_count: int
    edge_count: int
    undirected_edge_count: int
    clustering_excl: float
    clustering_incl0: float
    clustering_defined: bool
    apl: float
    giant_fraction: float
    apl_sampled: bool
    slope_out: Optional[float]
    r2_out: Optional[float]
    slope_in: Optional[float]
    r2_in: Optional[float]
    rank_range: tuple
    soundness_violations: list = field(default_factory=list)
    rank_out: Optional[DegreeRankTable] = None
    rank_in: Optional[DegreeRankTable] = None

    def to_dict(self) -> dict:
        def num(x):
            if x is None or isinstance(x, (bool, int)):
                return x
            return round_sig(x)

        return {
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "undirected_edge_count": self.undirected_edge_count,
            "clustering_excl": num(self.clustering_excl),
            "clustering_incl0": num(self.clustering_incl0),
            "clustering_defined": self.clustering_defined,
            "apl": num(self.apl),
            "giant_fraction": num(self.giant_fraction),
            "apl_sampled": self.apl_sampled,
            "slope_out": num(self.slope_out),
            "r2_out": num(self.r2_out),
            "slope_in": num(self.slope_in),
            "r2_in": num(self.r2_in),
            "rank_range": list(self.rank_range),
            "soundness_violations": [list(e) for e in self.soundness_violations],
        }


def _try_slope(table: DegreeRankTable, lo: int, hi: Optional[int]):
    try:
        fit = loglog_slope(table, lo, hi)
    except ValueError:
        return None, None
    return fit.slope, fit.r2


def analyze(
    g: DirectedGraph,
    *,
    rank_range: tuple = (10, 1000),
    workers: int = 1,
    apl_samples: int = DEFAULT_APL_SAMPLES,
    exact_limit: float = EXACT_APL_LIMIT,
) -> MetricsReport:
    """Full metrics pass; slopes are ``None`` when the rank range has < 3 usable rows."""
    u = undirected_projection(g)
    cl = clustering(u)
    pl = average_path_length(u, workers=workers, samples=apl_samples, exact_limit=exact_limit)
    out_t = degree_rank(g, "out")
    in_t = degree_rank(g, "in")
    lo, hi = rank_range
    s_out, r_out = _try_slope(out_t, lo, hi)
    s_in, r_in = _try_slope(in_t, lo, hi)
    return MetricsReport(
        node_count=g.node_count,
        edge_count=g.edge_count,
        undirected_edge_count=u.edge_count,
        clustering_excl=cl.excl,
        clustering_incl0=cl.incl0,
        clustering_defined=cl.eligible > 0,
        apl=pl.apl,
        giant_fraction=pl.giant_fraction,
        apl_sampled=pl.sampled,
        slope_out=s_out,
        r2_out=r_out,
        slope_in=s_in,
        r2_in=r_in,
        rank_range=(lo, hi),
        soundness_violations=validate_soundness(g),
        rank_out=out_t,
        rank_in=in_t,
    )


def paper_n_list() -> list[int]:
    """10..100 by 10, 200..1000 by 100, then 1500..5000 by 500 (27 values)."""
    return list(range(10, 101, 10)) + list(range(200, 1001, 100)) + list(range(1500, 5001, 500))


@dataclass
class SweepRow:
    N: int
    seed: int
    clustering_excl: float
    clustering_incl0: float
    apl: float
    giant_fraction: float
    edge_count: int
    wall_time_ms: float
    clustering_defined: bool = True

    def csv_fields(self) -> list[str]:
        return [fmt_num(getattr(self, name)) for name in SWEEP_HEADER]


def sweep_point(template: GrowthConfig, n: int, seed: int, *, timing: bool = True) -> SweepRow:
    start = time.perf_counter()
    cfg = replace(template, target_n=n, seed=seed)
    g, _ = grow(cfg)
    u = undirected_projection(g)
    cl = clustering(u)
    pl = average_path_length(u)
    elapsed = (time.perf_counter() - start) * 1000 if timing else 0.0
    return SweepRow(n, seed, cl.excl, cl.incl0, pl.apl, pl.giant_fraction, g.edge_count,
                    elapsed, cl.eligible > 0)


def run_sweep(
    template: GrowthConfig,
    n_list: Sequence[int],
    seeds: Sequence[int],
    *,
    workers: int = 1,
    timing: bool = True,
) -> list[SweepRow]:
    """Grow and measure every (N, seed); rows come back in (N, seed) order.

    ``N`` values below the template's ``m`` are rejected by the config.
    """
    n_list = list(n_list)
    if not n_list:
        raise ValueError("n_list is empty")
    if any(b < a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be ascending")
    jobs = [(n, s) for n in n_list for s in seeds]
    for n, s in jobs:
        replace(template, target_n=n, seed=s)  # fail fast on bad configs
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(lambda job: sweep_point(template, *job, timing=timing), jobs))
    return [sweep_point(template, n, s, timing=timing) for n, s in jobs]


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for row in rows:
        w.writerow(row.csv_fields())
    return buf.getvalue()
