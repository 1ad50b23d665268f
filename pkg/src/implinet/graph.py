"""Mutable directed graph with dense node ids and bit-string labels, plus snapshot I/O."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from implinet.bitstring import BitString

SNAPSHOT_MAGIC = "implinet-snapshot v1"


class SnapshotError(ValueError):
    """Malformed snapshot content; the message names the offending line or record."""


class DirectedGraph:
    """Directed graph whose nodes carry ``n_bits``-wide labels.

    Node ids are assigned densely from 0 and never reused. Edges are ordered
    pairs without self-loops or duplicates; ``out_adj`` and ``in_adj`` mirror
    each other. Whether edges respect the implication order is not enforced
    here.
    """

    def __init__(self, n_bits: int):
        BitString(n_bits, 0)  # validates width
        self.n_bits = n_bits
        self._labels: list[int] = []
        self._out: list[set[int]] = []
        self._in: list[set[int]] = []
        self._edge_count = 0

    def __len__(self) -> int:
        return len(self._labels)

    @property
    def node_count(self) -> int:
        return len(self._labels)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def nodes(self) -> range:
        return range(len(self._labels))

    def _check(self, node: int) -> None:
        if not (isinstance(node, int) and 0 <= node < len(self._labels)):
            raise KeyError(f"unknown node id {node!r}")

    def _check_label(self, label: BitString) -> None:
        if label.width != self.n_bits:
            raise ValueError(f"label width {label.width} != graph width {self.n_bits}")

    def add_node(self, label: BitString) -> int:
        self._check_label(label)
        self._labels.append(label.value)
        self._out.append(set())
        self._in.append(set())
        return len(self._labels) - 1

    def label(self, node: int) -> BitString:
        self._check(node)
        return BitString(self.n_bits, self._labels[node])

    def label_value(self, node: int) -> int:
        return self._labels[node]

    def set_label(self, node: int, label: BitString) -> None:
        """Replace a node's label. Incident edges are left as they are."""
        self._check(node)
        self._check_label(label)
        self._labels[node] = label.value

    def has_edge(self, src: int, dst: int) -> bool:
        self._check(src)
        self._check(dst)
        return dst in self._out[src]

    def add_edge(self, src: int, dst: int) -> bool:
        """Insert ``src -> dst``; returns False if it was already present."""
        self._check(src)
        self._check(dst)
        if src == dst:
            raise ValueError(f"self-loop on node {src}")
        out = self._out[src]
        if dst in out:
            return False
        out.add(dst)
        self._in[dst].add(src)
        self._edge_count += 1
        return True

    def remove_edge(self, src: int, dst: int) -> bool:
        self._check(src)
        self._check(dst)
        out = self._out[src]
        if dst not in out:
            return False
        out.remove(dst)
        self._in[dst].remove(src)
        self._edge_count -= 1
        return True

    def successors(self, node: int) -> list[int]:
        self._check(node)
        return sorted(self._out[node])

    def predecessors(self, node: int) -> list[int]:
        self._check(node)
        return sorted(self._in[node])

    def out_degree(self, node: int) -> int:
        self._check(node)
        return len(self._out[node])

    def in_degree(self, node: int) -> int:
        self._check(node)
        return len(self._in[node])

    def adjacent_set(self, node: int) -> list[int]:
        """Nodes joined to ``node`` by an edge in either direction, ascending."""
        self._check(node)
        return sorted(self._out[node] | self._in[node])

    def edges(self) -> list[tuple[int, int]]:
        """All edges in canonical order (ascending src, then dst)."""
        return [(u, v) for u in range(len(self._out)) for v in sorted(self._out[u])]

    def audit(self) -> list[str]:
        """Check structural invariants; returns a list of problems (empty if sound)."""
        problems = []
        count = 0
        for u, out in enumerate(self._out):
            if u in out:
                problems.append(f"self-loop at {u}")
            for v in out:
                count += 1
                if not 0 <= v < len(self._labels):
                    problems.append(f"edge {u}->{v} targets unknown node")
                elif u not in self._in[v]:
                    problems.append(f"edge {u}->{v} missing from in_adj")
        for v, inc in enumerate(self._in):
            for u in inc:
                if v not in self._out[u]:
                    problems.append(f"in_adj has {u}->{v} but out_adj does not")
        if count != self._edge_count:
            problems.append(f"edge counter {self._edge_count} != {count}")
        if sum(len(s) for s in self._in) != count:
            problems.append("in-degree sum differs from out-degree sum")
        return problems

    def copy(self) -> DirectedGraph:
        g = DirectedGraph(self.n_bits)
        g._labels = list(self._labels)
        g._out = [set(s) for s in self._out]
        g._in = [set(s) for s in self._in]
        g._edge_count = self._edge_count
        return g

    def __eq__(self, other) -> bool:
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (
            self.n_bits == other.n_bits
            and self._labels == other._labels
            and self._out == other._out
        )

    def __repr__(self) -> str:
        return f"DirectedGraph(n_bits={self.n_bits}, nodes={self.node_count}, edges={self.edge_count})"


@dataclass
class Snapshot:
    n_bits: int
    nodes: list[tuple[int, str]] = field(default_factory=list)
    edges: list[tuple[int, int]] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"{SNAPSHOT_MAGIC} n_bits={self.n_bits}"]
        lines += [f"node {i} {label}" for i, label in self.nodes]
        lines += [f"edge {s} {d}" for s, d in self.edges]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "n_bits": self.n_bits,
            "nodes": [[i, label] for i, label in self.nodes],
            "edges": [[s, d] for s, d in self.edges],
        }
        return json.dumps(payload, separators=(",", ":")) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Snapshot:
        lines = text.splitlines()
        if not lines:
            raise SnapshotError("line 1: empty snapshot")
        head = lines[0].split()
        if len(head) != 3 or " ".join(head[:2]) != SNAPSHOT_MAGIC or not head[2].startswith("n_bits="):
            raise SnapshotError(f"line 1: bad header {lines[0]!r}")
        try:
            n_bits = int(head[2][len("n_bits="):])
        except ValueError:
            raise SnapshotError(f"line 1: bad n_bits in {lines[0]!r}") from None
        snap = cls(n_bits)
        for lineno, line in enumerate(lines[1:], start=2):
            parts = line.split()
            if not parts:
                continue
            kind = parts[0]
            if kind == "node" and len(parts) == 3:
                if snap.edges:
                    raise SnapshotError(f"line {lineno}: node record after edge records")
                snap.nodes.append((_parse_int(parts[1], lineno), parts[2]))
            elif kind == "edge" and len(parts) == 3:
                snap.edges.append((_parse_int(parts[1], lineno), _parse_int(parts[2], lineno)))
            else:
                raise SnapshotError(f"line {lineno}: unrecognized record {line!r}")
        return snap

    @classmethod
    def from_json(cls, text: str) -> Snapshot:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SnapshotError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(data, dict) or set(data) != {"n_bits", "nodes", "edges"}:
            raise SnapshotError("record root: expected keys n_bits, nodes, edges")
        n_bits = data["n_bits"]
        if not isinstance(n_bits, int) or isinstance(n_bits, bool):
            raise SnapshotError("record n_bits: not an integer")
        snap = cls(n_bits)
        for k, rec in enumerate(data["nodes"]):
            if not (isinstance(rec, list) and len(rec) == 2 and _is_int(rec[0]) and isinstance(rec[1], str)):
                raise SnapshotError(f"record nodes[{k}]: expected [id, label]")
            snap.nodes.append((rec[0], rec[1]))
        for k, rec in enumerate(data["edges"]):
            if not (isinstance(rec, list) and len(rec) == 2 and _is_int(rec[0]) and _is_int(rec[1])):
                raise SnapshotError(f"record edges[{k}]: expected [src, dst]")
            snap.edges.append((rec[0], rec[1]))
        return snap


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _parse_int(token: str, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise SnapshotError(f"line {lineno}: {token!r} is not an integer") from None
    if value < 0:
        raise SnapshotError(f"line {lineno}: negative id {value}")
    return value


def save_snapshot(g: DirectedGraph) -> Snapshot:
    return Snapshot(
        g.n_bits,
        nodes=[(i, str(g.label(i))) for i in g.nodes()],
        edges=g.edges(),
    )


def load_snapshot(s: Snapshot) -> DirectedGraph:
    """Rebuild a graph, validating widths, id density and edge references.

    Errors name the record index in ``s.nodes`` / ``s.edges``; the text
    reader's line numbers are ``index + 2`` for nodes.
    """
    try:
        g = DirectedGraph(s.n_bits)
    except ValueError as exc:
        raise SnapshotError(f"header: {exc}") from None
    for k, (node_id, text) in enumerate(s.nodes):
        if node_id != k:
            raise SnapshotError(f"node record {k}: expected id {k}, got {node_id}")
        try:
            label = BitString.parse(text)
        except ValueError as exc:
            raise SnapshotError(f"node record {k}: {exc}") from None
        if label.width != s.n_bits:
            raise SnapshotError(f"node record {k}: label width {label.width} != n_bits {s.n_bits}")
        g.add_node(label)
    for k, (src, dst) in enumerate(s.edges):
        where = f"edge record {k} ({src} {dst})"
        if not (0 <= src < len(g) and 0 <= dst < len(g)):
            raise SnapshotError(f"{where}: unknown node id")
        if src == dst:
            raise SnapshotError(f"{where}: self-loop")
        if not g.add_edge(src, dst):
            raise SnapshotError(f"{where}: duplicate edge")
    return g


def dumps(g: DirectedGraph, fmt: str = "text") -> str:
    snap = save_snapshot(g)
    if fmt == "json":
        return snap.to_json()
    if fmt == "text":
        return snap.to_text()
    raise ValueError(f"unknown snapshot format {fmt!r}")


def loads(text: str) -> DirectedGraph:
    """Parse either the line format or its JSON rendering."""
    if text.lstrip().startswith("{"):
        return load_snapshot(Snapshot.from_json(text))
    return load_snapshot(Snapshot.from_text(text))


def write_graph(g: DirectedGraph, path) -> None:
    """Write a snapshot; ``.json`` paths get the JSON rendering."""
    fmt = "json" if os.fspath(path).endswith(".json") else "text"
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps(g, fmt))


def read_graph(path) -> DirectedGraph:
    with open(path, encoding="utf-8") as f:
        return loads(f.read())
