import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from implinet import BitString, DirectedGraph, Snapshot, SnapshotError, load_snapshot, save_snapshot
from implinet.graph import dumps, loads, read_graph, write_graph


def make(labels, edges, n_bits=None):
    n_bits = n_bits or len(labels[0])
    g = DirectedGraph(n_bits)
    for lab in labels:
        g.add_node(BitString.parse(lab))
    for s, d in edges:
        g.add_edge(s, d)
    return g


@pytest.fixture
def fig2_graph():
    return make(["0000", "1100", "1101", "1111"], [(0, 1), (1, 2), (2, 3)])


@st.composite
def graphs(draw):
    n_bits = draw(st.integers(1, 8))
    n = draw(st.integers(0, 12))
    g = DirectedGraph(n_bits)
    for _ in range(n):
        g.add_node(BitString(n_bits, draw(st.integers(0, 2**n_bits - 1))))
    if n >= 2:
        pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=40))
        for s, d in pairs:
            if s != d:
                g.add_edge(s, d)
    return g


class TestNodes:
    def test_dense_ids(self, bs):
        g = DirectedGraph(4)
        assert g.add_node(bs("1100")) == 0
        assert len(g) == 1
        assert g.add_node(bs("0000")) == 1
        assert g.adjacent_set(0) == []

    def test_equal_labels_distinct_ids(self, bs):
        g = DirectedGraph(14)
        a = g.add_node(bs("00000001111111"))
        b = g.add_node(bs("00000001111111"))
        assert a != b and g.label(a) == g.label(b)

    def test_width_mismatch(self, bs):
        g = DirectedGraph(4)
        with pytest.raises(ValueError):
            g.add_node(bs("101"))
        g.add_node(bs("1010"))
        with pytest.raises(ValueError):
            g.set_label(0, bs("10"))

    def test_set_label_keeps_edges(self, fig2_graph, bs):
        g = fig2_graph
        deg = (g.out_degree(1), g.in_degree(1))
        g.set_label(1, bs("1110"))
        assert g.label(1) == bs("1110")
        assert (g.out_degree(1), g.in_degree(1)) == deg
        before = g.copy()
        g.set_label(1, bs("1110"))
        assert g == before


class TestEdges:
    def test_idempotent_insert(self):
        g = make(["00", "01"], [])
        assert g.add_edge(0, 1) is True
        assert g.add_edge(0, 1) is False
        assert g.edge_count == 1

    def test_self_loop_and_unknown(self):
        g = make(["00", "01"], [])
        with pytest.raises(ValueError):
            g.add_edge(0, 0)
        with pytest.raises(KeyError):
            g.add_edge(0, 5)
        with pytest.raises(KeyError):
            g.remove_edge(7, 0)
        with pytest.raises(KeyError):
            g.adjacent_set(3)

    def test_reciprocal(self):
        g = make(["01", "01"], [(0, 1), (1, 0)])
        assert g.edges() == [(0, 1), (1, 0)]
        assert g.adjacent_set(0) == [1]

    def test_remove(self):
        g = make(["00", "01"], [(0, 1)])
        assert g.remove_edge(0, 1) is True
        assert g.remove_edge(1, 0) is False
        assert g.add_edge(0, 1) is True

    def test_adjacent_set(self):
        g = make(["00", "01", "11"], [(0, 1), (2, 0)])
        assert g.adjacent_set(0) == [1, 2]
        assert g.adjacent_set(1) == [0]

    @given(graphs())
    def test_invariants(self, g):
        assert g.audit() == []
        assert sum(g.out_degree(u) for u in g.nodes()) == g.edge_count
        assert sum(g.in_degree(u) for u in g.nodes()) == g.edge_count
        for u in g.nodes():
            total = g.out_degree(u) + g.in_degree(u)
            reciprocal = any(g.has_edge(v, u) for v in g.successors(u))
            assert len(g.adjacent_set(u)) <= total
            assert (len(g.adjacent_set(u)) == total) == (not reciprocal)

    def test_audit_detects_corruption(self):
        g = make(["00", "01"], [(0, 1)])
        g._in[1].clear()
        assert g.audit()


class TestSnapshot:
    def test_text_format(self, fig2_graph):
        assert dumps(fig2_graph) == (
            "implinet-snapshot v1 n_bits=4\n"
            "node 0 0000\nnode 1 1100\nnode 2 1101\nnode 3 1111\n"
            "edge 0 1\nedge 1 2\nedge 2 3\n"
        )

    def test_json_format(self, fig2_graph):
        data = json.loads(dumps(fig2_graph, "json"))
        assert data == {
            "n_bits": 4,
            "nodes": [[0, "0000"], [1, "1100"], [2, "1101"], [3, "1111"]],
            "edges": [[0, 1], [1, 2], [2, 3]],
        }

    @pytest.mark.parametrize("fmt", ["text", "json"])
    def test_fig2_round_trip(self, fig2_graph, fmt):
        assert loads(dumps(fig2_graph, fmt)) == fig2_graph

    def test_empty_round_trip(self):
        g = DirectedGraph(7)
        assert loads(dumps(g)) == g
        assert loads(dumps(g, "json")) == g

    @given(graphs())
    def test_round_trip_property(self, g):
        assert load_snapshot(save_snapshot(g)) == g
        assert loads(dumps(g)) == g
        assert loads(dumps(g, "json")) == g
        snap = save_snapshot(g)
        assert snap.edges == sorted(snap.edges)

    def test_file_io(self, fig2_graph, tmp_path):
        for name in ["g.snap", "g.json"]:
            write_graph(fig2_graph, tmp_path / name)
            assert read_graph(tmp_path / name) == fig2_graph
        assert (tmp_path / "g.json").read_text().startswith("{")

    def test_unknown_id(self):
        text = "implinet-snapshot v1 n_bits=2\nnode 0 00\nnode 1 01\nedge 0 99\n"
        with pytest.raises(SnapshotError, match="unknown node id"):
            loads(text)

    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("implinet-snapshot v2 n_bits=2\n", "line 1"),
            ("implinet-snapshot v1 n_bits=x\n", "line 1"),
            ("implinet-snapshot v1 n_bits=2\nnode 0 011\n", "width"),
            ("implinet-snapshot v1 n_bits=2\nnode 1 01\n", "expected id 0"),
            ("implinet-snapshot v1 n_bits=2\nnode 0 01\nnode 1 01\nedge 0 1\nedge 0 1\n", "duplicate"),
            ("implinet-snapshot v1 n_bits=2\nnode 0 01\nedge 0 0\n", "self-loop"),
            ("implinet-snapshot v1 n_bits=2\nnode 0 01\nbogus\n", "line 3"),
            ("implinet-snapshot v1 n_bits=2\nnode 0 01\nedge 0 -1\n", "line 3"),
            ("implinet-snapshot v1 n_bits=0\n", "header"),
            ("", "line 1"),
        ],
    )
    def test_malformed(self, text, fragment):
        with pytest.raises(SnapshotError, match=fragment):
            loads(text)

    def test_malformed_json(self):
        with pytest.raises(SnapshotError, match="edges\\[0\\]"):
            loads('{"n_bits": 2, "nodes": [[0, "01"]], "edges": [[0]]}')
        with pytest.raises(SnapshotError):
            loads('{"n_bits": 2, "nodes": []}')
        with pytest.raises(SnapshotError):
            loads('{"n_bits": 2,')

    def test_snapshot_dataclass(self):
        snap = Snapshot(2, [(0, "01"), (1, "11")], [(0, 1)])
        assert Snapshot.from_text(snap.to_text()) == snap
        assert Snapshot.from_json(snap.to_json()) == snap
