import pytest

from ciakit import (
    GenParams,
    IoSets,
    Label,
    LabelKind,
    Transition,
    ValidationError,
    compose,
    compose_pairwise_reduce,
    default_io_sets,
    generate_corpus,
    partition_refine,
    quotient,
    reachable,
    weak_bisim_oracle,
)
from conftest import aut, handshake_pair
from oracles import bfs_reachable_oracle, compose_oracle


class TestCompose:
    def test_closed_handshake(self):
        a, b = handshake_pair()
        c = compose([a, b], IoSets.closed())
        assert len(c.states) == 4
        assert c.initial == {"(a0,b0)"}
        assert c.transitions == {
            Transition("(a0,b0)", Label("B", "m", "A"), "(a1,b1)")
        }
        assert c.hierarchy.render() == "((A)(B))"
        assert c.name == "AB"

    def test_open_handshake_adds_solo_moves(self):
        a, b = handshake_pair()
        c = compose([a, b], IoSets(frozenset({"m"}), frozenset({"m"})))
        solo = {
            Transition("(a0,b0)", Label(None, "m", "A"), "(a1,b0)"),
            Transition("(a0,b1)", Label(None, "m", "A"), "(a1,b1)"),
            Transition("(a0,b0)", Label("B", "m", None), "(a0,b1)"),
            Transition("(a1,b0)", Label("B", "m", None), "(a1,b1)"),
        }
        assert c.transitions == solo | {Transition("(a0,b0)", Label("B", "m", "A"), "(a1,b1)")}

    def test_internal_lifts_regardless_of_io(self):
        a = aut("A", ("A",), ["s0", "s1"], [("s0", ("A", "t", "A"), "s1")])
        b = aut("B", ("B",), ["b0"])
        c = compose([a, b], IoSets.closed())
        assert Transition("(s0,b0)", Label("A", "t", "A"), "(s1,b0)") in c.transitions

    def test_product_state_count(self):
        a, b = handshake_pair()
        c3 = aut("C", ("C",), ["c0", "c1", "c2"])
        c = compose([a, b, c3], IoSets.closed())
        assert len(c.states) == 2 * 2 * 3
        assert c.hierarchy.render() == "((A)(B)(C))"

    def test_rejects_single_component(self):
        a, _ = handshake_pair()
        with pytest.raises(ValidationError, match="at least 2"):
            compose([a], IoSets.closed())

    def test_rejects_hierarchy_overlap(self):
        a, _ = handshake_pair()
        twin = aut("A2", ("A",), ["x0"])
        with pytest.raises(ValidationError, match="overlap"):
            compose([a, twin], IoSets.closed())

    def test_rejects_unknown_io_actions(self):
        a, b = handshake_pair()
        with pytest.raises(ValidationError, match="unknown actions"):
            compose([a, b], IoSets(frozenset({"zz"}), frozenset()))

    def test_closed_io_yields_only_internal_labels(self):
        for seed in range(8):
            first, second = generate_corpus(
                GenParams(state_count_range=(2, 4), seed=seed), 1
            )[0]
            c = compose([first, second], IoSets.closed())
            assert all(t.label.kind is LabelKind.INTERNAL for t in c.transitions)

    def test_new_sync_moves_exactly_two_components(self):
        a, b = handshake_pair()
        c = compose([a, b], default_io_sets([a, b]))
        for t in c.transitions:
            src = t.source[1:-1].split(",")
            dst = t.target[1:-1].split(",")
            movers = sum(1 for x, y in zip(src, dst) if x != y)
            if t.label.kind is LabelKind.INTERNAL:
                assert movers == 2  # new sync: handshake pair moves
            else:
                assert movers == 1

    def test_matches_enumeration_oracle(self):
        for seed in range(20):
            first, second = generate_corpus(
                GenParams(state_count_range=(2, 4), seed=seed), 1
            )[0]
            for io in (IoSets.closed(), default_io_sets([first, second])):
                got = compose([first, second], io)
                assert got.transitions == compose_oracle([first, second], io)

    def test_three_way_matches_oracle(self):
        a, b = handshake_pair()
        c3 = aut(
            "C", ("C",), ["c0", "c1"],
            [("c0", (None, "m", "C"), "c1"), ("c1", ("C", "n", None), "c0")],
        )
        io = default_io_sets([a, b, c3])
        got = compose([a, b, c3], io)
        assert got.transitions == compose_oracle([a, b, c3], io)


class TestDefaultIoSets:
    def test_handshake_pair(self):
        a, b = handshake_pair()
        io = default_io_sets([a, b])
        assert io.provided == {"m"} and io.required == {"m"}

    def test_internal_only(self):
        a = aut("A", ("A",), ["s0", "s1"], [("s0", ("A", "t", "A"), "s1")])
        io = default_io_sets([a])
        assert io.provided == frozenset() and io.required == frozenset()

    def test_single_component_open_labels(self):
        a = aut(
            "A", ("A",), ["s0", "s1"],
            [("s0", (None, "a", "A"), "s1"), ("s1", ("A", "b", None), "s0")],
        )
        io = default_io_sets([a])
        assert io.provided == {"b"} and io.required == {"a"}


class TestReachableComposite:
    def test_closed_handshake_prunes_to_bfs_oracle(self):
        a, b = handshake_pair()
        c = compose([a, b], IoSets.closed())
        expected = bfs_reachable_oracle(c)
        assert expected == {"(a0,b0)", "(a1,b1)"}
        assert reachable(c).states == expected


class TestPairwiseReduce:
    def test_two_components_equal_single_fold(self):
        a, b = handshake_pair()
        io = IoSets.closed()
        folded = compose_pairwise_reduce([a, b], io)
        pruned = reachable(compose([a, b], io))
        direct = quotient(pruned, partition_refine(pruned))
        assert len(folded.states) == len(direct.states) == 1

    def test_three_singletons(self):
        comps = [aut(n, (n,), ["s0"]) for n in ("A", "B", "C")]
        folded = compose_pairwise_reduce(comps, IoSets.closed())
        assert len(folded.states) == 1
        assert folded.hierarchy.leaf_names() == {"A", "B", "C"}

    def test_relay_chain_bisimilar_to_nary(self):
        a = aut("A", ("A",), ["a0", "a1"], [("a0", ("A", "m", None), "a1")])
        b = aut(
            "B", ("B",), ["b0", "b1", "b2"],
            [("b0", (None, "m", "B"), "b1"), ("b1", ("B", "n", None), "b2")],
        )
        c = aut("C", ("C",), ["c0", "c1"], [("c0", (None, "n", "C"), "c1")])
        io = default_io_sets([a, b, c])
        folded = compose_pairwise_reduce([a, b, c], io)
        nary = reachable(compose([a, b, c], io))
        assert len(nary.states) <= 30
        assert weak_bisim_oracle(folded, nary)
