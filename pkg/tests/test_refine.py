import pytest

from ciakit import (
    IoSets,
    Label,
    LabelKind,
    OracleLimitError,
    Partition,
    RefinementTimeout,
    RefineStats,
    ValidationError,
    compose,
    partition_refine,
    quotient,
    reachable,
    refine_step,
    serialize_automaton,
    silent_closure,
    splitter,
    weak_bisim_oracle,
    weak_bisim_relation,
    weak_targets,
)
from conftest import aut, handshake_pair, random_automaton

TAU = Label("A", "t", "A")
IN_A = Label(None, "a", "A")
IN_B = Label(None, "b", "A")


def silent_chain():
    return aut(
        states=["s0", "s1", "s2"],
        trans=[("s0", TAU, "s1"), ("s1", TAU, "s2")],
        init=["s0"],
    )


def branching():
    # s0 -tau-> s1, s0 -a-> s2, s1 -b-> s3
    return aut(
        states=["s0", "s1", "s2", "s3"],
        trans=[("s0", TAU, "s1"), ("s0", IN_A, "s2"), ("s1", IN_B, "s3")],
        init=["s0"],
    )


class TestSilentClosure:
    def test_chain(self):
        c = silent_closure(silent_chain())
        assert c["s0"] == {"s0", "s1", "s2"}
        assert c["s1"] == {"s1", "s2"}
        assert c["s2"] == {"s2"}

    def test_no_internal_transitions(self):
        a = aut(states=["s0", "s1"], trans=[("s0", IN_A, "s1")])
        c = silent_closure(a)
        assert all(c[q] == {q} for q in a.states)

    def test_two_cycle(self):
        a = aut(states=["s0", "s1"], trans=[("s0", TAU, "s1"), ("s1", TAU, "s0")])
        c = silent_closure(a)
        assert c["s0"] == c["s1"] == {"s0", "s1"}


class TestWeakTargets:
    def test_silent_prefix_then_visible(self):
        a = aut(
            states=["s0", "s1", "s2"],
            trans=[("s0", TAU, "s1"), ("s1", IN_A, "s2")],
        )
        assert weak_targets("s0", IN_A, a) == {"s2"}

    def test_contains_direct_successors(self):
        a = branching()
        assert weak_targets("s0", IN_A, a) >= {"s2"}
        assert weak_targets("s1", IN_B, a) >= {"s3"}

    def test_silent_label_matches_by_closure(self):
        a = silent_chain()
        assert weak_targets("s0", TAU, a) == {"s0", "s1", "s2"}

    def test_strict_internal_requires_the_label(self):
        a = silent_chain()
        assert weak_targets("s2", TAU, a, strict_internal=True) == frozenset()
        assert weak_targets("s0", TAU, a, strict_internal=True) == {"s1", "s2"}


class TestSplitter:
    def test_weakly_reaches_candidate(self):
        a = aut(
            states=["s0", "s1", "s2"],
            trans=[("s0", TAU, "s1"), ("s1", IN_A, "s2")],
        )
        assert splitter("s0", IN_A, frozenset({"s2"}), a)

    def test_no_transitions_means_false(self):
        a = aut(states=["s0", "s1"])
        assert not splitter("s0", IN_A, frozenset({"s1"}), a)

    def test_internal_label_with_state_in_candidate(self):
        a = aut(states=["s0", "s1"])
        assert splitter("s0", TAU, frozenset({"s0", "s1"}), a)


class TestRefineStep:
    def test_splits_by_visible_offer(self):
        a = aut(
            states=["s0", "s1", "s2"],
            trans=[("s0", TAU, "s1"), ("s1", IN_A, "s2")],
        )
        start = Partition.from_blocks([frozenset({"s0", "s1", "s2"})])
        out = refine_step(start, IN_A, frozenset({"s2"}), a)
        assert set(out.blocks) == {frozenset({"s0", "s1"}), frozenset({"s2"})}
        assert out.multis == (frozenset({"s0", "s1"}),)
        assert out.singletons == (frozenset({"s2"}),)

    def test_unreachable_candidate_changes_nothing(self):
        a = branching()
        start = Partition.from_blocks(
            [frozenset({"s0", "s1"}), frozenset({"s2", "s3"})]
        )
        out = refine_step(start, Label(None, "zz", "A"), frozenset({"s2"}), a)
        assert out == start

    def test_singletons_never_split(self):
        a = branching()
        start = Partition.from_blocks([frozenset({q}) for q in a.states])
        out = refine_step(start, IN_A, frozenset({"s2"}), a)
        assert out == start

    def test_block_count_monotone(self):
        a = branching()
        part = Partition.from_blocks([frozenset(a.states)])
        counts = [part.block_count()]
        for label in (IN_A, IN_B, TAU):
            for block in part.blocks:
                part = refine_step(part, label, block, a)
                counts.append(part.block_count())
        assert counts == sorted(counts)
        assert counts[-1] - counts[0] <= len(a.states) - 1


class TestPartitionRefine:
    def test_silent_chain_merges_fully(self):
        part = partition_refine(silent_chain())
        assert part.blocks == (frozenset({"s0", "s1", "s2"}),)

    def test_branching_example(self):
        part = partition_refine(branching())
        assert set(part.blocks) == {
            frozenset({"s0"}),
            frozenset({"s1"}),
            frozenset({"s2", "s3"}),
        }

    def test_distinct_strong_behaviors_stay_apart(self):
        a = aut(
            states=["s0", "s1", "s2"],
            trans=[("s0", IN_A, "s1"), ("s1", IN_B, "s2")],
        )
        part = partition_refine(a)
        assert all(len(b) == 1 for b in part.blocks)

    def test_timeout_raises(self):
        a = random_automaton(5, max_states=12)
        with pytest.raises(RefinementTimeout):
            partition_refine(a, timeout=-1.0)

    def test_deterministic_across_runs(self):
        for seed in range(10):
            a = random_automaton(seed)
            first = partition_refine(a)
            second = partition_refine(a)
            assert first == second
            assert serialize_automaton(quotient(a, first)) == serialize_automaton(
                quotient(a, second)
            )

    def test_idempotent_on_quotient(self):
        for seed in range(20):
            a = random_automaton(seed)
            reduced = quotient(a, partition_refine(a))
            again = partition_refine(reduced)
            assert all(len(b) == 1 for b in again.blocks)

    def test_stats_filled(self):
        stats = RefineStats()
        partition_refine(branching(), stats=stats)
        assert stats.refine_steps > 0
        assert stats.splitter_evals > 0
        assert stats.work_units() == stats.refine_steps + stats.splitter_evals

    def test_strict_internal_distinguishes_chain(self):
        chain = silent_chain()
        assert partition_refine(chain).block_count() == 1
        strict = partition_refine(chain, strict_internal=True)
        assert strict.block_count() == 3

    def test_engine_agrees_with_naive_weak_targets(self):
        for seed in range(12):
            a = random_automaton(seed, max_states=8)
            closure = silent_closure(a)
            part = partition_refine(a)
            # every pair of states in a block must agree with every splitter
            labels = {t.label for t in a.transitions}
            for block in part.blocks:
                for label in labels:
                    for candidate in part.blocks:
                        verdicts = {
                            splitter(q, label, candidate, a, closure) for q in block
                        }
                        assert len(verdicts) == 1


class TestQuotient:
    def test_silent_chain_collapses_to_point(self):
        chain = silent_chain()
        q = quotient(chain, partition_refine(chain))
        assert len(q.states) == 1
        assert not q.transitions
        assert q.initial == q.states

    def test_class_crossing_internal_survives(self):
        a = branching()
        q = quotient(a, partition_refine(a))
        assert len(q.states) == 3
        internal = [t for t in q.transitions if t.label.kind is LabelKind.INTERNAL]
        assert len(internal) == 1
        assert internal[0].source != internal[0].target

    def test_identity_partition_drops_only_silent_self_loops(self):
        a = aut(
            states=["s0", "s1"],
            trans=[("s0", TAU, "s0"), ("s0", IN_A, "s1"), ("s1", IN_B, "s1")],
        )
        part = Partition.from_blocks([frozenset({q}) for q in a.states])
        q = quotient(a, part)
        assert len(q.states) == 2
        kinds = sorted(t.label.action for t in q.transitions)
        assert kinds == ["a", "b"]

    def test_states_renamed_canonically(self):
        a = branching()
        q = quotient(a, partition_refine(a))
        assert q.states == {"r0", "r1", "r2"}


class TestOracle:
    def test_quotient_always_bisimilar(self):
        for seed in range(25):
            a = random_automaton(seed)
            q = quotient(a, partition_refine(a))
            assert weak_bisim_oracle(a, q)

    def test_point_vs_silent_chain(self):
        point = aut(states=["s0"])
        two = aut(states=["s0", "s1"], trans=[("s0", TAU, "s1")])
        assert weak_bisim_oracle(point, two)

    def test_different_inputs_not_bisimilar(self):
        left = aut(states=["s0", "s1"], trans=[("s0", IN_A, "s1")])
        right = aut(states=["s0", "s1"], trans=[("s0", IN_B, "s1")])
        assert not weak_bisim_oracle(left, right)

    def test_bound_enforced(self):
        a = aut(states=["s0", "s1"], trans=[("s0", IN_A, "s1")])
        with pytest.raises(OracleLimitError, match="limited to"):
            weak_bisim_oracle(a, a, max_states=3)
        with pytest.raises(OracleLimitError, match="limited to"):
            weak_bisim_relation(a, max_states=1)

    def test_hierarchies_must_share_leaves(self):
        a = aut("A", ("A",), ["s0"])
        b = aut("B", ("B",), ["s0"])
        with pytest.raises(ValidationError, match="leaf sets"):
            weak_bisim_oracle(a, b)

    def test_minimality_via_relation(self):
        for seed in range(15):
            a = random_automaton(seed)
            q = quotient(a, partition_refine(a))
            relation = weak_bisim_relation(q)
            distinct = [(x, y) for (x, y) in relation if x != y]
            assert not distinct, f"seed {seed}: quotient not minimal: {distinct}"

    def test_partition_equals_oracle_equivalence_classes(self):
        # the refined blocks must be exactly the greatest relation's classes
        for seed in range(40):
            a = random_automaton(seed * 3 + 1, max_states=10)
            relation = weak_bisim_relation(a)
            expected = {frozenset(p for p in a.states if (q, p) in relation) for q in a.states}
            assert set(partition_refine(a).blocks) == expected

    def test_strict_partition_equals_strict_oracle_classes(self):
        for seed in range(25):
            a = random_automaton(seed * 5 + 2, max_states=10)
            relation = weak_bisim_relation(a, strict_internal=True)
            expected = {frozenset(p for p in a.states if (q, p) in relation) for q in a.states}
            got = partition_refine(a, strict_internal=True)
            assert set(got.blocks) == expected


class TestFullPipelineOnHandshake:
    def test_closed_composite_reduces_to_point(self):
        a, b = handshake_pair()
        composite = reachable(compose([a, b], IoSets.closed()))
        assert len(composite.states) == 2
        part = partition_refine(composite)
        assert part.block_count() == 1
        q = quotient(composite, part)
        assert len(q.states) == 1 and not q.transitions
        assert weak_bisim_oracle(composite, q)

    def test_no_silent_self_loop_survives(self):
        for seed in range(20):
            a = random_automaton(seed)
            q = quotient(a, partition_refine(a))
            for t in q.transitions:
                assert not (t.label.kind is LabelKind.INTERNAL and t.source == t.target)
