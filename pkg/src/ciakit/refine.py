"""Weak-bisimulation partition refinement and quotient construction.

Internal-synchronization transitions (labels with both annotations present)
are silent: a state weakly performs a visible label ``l`` by taking any
number of silent steps, one ``l`` step, and any number of silent steps.  For
a silent label itself the default semantics matches by silent closure alone,
so a silent move never has to reproduce the specific internal label; the
``strict_internal`` switch instead requires the exact internal label to occur
(closure-label-closure, like a visible one).

The refinement loop keeps singleton blocks apart from splittable ones, walks
labels in canonical order, refines the multi-state blocks against a chosen
candidate class, and restarts the worklist after every successful split until
a full sweep over all labels leaves the partition unchanged.  The result is
the coarsest partition stable under all splitters, i.e. minimal up to weak
bisimulation, and it is deterministic (candidate classes are chosen
smallest-first with a lexicographic tie-break).

The module also ships a brute-force greatest-fixpoint weak-bisimulation
oracle for cross-checking refinement results on small instances.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Mapping

from .core import Automaton, Label, LabelKind, Transition
from .errors import OracleLimitError, RefinementTimeout, ValidationError

__all__ = [
    "Partition",
    "RefineStats",
    "silent_closure",
    "weak_targets",
    "splitter",
    "refine_step",
    "partition_refine",
    "quotient",
    "weak_bisim_relation",
    "weak_bisim_oracle",
]

SilentClosure = Mapping[str, frozenset[str]]


def _block_key(block: frozenset[str]) -> tuple[int, tuple[str, ...]]:
    return (len(block), tuple(sorted(block)))


@dataclass(frozen=True)
class Partition:
    """Disjoint non-empty blocks covering the state set, split by block size.

    ``singletons`` holds the size-1 blocks (never refinable again),
    ``multis`` the blocks of two or more states.  Both tuples are kept in
    canonical order, so partitions compare by value.
    """

    singletons: tuple[frozenset[str], ...]
    multis: tuple[frozenset[str], ...]

    @classmethod
    def from_blocks(cls, blocks: Iterable[frozenset[str]]) -> "Partition":
        singles: list[frozenset[str]] = []
        multis: list[frozenset[str]] = []
        seen: set[str] = set()
        for block in blocks:
            block = frozenset(block)
            if not block:
                raise ValidationError("empty partition block")
            if seen & block:
                raise ValidationError("partition blocks are not disjoint")
            seen |= block
            (singles if len(block) == 1 else multis).append(block)
        return cls(tuple(sorted(singles, key=_block_key)), tuple(sorted(multis, key=_block_key)))

    @property
    def blocks(self) -> tuple[frozenset[str], ...]:
        return tuple(sorted(self.singletons + self.multis, key=_block_key))

    def block_count(self) -> int:
        return len(self.singletons) + len(self.multis)

    def block_of(self) -> dict[str, frozenset[str]]:
        return {state: block for block in self.blocks for state in block}


@dataclass
class RefineStats:
    """Deterministic work counters filled in by partition_refine."""

    sweeps: int = 0
    refine_steps: int = 0
    splitter_evals: int = 0
    elapsed_s: float = 0.0

    def work_units(self) -> int:
        return self.refine_steps + self.splitter_evals


def silent_closure(automaton: Automaton) -> dict[str, frozenset[str]]:
    """Reflexive-transitive closure of the internal (silent) transitions."""
    succ: dict[str, set[str]] = {state: {state} for state in automaton.states}
    for trans in automaton.transitions:
        if trans.label.kind is LabelKind.INTERNAL:
            succ[trans.source].add(trans.target)
    closure = {state: set(nbrs) for state, nbrs in succ.items()}
    changed = True
    while changed:
        changed = False
        for state in closure:
            extra: set[str] = set()
            for mid in closure[state]:
                extra |= closure[mid]
            if not extra <= closure[state]:
                closure[state] |= extra
                changed = True
    return {state: frozenset(members) for state, members in closure.items()}


def weak_targets(
    state: str,
    label: Label,
    automaton: Automaton,
    closure: SilentClosure | None = None,
    strict_internal: bool = False,
) -> frozenset[str]:
    """States weakly reachable from ``state`` through ``label``."""
    if closure is None:
        closure = silent_closure(automaton)
    if label.kind is LabelKind.INTERNAL and not strict_internal:
        return frozenset(closure[state])
    out: set[str] = set()
    for pre in closure[state]:
        for trans in automaton.transitions:
            if trans.source == pre and trans.label == label:
                out |= closure[trans.target]
    return frozenset(out)


def splitter(
    state: str,
    label: Label,
    candidate: frozenset[str],
    automaton: Automaton,
    closure: SilentClosure | None = None,
    strict_internal: bool = False,
) -> bool:
    """True iff ``state`` can weakly reach the candidate class via ``label``."""
    return bool(weak_targets(state, label, automaton, closure, strict_internal) & candidate)


def refine_step(
    partition: Partition,
    label: Label,
    candidate: frozenset[str],
    automaton: Automaton,
    closure: SilentClosure | None = None,
    strict_internal: bool = False,
) -> Partition:
    """Split every block by the splitter's verdict against one candidate class."""
    if closure is None:
        closure = silent_closure(automaton)
    out: list[frozenset[str]] = []
    for block in partition.blocks:
        hits = frozenset(
            state
            for state in block
            if splitter(state, label, candidate, automaton, closure, strict_internal)
        )
        misses = block - hits
        for part in (hits, misses):
            if part:
                out.append(part)
    return Partition.from_blocks(out)


# ---------------------------------------------------------------------------
# Bitset refinement engine.  States are mapped to indices in canonical order;
# state sets become machine integers, so splitter checks are single ANDs.


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Engine:
    def __init__(self, automaton: Automaton, strict_internal: bool):
        self.states = sorted(automaton.states)
        self.index = {state: i for i, state in enumerate(self.states)}
        n = len(self.states)
        self.n = n
        self.strict = strict_internal

        internal_succ = [0] * n
        by_label: dict[Label, list[tuple[int, int]]] = {}
        for trans in automaton.transitions:
            src, dst = self.index[trans.source], self.index[trans.target]
            if trans.label.kind is LabelKind.INTERNAL:
                internal_succ[src] |= 1 << dst
            by_label.setdefault(trans.label, []).append((src, dst))

        # silent closure: reflexive, then propagate until stable
        closure = [(1 << i) | internal_succ[i] for i in range(n)]
        changed = True
        while changed:
            changed = False
            for i in range(n):
                row = closure[i]
                acc = row
                for j in _bits(row):
                    acc |= closure[j]
                if acc != row:
                    closure[i] = acc
                    changed = True
        self.closure = closure

        closure_t = [0] * n
        for i in range(n):
            for j in _bits(closure[i]):
                closure_t[j] |= 1 << i
        self.closure_t = closure_t

        self.by_label = by_label
        visible = sorted(
            (l for l in by_label if l.kind is not LabelKind.INTERNAL), key=Label.sort_key
        )
        if strict_internal:
            internal = sorted(
                (l for l in by_label if l.kind is LabelKind.INTERNAL), key=Label.sort_key
            )
            self.labels: list[Label | None] = sorted(visible + internal, key=Label.sort_key)
        else:
            # all internal labels share the closure splitter; one silent
            # pseudo-label (None) covers them collectively
            self.labels = [None] + list(visible)
        self._rows: dict[Label | None, list[int]] = {}

    def rows(self, label: Label | None) -> list[int]:
        cached = self._rows.get(label)
        if cached is not None:
            return cached
        if label is None:
            rows = self.closure
        else:
            rows = [0] * self.n
            for src, dst in self.by_label[label]:
                reach = self.closure[dst]
                for q in _bits(self.closure_t[src]):
                    rows[q] |= reach
        self._rows[label] = rows
        return rows


def partition_refine(
    automaton: Automaton,
    timeout: float | None = None,
    strict_internal: bool = False,
    stats: RefineStats | None = None,
) -> Partition:
    """Coarsest partition of the state set stable under all weak splitters.

    ``timeout`` (seconds) is checked once per refine step; on expiry the
    partial partition is discarded and RefinementTimeout raised.
    """
    started = time.monotonic()
    if stats is None:
        stats = RefineStats()
    engine = _Engine(automaton, strict_internal)
    n = engine.n

    def mask_key(mask: int) -> tuple[int, tuple[int, ...]]:
        return (mask.bit_count(), tuple(_bits(mask)))

    full = (1 << n) - 1
    multis: list[int] = []
    singles: list[int] = []
    if n == 1:
        singles.append(full)
    elif n > 1:
        multis.append(full)

    or_cache: dict[tuple[int, int], int] = {}

    def block_reach(block: int, label_idx: int, rows: list[int]) -> int:
        key = (block, label_idx)
        acc = or_cache.get(key)
        if acc is None:
            acc = 0
            for i in _bits(block):
                acc |= rows[i]
            or_cache[key] = acc
        return acc

    repeat = True
    while repeat and multis:
        repeat = False
        stats.sweeps += 1
        for label_idx, label in enumerate(engine.labels):
            rows = engine.rows(label)
            worklist = sorted(multis + singles, key=mask_key)
            while worklist:
                if timeout is not None:
                    elapsed = time.monotonic() - started
                    if elapsed > timeout:
                        stats.elapsed_s = elapsed
                        raise RefinementTimeout(elapsed, timeout)
                candidate = worklist.pop(0)
                stats.refine_steps += 1
                new_multis: list[int] = []
                new_singles: list[int] = []
                changed = False
                for block in multis:
                    if block_reach(block, label_idx, rows) & candidate == 0:
                        new_multis.append(block)
                        continue
                    hits = 0
                    for i in _bits(block):
                        stats.splitter_evals += 1
                        if rows[i] & candidate:
                            hits |= 1 << i
                    misses = block & ~hits
                    if hits and misses:
                        changed = True
                        for part in (hits, misses):
                            (new_singles if part.bit_count() == 1 else new_multis).append(part)
                    else:
                        new_multis.append(block)
                if changed:
                    multis = new_multis
                    singles.extend(new_singles)
                    worklist = sorted(multis + singles, key=mask_key)
                    repeat = True
                if not multis:
                    break
            if not multis:
                break

    stats.elapsed_s = time.monotonic() - started
    blocks = [frozenset(engine.states[i] for i in _bits(mask)) for mask in multis + singles]
    return Partition.from_blocks(blocks)


def quotient(automaton: Automaton, partition: Partition) -> Automaton:
    """Collapse each block to one state, dropping silent self-loops.

    Block states are renamed ``r0, r1, ...`` in canonical block order; an
    internal transition survives exactly when it crosses two distinct blocks.
    The hierarchy is preserved, so the quotient stays comparable with the
    original.
    """
    blocks = partition.blocks
    name_of: dict[frozenset[str], str] = {block: f"r{i}" for i, block in enumerate(blocks)}
    owner = {state: name_of[block] for block in blocks for state in block}
    transitions: set[Transition] = set()
    for trans in automaton.transitions:
        src, dst = owner[trans.source], owner[trans.target]
        if src == dst and trans.label.kind is LabelKind.INTERNAL:
            continue
        transitions.add(Transition(src, trans.label, dst))
    return Automaton(
        name=automaton.name,
        states=frozenset(name_of.values()),
        actions=automaton.actions,
        transitions=frozenset(transitions),
        initial=frozenset(owner[state] for state in automaton.initial),
        hierarchy=automaton.hierarchy,
    )


# ---------------------------------------------------------------------------
# Brute-force oracle.  Independent of the engine above on purpose: it builds
# its own closure and weak moves by naive set fixpoints, and computes the
# greatest symmetric relation satisfying the weak transfer condition by
# deleting violating pairs until stable.


def _oracle_closure(states, internal_edges):
    closure = {q: {q} for q in states}
    for src, dst in internal_edges:
        closure[src].add(dst)
    changed = True
    while changed:
        changed = False
        for q in states:
            grown = set()
            for mid in closure[q]:
                grown |= closure[mid]
            if grown - closure[q]:
                closure[q] |= grown
                changed = True
    return closure


def _oracle_relation(states, transitions, strict_internal):
    internal_edges = [(s, t) for (s, l, t) in transitions if l.kind is LabelKind.INTERNAL]
    closure = _oracle_closure(states, internal_edges)
    outgoing: dict[object, list[tuple[Label, object]]] = {q: [] for q in states}
    for src, label, dst in transitions:
        outgoing[src].append((label, dst))

    def weak_moves(state, label):
        if label.kind is LabelKind.INTERNAL and not strict_internal:
            return closure[state]
        found = set()
        for pre in closure[state]:
            for lab, dst in outgoing[pre]:
                if lab == label:
                    found |= closure[dst]
        return found

    relation = {(q, p) for q in states for p in states}

    def transfers(q, p):
        for label, q_next in outgoing[q]:
            if not any((q_next, p_next) in relation for p_next in weak_moves(p, label)):
                return False
        return True

    changed = True
    while changed:
        changed = False
        for pair in list(relation):
            q, p = pair
            if not (transfers(q, p) and transfers(p, q)):
                relation.discard(pair)
                relation.discard((p, q))
                changed = True
    return relation


def weak_bisim_relation(
    automaton: Automaton, max_states: int = 40, strict_internal: bool = False
) -> frozenset[tuple[str, str]]:
    """Greatest weak bisimulation on one automaton's state set (test oracle)."""
    if len(automaton.states) > max_states:
        raise OracleLimitError(
            f"oracle limited to {max_states} states, got {len(automaton.states)}"
        )
    triples = [(t.source, t.label, t.target) for t in automaton.transitions]
    relation = _oracle_relation(sorted(automaton.states), triples, strict_internal)
    return frozenset(relation)


def weak_bisim_oracle(
    a: Automaton,
    b: Automaton,
    max_states: int = 40,
    strict_internal: bool = False,
) -> bool:
    """Decide weak bisimilarity of two automata by greatest-fixpoint search.

    Requires equal hierarchy leaf-name sets (labels must range over the same
    component instances to be comparable) and a combined state count within
    ``max_states``.
    """
    if a.hierarchy.leaf_names() != b.hierarchy.leaf_names():
        raise ValidationError("automata have different hierarchy leaf sets")
    if len(a.states) + len(b.states) > max_states:
        raise OracleLimitError(
            f"oracle limited to {max_states} combined states, "
            f"got {len(a.states) + len(b.states)}"
        )
    states = [(0, q) for q in sorted(a.states)] + [(1, q) for q in sorted(b.states)]
    triples = [((0, t.source), t.label, (0, t.target)) for t in a.transitions]
    triples += [((1, t.source), t.label, (1, t.target)) for t in b.transitions]
    relation = _oracle_relation(states, triples, strict_internal)
    return any(
        ((0, qa), (1, qb)) in relation for qa in a.initial for qb in b.initial
    )
