"""Seeded generator of primitive automata with software-like topology.

The construction lays a spanning arborescence from a single initial state
(so every state is reachable and the edge count can go as low as |Q|-1),
then adds edges until ``round(|Q| ** target_beta)`` transitions exist.
Endpoints of extra edges are drawn with probability proportional to
``(degree + 1) ** pa_strength`` -- preferential attachment; with strength 0
the choice is uniform.  With probability ``clique_bias`` an extra edge turns
into a short internal-synchronization chain (length 2-5) between existing
states, seeding the silent cliques that refinement later collapses.

Randomness comes from splitmix64, a fixed, widely documented 64-bit mixer,
so a seed reproduces the exact same corpus on any platform or version.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from .core import Automaton, Hierarchy, Label, LabelKind, Transition
from .errors import ValidationError
from .fmt import serialize_automaton

__all__ = ["SplitMix64", "GenParams", "generate_primitive", "generate_corpus", "write_corpus"]

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64: increment by the golden gamma, then mix; 64-bit state."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], inclusive, via unbiased rejection."""
        span = hi - lo + 1
        if span <= 0:
            raise ValueError(f"empty range [{lo}, {hi}]")
        limit = (_MASK64 + 1) - (_MASK64 + 1) % span
        while True:
            r = self.next_u64()
            if r < limit:
                return lo + r % span

    def pick(self, seq: Sequence):
        return seq[self.randint(0, len(seq) - 1)]

    def pick_weighted(self, weights: Sequence[float]) -> int:
        total = sum(weights)
        u = self.random() * total
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if u < acc:
                return i
        return len(weights) - 1


@dataclass(frozen=True)
class GenParams:
    """Knobs of the generator; defaults target the observed corpus profile
    (mean scaling exponent near 1.36, skewed out-degree concentration)."""

    state_count_range: tuple[int, int] = (4, 24)
    target_beta: float = 1.36
    alphabet_size: int = 4
    kind_mix: tuple[float, float, float] = (0.4, 0.4, 0.2)
    clique_bias: float = 0.3
    pa_strength: float = 1.0
    seed: int = 0
    # Route extra edges out of terminal states first.  Terminal states are
    # all weakly bisimilar, so leaving them in guarantees a (trivially)
    # reducible automaton; removing them lets the silent-clique structure,
    # not leaf count, decide whether reduction succeeds.
    avoid_deadlocks: bool = False

    def __post_init__(self) -> None:
        lo, hi = self.state_count_range
        if lo < 2 or hi < lo:
            raise ValidationError(f"bad state count range {self.state_count_range!r}")
        if not 0.63 <= self.target_beta <= 2.0:
            raise ValidationError("target_beta must lie in [0.63, 2]")
        if self.alphabet_size < 1:
            raise ValidationError("alphabet_size must be >= 1")
        if any(p < 0 for p in self.kind_mix) or not math.isclose(sum(self.kind_mix), 1.0):
            raise ValidationError("kind_mix proportions must be non-negative and sum to 1")
        if not 0.0 <= self.clique_bias <= 1.0:
            raise ValidationError("clique_bias must lie in [0, 1]")
        if self.pa_strength < 0:
            raise ValidationError("pa_strength must be >= 0")


def _alphabet(params: GenParams, prefix: str = "a") -> list[str]:
    return [f"{prefix}{i}" for i in range(params.alphabet_size)]


def _draw_kind(rng: SplitMix64, mix: tuple[float, float, float]) -> LabelKind:
    kinds = (LabelKind.INPUT, LabelKind.OUTPUT, LabelKind.INTERNAL)
    return kinds[rng.pick_weighted(mix)]


def _label(kind: LabelKind, action: str, component: str) -> Label:
    if kind is LabelKind.INPUT:
        return Label(None, action, component)
    if kind is LabelKind.OUTPUT:
        return Label(component, action, None)
    return Label(component, action, component)


def generate_primitive(
    params: GenParams,
    name: str | None = None,
    alphabet: Sequence[str] | None = None,
) -> Automaton:
    """One primitive automaton: single component, single initial state,
    every state reachable, exactly ``round(n ** target_beta)`` transitions
    (clamped to [n-1, n^2])."""
    rng = SplitMix64(params.seed)
    n = rng.randint(*params.state_count_range)
    m = min(max(round(n**params.target_beta), n - 1), n * n)
    # per-automaton hub propensity: multiplicative amplification of the
    # attachment exponent (mean 1) puts a fat right tail on the out-degree
    # concentration across a corpus while strength 0 stays exactly uniform
    pa_exponent = params.pa_strength * -math.log(1.0 - rng.random())
    component = name or f"C{params.seed % 100000}"
    actions = list(alphabet) if alphabet is not None else _alphabet(params)
    if not actions:
        raise ValidationError("alphabet must not be empty")
    states = [f"s{i}" for i in range(n)]
    transitions: set[Transition] = set()
    in_deg = [0] * n
    out_deg = [0] * n

    def add(src: int, label: Label, dst: int) -> bool:
        trans = Transition(states[src], label, states[dst])
        if trans in transitions:
            return False
        transitions.add(trans)
        out_deg[src] += 1
        in_deg[dst] += 1
        return True

    def weighted(indices: range | list[int], degs: list[int]) -> int:
        weights = [(degs[i] + 1.0) ** pa_exponent for i in indices]
        return list(indices)[rng.pick_weighted(weights)]

    # spanning arborescence rooted at s0 guarantees reachability
    for child in range(1, n):
        parent = weighted(
            range(child), [in_deg[i] + out_deg[i] for i in range(child)]
        )
        kind = _draw_kind(rng, params.kind_mix)
        add(parent, _label(kind, rng.pick(actions), component), child)

    misses = 0
    while len(transitions) < m:
        remaining = m - len(transitions)
        if remaining >= 2 and rng.random() < params.clique_bias:
            # internal chain through existing states
            length = rng.randint(2, min(5, remaining))
            nodes = [rng.randint(0, n - 1) for _ in range(length + 1)]
            for a, b in zip(nodes, nodes[1:]):
                add(a, _label(LabelKind.INTERNAL, rng.pick(actions), component), b)
            continue
        childless = [i for i in range(n) if out_deg[i] == 0] if params.avoid_deadlocks else []
        if childless:
            src = rng.pick(childless)
        else:
            src = weighted(range(n), out_deg)
        dst = weighted(range(n), in_deg)
        kind = _draw_kind(rng, params.kind_mix)
        if add(src, _label(kind, rng.pick(actions), component), dst):
            misses = 0
        else:
            misses += 1
            if misses >= 200:
                # near-saturated graph: enumerate the leftover label space
                index = {state: i for i, state in enumerate(states)}
                candidates = sorted(
                    (
                        Transition(states[i], _label(k, act, component), states[j])
                        for i in range(n)
                        for j in range(n)
                        for k in LabelKind
                        for act in actions
                    ),
                    key=Transition.sort_key,
                )
                candidates = [c for c in candidates if c not in transitions]
                while len(transitions) < m and candidates:
                    chosen = candidates.pop(rng.randint(0, len(candidates) - 1))
                    add(index[chosen.source], chosen.label, index[chosen.target])
                break

    return Automaton.make(
        name=component,
        states=states,
        transitions=transitions,
        initial=[states[0]],
        hierarchy=Hierarchy.leaf(component),
    )


def generate_corpus(
    params: GenParams,
    n_pairs: int,
    disjoint_alphabets: bool = False,
) -> list[tuple[Automaton, Automaton]]:
    """Seeded pairs sharing one alphabet, so output/input handshakes arise.

    With ``disjoint_alphabets`` the two sides draw from unrelated token
    pools, making synchronization in a composition impossible.
    """
    if n_pairs < 1:
        raise ValidationError("n_pairs must be >= 1")
    master = SplitMix64(params.seed)
    pairs: list[tuple[Automaton, Automaton]] = []
    for i in range(n_pairs):
        seed_a = master.next_u64()
        seed_b = master.next_u64()
        alpha_a = _alphabet(params, "a")
        alpha_b = _alphabet(params, "b") if disjoint_alphabets else alpha_a
        first = generate_primitive(replace(params, seed=seed_a), name=f"C{2 * i}", alphabet=alpha_a)
        second = generate_primitive(
            replace(params, seed=seed_b), name=f"C{2 * i + 1}", alphabet=alpha_b
        )
        pairs.append((first, second))
    return pairs


def write_corpus(pairs: Sequence[tuple[Automaton, Automaton]], out_dir: str | Path) -> list[Path]:
    """Write one .cia file per pair (two blocks each), numbered in order."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for i, (first, second) in enumerate(pairs):
        path = out / f"pair{i:05d}.cia"
        path.write_text(serialize_automaton(first) + serialize_automaton(second), encoding="utf-8")
        written.append(path)
    return written
