import sys
from pathlib import Path

from ciakit import Automaton, GenParams, Hierarchy, Label, compose, default_io_sets
from ciakit import generate_corpus, generate_primitive, reachable
from ciakit.generate import SplitMix64

sys.path.insert(0, str(Path(__file__).parent))


def aut(name="A", hier=("A",), states=(), trans=(), init=(), actions=()):
    """Terse automaton builder: trans items are (state, (src, action, dst), state)."""
    hierarchy = hier if isinstance(hier, Hierarchy) else Hierarchy.leaf(*hier)
    transitions = [
        (src, Label(lab[0], lab[1], lab[2]), dst) if isinstance(lab, tuple) else (src, lab, dst)
        for (src, lab, dst) in trans
    ]
    return Automaton.make(
        name=name,
        states=states,
        transitions=transitions,
        initial=init or [sorted(states)[0]],
        hierarchy=hierarchy,
        actions=actions,
    )


def handshake_pair():
    """One input component and one matching output component."""
    a = aut("A", ("A",), ["a0", "a1"], [("a0", (None, "m", "A"), "a1")], ["a0"])
    b = aut("B", ("B",), ["b0", "b1"], [("b0", ("B", "m", None), "b1")], ["b0"])
    return a, b


def random_automaton(seed: int, max_states: int = 12) -> Automaton:
    """Seeded random automaton with varied topology; sometimes a composite."""
    rng = SplitMix64(seed)
    params = GenParams(
        state_count_range=(2, max_states),
        target_beta=0.8 + 1.1 * rng.random(),
        alphabet_size=rng.randint(2, 4),
        kind_mix=(0.35, 0.35, 0.3) if rng.random() < 0.5 else (0.45, 0.45, 0.1),
        clique_bias=rng.random() * 0.9,
        pa_strength=rng.random() * 1.5,
        avoid_deadlocks=rng.random() < 0.5,
        seed=rng.next_u64(),
    )
    if rng.random() < 0.4 and max_states >= 4:
        pair_params = GenParams(
            state_count_range=(2, max(2, max_states // 3)),
            target_beta=params.target_beta,
            alphabet_size=params.alphabet_size,
            clique_bias=params.clique_bias,
            seed=rng.next_u64(),
        )
        first, second = generate_corpus(pair_params, 1)[0]
        composite = reachable(compose([first, second], default_io_sets([first, second])))
        if len(composite.states) <= max_states:
            return composite
    return generate_primitive(params)
