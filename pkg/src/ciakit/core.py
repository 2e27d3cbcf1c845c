"""Core model for Component Interaction Automata.

An automaton is a quintuple: a finite set of states, a finite set of actions,
a set of transitions carrying *structured labels*, a non-empty set of initial
states, and a *hierarchy* of component-instance names.  A structured label is
a triple ``(src, action, dst)`` whose annotations name the emitting and the
receiving component instance; an absent annotation (``None``, rendered ``-``)
marks the label as an open input or output.  A label may not have both
annotations absent.

All values here are immutable after construction and validated eagerly, so
they can be shared freely across threads.  Canonical orderings (states
lexicographic, labels by ``(src, action, dst)`` with absent sorting first)
remove every trace of set-iteration nondeterminism from serialized output.
"""

from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import ValidationError

__all__ = [
    "LabelKind",
    "Label",
    "Transition",
    "Hierarchy",
    "Automaton",
    "label_kind",
    "reachable",
]

# Component instances and actions are bare word tokens; this keeps labels
# unambiguous inside the `(src,action,dst)` syntax.
_WORD_RE = re.compile(r"[A-Za-z0-9_]+\Z")
# State ids are opaque: any non-whitespace token works, which admits the
# tuple tokens `(q1,q2)` produced by composition.  `#` starts a comment.
_STATE_RE = re.compile(r"[^\s#]+\Z")


def _check_word(token: str, what: str) -> str:
    if not isinstance(token, str) or not _WORD_RE.match(token):
        raise ValidationError(f"invalid {what} {token!r}: expected letters/digits/underscore")
    return token


def _check_state_id(token: str) -> str:
    if not isinstance(token, str) or not _STATE_RE.match(token):
        raise ValidationError(f"invalid state id {token!r}")
    return token


class LabelKind(enum.Enum):
    INPUT = "input"
    OUTPUT = "output"
    INTERNAL = "internal"


@dataclass(frozen=True)
class Label:
    """Structured label ``(src, action, dst)``; ``None`` is the absent mark."""

    src: str | None
    action: str
    dst: str | None

    def __post_init__(self) -> None:
        if self.src is None and self.dst is None:
            raise ValidationError(f"label with two absent annotations: (-,{self.action},-)")
        if self.src is not None:
            _check_word(self.src, "component name")
        if self.dst is not None:
            _check_word(self.dst, "component name")
        _check_word(self.action, "action")

    @property
    def kind(self) -> LabelKind:
        if self.src is None:
            return LabelKind.INPUT
        if self.dst is None:
            return LabelKind.OUTPUT
        return LabelKind.INTERNAL

    def sort_key(self) -> tuple[str, str, str]:
        # absent annotations sort before any component name
        return (self.src or "", self.action, self.dst or "")

    def render(self) -> str:
        return f"({self.src or '-'},{self.action},{self.dst or '-'})"

    def __str__(self) -> str:
        return self.render()


def label_kind(label: Label) -> LabelKind:
    """Classify a label as INPUT (absent source), OUTPUT (absent target) or INTERNAL."""
    return label.kind


class Transition(NamedTuple):
    source: str
    label: Label
    target: str

    def sort_key(self) -> tuple:
        return (self.source, self.label.sort_key(), self.target)


@dataclass(frozen=True)
class Hierarchy:
    """Composition tree: a leaf lists component-instance names, a node nests subtrees.

    Sibling subtrees must have pairwise disjoint leaf-name sets, so every
    component instance occurs exactly once in the whole tree.
    """

    names: tuple[str, ...] = ()
    children: tuple["Hierarchy", ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "children", tuple(self.children))
        if bool(self.names) == bool(self.children):
            raise ValidationError("hierarchy must hold either names or subtrees (and at least one)")
        if self.names:
            seen: set[str] = set()
            for name in self.names:
                _check_word(name, "component name")
                if name in seen:
                    raise ValidationError(f"duplicate component name {name!r} in hierarchy leaf")
                seen.add(name)
        else:
            taken: set[str] = set()
            for child in self.children:
                if not isinstance(child, Hierarchy):
                    raise ValidationError("hierarchy children must be hierarchies")
                clash = taken & child.leaf_names()
                if clash:
                    raise ValidationError(
                        f"hierarchy leaf sets not disjoint: {sorted(clash)!r} occurs in two subtrees"
                    )
                taken |= child.leaf_names()

    @classmethod
    def leaf(cls, *names: str) -> "Hierarchy":
        return cls(names=tuple(names))

    @classmethod
    def node(cls, *children: "Hierarchy") -> "Hierarchy":
        return cls(children=tuple(children))

    @property
    def is_leaf(self) -> bool:
        return bool(self.names)

    def leaf_names(self) -> frozenset[str]:
        if self.names:
            return frozenset(self.names)
        out: set[str] = set()
        for child in self.children:
            out |= child.leaf_names()
        return frozenset(out)

    def render(self) -> str:
        if self.is_leaf:
            return "(" + " ".join(self.names) + ")"
        return "(" + "".join(child.render() for child in self.children) + ")"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Automaton:
    """A validated component interaction automaton.

    ``actions`` may strictly contain the actions used by ``transitions``;
    every label annotation must name a component instance from the hierarchy.
    """

    name: str
    states: frozenset[str]
    actions: frozenset[str]
    transitions: frozenset[Transition]
    initial: frozenset[str]
    hierarchy: Hierarchy

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "actions", frozenset(self.actions))
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(
            self,
            "transitions",
            frozenset(t if isinstance(t, Transition) else Transition(*t) for t in self.transitions),
        )
        self._validate()

    def _validate(self) -> None:
        _check_state_id(self.name)
        if not isinstance(self.hierarchy, Hierarchy):
            raise ValidationError("automaton requires a hierarchy")
        for state in self.states:
            _check_state_id(state)
        if not self.initial:
            raise ValidationError("initial set is empty")
        for state in self.initial:
            if state not in self.states:
                raise ValidationError(f"initial state {state!r} not among states")
        for action in self.actions:
            _check_word(action, "action")
        components = self.hierarchy.leaf_names()
        for trans in self.transitions:
            if trans.source not in self.states:
                raise ValidationError(f"transition source {trans.source!r} not among states")
            if trans.target not in self.states:
                raise ValidationError(f"transition target {trans.target!r} not among states")
            if not isinstance(trans.label, Label):
                raise ValidationError("transition label must be a Label")
            if trans.label.action not in self.actions:
                raise ValidationError(f"action {trans.label.action!r} not declared")
            for annotation in (trans.label.src, trans.label.dst):
                if annotation is not None and annotation not in components:
                    raise ValidationError(
                        f"unknown component name {annotation!r} in label {trans.label}"
                    )

    @classmethod
    def make(
        cls,
        name: str,
        states: Iterable[str],
        transitions: Iterable[Transition | tuple],
        initial: Iterable[str],
        hierarchy: Hierarchy,
        actions: Iterable[str] = (),
    ) -> "Automaton":
        """Build an automaton, inferring ``actions`` from the transitions."""
        trans = frozenset(t if isinstance(t, Transition) else Transition(*t) for t in transitions)
        used = {t.label.action for t in trans}
        return cls(
            name=name,
            states=frozenset(states),
            actions=frozenset(actions) | used,
            transitions=trans,
            initial=frozenset(initial),
            hierarchy=hierarchy,
        )

    def sorted_states(self) -> list[str]:
        return sorted(self.states)

    def sorted_transitions(self) -> list[Transition]:
        return sorted(self.transitions, key=Transition.sort_key)


def reachable(automaton: Automaton) -> Automaton:
    """Restrict an automaton to the states reachable from its initial states.

    Initial states are always kept; the action set and hierarchy are
    unchanged.  Idempotent: applying it twice equals applying it once.
    """
    adjacency: dict[str, list[str]] = {}
    for trans in automaton.transitions:
        adjacency.setdefault(trans.source, []).append(trans.target)
    seen = set(automaton.initial)
    queue = deque(seen)
    while queue:
        state = queue.popleft()
        for nxt in adjacency.get(state, ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    if seen == automaton.states:
        return automaton
    kept = frozenset(t for t in automaton.transitions if t.source in seen and t.target in seen)
    return Automaton(
        name=automaton.name,
        states=frozenset(seen),
        actions=automaton.actions,
        transitions=kept,
        initial=automaton.initial,
        hierarchy=automaton.hierarchy,
    )
