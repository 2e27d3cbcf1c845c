"""Line-oriented text format for automaton documents.

A document holds one or more blocks::

    automaton <name>
    hierarchy <hier-expr>          # (tok+) for a leaf, ((hier)(hier)...) for a node
    states <id>+
    initial <id>+
    actions <tok>+                 # optional extra actions beyond those used
    trans <id> (<src>,<action>,<dst>) <id>
    ...
    end

``#`` starts a comment; tokens are whitespace-separated except inside the
hierarchy expression.  The action set is inferred from the transitions plus
the optional ``actions`` line.  Serialization is canonical (sorted states,
initial, actions and transitions), so parse/serialize round-trips are stable.
"""

from __future__ import annotations

import re

from .core import Automaton, Hierarchy, Label, Transition
from .errors import FormatError, ValidationError

__all__ = [
    "parse_automaton",
    "parse_automata",
    "parse_hierarchy",
    "serialize_automaton",
    "serialize_automata",
]

_LABEL_RE = re.compile(r"\(([A-Za-z0-9_]+|-),([A-Za-z0-9_]+),([A-Za-z0-9_]+|-)\)\Z")
_HIER_TOKEN_RE = re.compile(r"\(|\)|[A-Za-z0-9_]+")


def parse_hierarchy(expr: str) -> Hierarchy:
    """Parse a hierarchy expression like ``(A B)`` or ``((A)(B C))``."""
    tokens = _HIER_TOKEN_RE.findall(expr)
    if "".join(tokens).replace(" ", "") != re.sub(r"\s+", "", expr):
        raise FormatError(f"invalid characters in hierarchy expression {expr!r}")
    pos = 0

    def parse_node() -> Hierarchy:
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != "(":
            raise FormatError(f"expected '(' in hierarchy expression {expr!r}")
        pos += 1
        names: list[str] = []
        children: list[Hierarchy] = []
        while pos < len(tokens) and tokens[pos] != ")":
            if tokens[pos] == "(":
                children.append(parse_node())
            else:
                names.append(tokens[pos])
                pos += 1
        if pos >= len(tokens):
            raise FormatError(f"unbalanced parentheses in hierarchy expression {expr!r}")
        pos += 1  # consume ')'
        if names and children:
            raise FormatError(f"hierarchy mixes names and subtrees: {expr!r}")
        if not names and not children:
            raise FormatError(f"empty hierarchy group in {expr!r}")
        if names:
            return Hierarchy.leaf(*names)
        return Hierarchy.node(*children)

    tree = parse_node()
    if pos != len(tokens):
        raise FormatError(f"trailing tokens after hierarchy expression {expr!r}")
    return tree


class _Block:
    def __init__(self, name: str, line: int):
        self.name = name
        self.line = line
        self.hierarchy: Hierarchy | None = None
        self.states: list[str] = []
        self.state_set: set[str] = set()
        self.initial: list[str] = []
        self.actions: list[str] = []
        self.transitions: list[Transition] = []


def _parse_label(token: str, line: int, column: int) -> Label:
    match = _LABEL_RE.match(token)
    if not match:
        raise FormatError(f"malformed label {token!r}", line, column)
    src, action, dst = match.groups()
    try:
        return Label(None if src == "-" else src, action, None if dst == "-" else dst)
    except ValidationError as exc:
        raise FormatError(str(exc), line, column) from exc


def parse_automata(text: str) -> list[Automaton]:
    """Parse every automaton block in a document, validating as it goes."""
    automata: list[Automaton] = []
    block: _Block | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = body.split()
        if not tokens:
            continue
        keyword, args = tokens[0], tokens[1:]
        if keyword == "automaton":
            if block is not None:
                raise FormatError(f"automaton {block.name!r} not closed with 'end'", lineno)
            if len(args) != 1:
                raise FormatError("expected: automaton <name>", lineno)
            block = _Block(args[0], lineno)
            continue
        if block is None:
            raise FormatError(f"expected 'automaton', got {keyword!r}", lineno)
        if keyword == "hierarchy":
            rest = body.split(None, 1)
            if len(rest) < 2:
                raise FormatError("expected: hierarchy <expr>", lineno)
            try:
                block.hierarchy = parse_hierarchy(rest[1].strip())
            except (FormatError, ValidationError) as exc:
                raise FormatError(str(exc), lineno) from exc
        elif keyword == "states":
            for state in args:
                if state in block.state_set:
                    raise FormatError(f"duplicate state id {state!r}", lineno)
                block.state_set.add(state)
                block.states.append(state)
        elif keyword == "initial":
            block.initial.extend(args)
        elif keyword == "actions":
            block.actions.extend(args)
        elif keyword == "trans":
            if len(args) != 3:
                raise FormatError("expected: trans <id> (<src>,<action>,<dst>) <id>", lineno)
            source, label_token, target = args
            column = body.find(label_token) + 1
            label = _parse_label(label_token, lineno, column)
            for endpoint in (source, target):
                if endpoint not in block.state_set:
                    raise FormatError(f"undeclared state {endpoint!r} in transition", lineno)
            if block.hierarchy is None:
                raise FormatError("hierarchy must be declared before transitions", lineno)
            components = block.hierarchy.leaf_names()
            for annotation in (label.src, label.dst):
                if annotation is not None and annotation not in components:
                    raise FormatError(
                        f"unknown component name {annotation!r} in label {label}", lineno, column
                    )
            block.transitions.append(Transition(source, label, target))
        elif keyword == "end":
            if block.hierarchy is None:
                raise FormatError(f"automaton {block.name!r} has no hierarchy", lineno)
            try:
                automata.append(
                    Automaton.make(
                        name=block.name,
                        states=block.states,
                        transitions=block.transitions,
                        initial=block.initial,
                        hierarchy=block.hierarchy,
                        actions=block.actions,
                    )
                )
            except ValidationError as exc:
                raise FormatError(str(exc), lineno) from exc
            block = None
        else:
            raise FormatError(f"unknown keyword {keyword!r}", lineno)
    if block is not None:
        raise FormatError(f"automaton {block.name!r} not closed with 'end'", block.line)
    return automata


def parse_automaton(text: str) -> Automaton:
    """Parse a document expected to hold exactly one automaton."""
    automata = parse_automata(text)
    if len(automata) != 1:
        raise FormatError(f"expected exactly one automaton, found {len(automata)}")
    return automata[0]


def serialize_automaton(automaton: Automaton) -> str:
    """Render an automaton in canonical form (ending with a newline)."""
    lines = [
        f"automaton {automaton.name}",
        f"hierarchy {automaton.hierarchy.render()}",
        "states " + " ".join(automaton.sorted_states()),
        "initial " + " ".join(sorted(automaton.initial)),
    ]
    used = {t.label.action for t in automaton.transitions}
    if automaton.actions != used:
        lines.append("actions " + " ".join(sorted(automaton.actions)))
    for trans in automaton.sorted_transitions():
        lines.append(f"trans {trans.source} {trans.label.render()} {trans.target}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def serialize_automata(automata: list[Automaton]) -> str:
    return "".join(serialize_automaton(a) for a in automata)
