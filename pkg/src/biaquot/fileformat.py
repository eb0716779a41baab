"""Line-oriented text format for structure files.

A file has four sections introduced by bracketed headers. Integers only,
never floats, so files diff and round-trip exactly::

    [alphabet]
    a A b B

    [model]
    kind free_abelian(2)
    gen a [1 0]
    gen A [-1 0]
    gen b [0 1]
    gen B [0 -1]

    [acceptor]
    start S
    accept S Sa SA Sb SB
    S a Sa
    S b Sb
    ...

    [constants]
    k 2
    z [1 1]

Model kinds are free_abelian(rank) or free_abelian(rank, m1, m2, ...) with
torsion orders, free(rank), and product(kind, kind). Elements are written
against their kind: flat integer vectors in brackets for abelian groups,
signed generator indices in brackets for free groups, and parenthesized
pairs for products. Transitions missing from the table fall into an added
non-accepting sink. Lines starting with '#' are comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import fsa, groups
from .errors import InputError
from .fsa import Alphabet
from .groups import DirectProduct, Element, Free, FreeAbelian, GroupKind, GroupModel
from .structures import BiautomaticStructure, validate_structure


# --- tiny expression tokenizer ---------------------------------------------

_TOKEN = re.compile(r"\s*(-?\d+|[A-Za-z_][A-Za-z_0-9]*|[\[\](),])")


def _tokenize(text: str, where: str) -> list[str]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise InputError(f"{where}: cannot read {text[pos:]!r}")
            break
        out.append(m.group(1))
        pos = m.end()
    return out


class _Tokens:
    def __init__(self, tokens: list[str], where: str):
        self.tokens = tokens
        self.pos = 0
        self.where = where

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise InputError(f"{self.where}: unexpected end of expression")
        if expected is not None and tok != expected:
            raise InputError(f"{self.where}: expected {expected!r}, found {tok!r}")
        self.pos += 1
        return tok

    def done(self) -> None:
        if self.peek() is not None:
            raise InputError(f"{self.where}: trailing input {self.peek()!r}")


def _int(tok: str, where: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InputError(f"{where}: expected an integer, found {tok!r}") from None


# --- kinds -------------------------------------------------------------------

def parse_kind(text: str, where: str = "model kind") -> GroupKind:
    toks = _Tokens(_tokenize(text, where), where)
    kind = _parse_kind(toks)
    toks.done()
    return kind


def _parse_kind(toks: _Tokens) -> GroupKind:
    name = toks.take()
    toks.take("(")
    if name == "free_abelian":
        args = [_int(toks.take(), toks.where)]
        while toks.peek() == ",":
            toks.take(",")
            args.append(_int(toks.take(), toks.where))
        toks.take(")")
        return FreeAbelian(args[0], tuple(args[1:]))
    if name == "free":
        rank = _int(toks.take(), toks.where)
        toks.take(")")
        return Free(rank)
    if name == "product":
        left = _parse_kind(toks)
        toks.take(",")
        right = _parse_kind(toks)
        toks.take(")")
        return DirectProduct(left, right)
    raise InputError(f"{toks.where}: unknown model kind {name!r}")


def kind_to_text(kind: GroupKind) -> str:
    if isinstance(kind, FreeAbelian):
        args = ", ".join(str(x) for x in (kind.rank,) + kind.torsion)
        return f"free_abelian({args})"
    if isinstance(kind, Free):
        return f"free({kind.rank})"
    return f"product({kind_to_text(kind.left)}, {kind_to_text(kind.right)})"


# --- elements ----------------------------------------------------------------

def parse_element(kind: GroupKind, text: str, where: str = "element") -> Element:
    toks = _Tokens(_tokenize(text, where), where)
    e = _parse_element(kind, toks)
    toks.done()
    kind.validate(e)
    return e


def _parse_element(kind: GroupKind, toks: _Tokens) -> Element:
    if isinstance(kind, (FreeAbelian, Free)):
        toks.take("[")
        out = []
        while toks.peek() != "]":
            out.append(_int(toks.take(), toks.where))
        toks.take("]")
        return tuple(out)
    toks.take("(")
    left = _parse_element(kind.left, toks)
    toks.take(",")
    right = _parse_element(kind.right, toks)
    toks.take(")")
    return (left, right)


def element_to_text(kind: GroupKind, e: Element) -> str:
    if isinstance(kind, (FreeAbelian, Free)):
        return "[" + " ".join(str(x) for x in e) + "]"
    return f"({element_to_text(kind.left, e[0])}, {element_to_text(kind.right, e[1])})"


# --- structure files -----------------------------------------------------------

@dataclass
class LoadedStructure:
    structure: BiautomaticStructure
    z: Element | None
    source: str


def parse_structure_text(text: str, source: str = "<string>") -> LoadedStructure:
    sections: dict[str, list[tuple[int, str]]] = {}
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current in sections:
                raise InputError(f"{source}:{lineno}: duplicate section [{current}]")
            sections[current] = []
            continue
        if current is None:
            raise InputError(f"{source}:{lineno}: content before the first section header")
        sections[current].append((lineno, line))

    for required in ("alphabet", "model", "acceptor", "constants"):
        if required not in sections:
            raise InputError(f"{source}: missing section [{required}]")

    letters: list[str] = []
    for lineno, line in sections["alphabet"]:
        letters.extend(line.split())
    alphabet = Alphabet(tuple(letters))

    kind: GroupKind | None = None
    gen_lines: list[tuple[int, str, str]] = []
    for lineno, line in sections["model"]:
        head, _, rest = line.partition(" ")
        if head == "kind":
            kind = parse_kind(rest, f"{source}:{lineno}")
        elif head == "gen":
            letter, _, expr = rest.strip().partition(" ")
            gen_lines.append((lineno, letter, expr))
        else:
            raise InputError(f"{source}:{lineno}: unknown model directive {head!r}")
    if kind is None:
        raise InputError(f"{source}: [model] must declare a kind")
    gens = []
    seen_letters = set()
    for lineno, letter, expr in gen_lines:
        if letter not in alphabet:
            raise InputError(f"{source}:{lineno}: gen letter {letter!r} is not in the alphabet")
        if letter in seen_letters:
            raise InputError(f"{source}:{lineno}: duplicate gen line for {letter!r}")
        seen_letters.add(letter)
        gens.append((letter, parse_element(kind, expr, f"{source}:{lineno}")))
    missing = [x for x in alphabet if x not in seen_letters]
    if missing:
        raise InputError(f"{source}: letters {missing} have no gen line")
    model = GroupModel(kind, tuple(gens))

    start: str | None = None
    accept: list[str] = []
    rules: dict[tuple[str, str], str] = {}
    state_order: list[str] = []

    def note_state(name: str):
        if name not in state_order:
            state_order.append(name)

    for lineno, line in sections["acceptor"]:
        parts = line.split()
        if parts[0] == "start":
            if len(parts) != 2:
                raise InputError(f"{source}:{lineno}: start takes exactly one state")
            start = parts[1]
            note_state(start)
        elif parts[0] == "accept":
            for name in parts[1:]:
                accept.append(name)
                note_state(name)
        else:
            if len(parts) != 3:
                raise InputError(
                    f"{source}:{lineno}: transitions are 'FROM LETTER TO', got {line!r}"
                )
            src, letter, dst = parts
            if letter not in alphabet:
                raise InputError(f"{source}:{lineno}: unknown letter {letter!r}")
            if (src, letter) in rules:
                raise InputError(f"{source}:{lineno}: duplicate transition for ({src}, {letter})")
            note_state(src)
            note_state(dst)
            rules[(src, letter)] = dst
    if start is None:
        raise InputError(f"{source}: [acceptor] must declare a start state")
    acceptor = fsa.from_rules(alphabet, state_order, start, accept, rules)

    k: int | None = None
    z: Element | None = None
    for lineno, line in sections["constants"]:
        head, _, rest = line.partition(" ")
        if head == "k":
            k = _int(rest.strip(), f"{source}:{lineno}")
        elif head == "z":
            z = parse_element(kind, rest, f"{source}:{lineno}")
        else:
            raise InputError(f"{source}:{lineno}: unknown constant {head!r}")
    if k is None:
        raise InputError(f"{source}: [constants] must declare k")
    if k < 0:
        raise InputError(f"{source}: k must be non-negative")

    bs = BiautomaticStructure(acceptor, model, k)
    try:
        validate_structure(bs)
    except InputError as err:
        raise InputError(f"{source}: {err}") from None
    return LoadedStructure(bs, z, source)


def load_structure(path: str) -> LoadedStructure:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise InputError(f"cannot read {path}: {err}") from None
    return parse_structure_text(text, source=path)


def emit_structure_text(bs: BiautomaticStructure, z: Element | None = None,
                        header: str = "") -> str:
    M = bs.acceptor
    lines = []
    if header:
        lines.extend(f"# {line}" for line in header.splitlines())
    lines.append("[alphabet]")
    lines.append(" ".join(M.alphabet.letters))
    lines.append("")
    lines.append("[model]")
    lines.append(f"kind {kind_to_text(bs.model.kind)}")
    for letter, img in bs.model.gens:
        lines.append(f"gen {letter} {element_to_text(bs.model.kind, img)}")
    lines.append("")
    lines.append("[acceptor]")
    lines.append(f"start {M.states[M.start]}")
    lines.append("accept " + " ".join(M.states[s] for s in sorted(M.accept)))
    for s in range(M.n_states):
        for i, x in enumerate(M.alphabet):
            lines.append(f"{M.states[s]} {x} {M.states[M.delta[s][i]]}")
    lines.append("")
    lines.append("[constants]")
    lines.append(f"k {bs.k}")
    if z is not None:
        lines.append(f"z {element_to_text(bs.model.kind, z)}")
    return "\n".join(lines) + "\n"
