"""Biautomatic structure bundles and their bounded-exhaustive verification.

A structure couples a word acceptor with a group model and a claimed two-way
fellow traveller constant. Verification is exhaustive up to a caller-chosen
bound, never symbolic: each report records the bound it was checked at, and
a failing report carries concrete witnesses that can be re-checked by hand.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

from . import fsa, groups
from .errors import InputError
from .fsa import Alphabet, Automaton
from .groups import Element, GroupModel

WITNESS_CAP = 20
DEFAULT_SURJECTIVITY_SLACK = 4


@dataclass(frozen=True)
class BiautomaticStructure:
    """Word acceptor + group model + claimed fellow traveller constant."""

    acceptor: Automaton
    model: GroupModel
    k: int

    @property
    def alphabet(self) -> Alphabet:
        return self.acceptor.alphabet

    def evaluate(self, word: str) -> Element:
        return self.model.evaluate(word)


def validate_structure(bs: BiautomaticStructure) -> None:
    """Load-time checks: letter coverage, symmetric images, generation, non-emptiness."""
    images = []
    for x in bs.alphabet:
        images.append(bs.model.image(x))
    image_set = set(images)
    for img in images:
        if bs.model.inv(img) not in image_set:
            raise InputError(
                f"generator images must be closed under inversion; {img!r} has no inverse letter"
            )
    if not groups.generates(bs.model.kind, images):
        raise InputError("generator images do not generate the group")
    if fsa.is_empty_language(bs.acceptor):
        raise InputError("the accepted language is empty")


@dataclass(frozen=True)
class VerificationReport:
    name: str
    passed: bool
    bound: int
    witnesses: tuple = ()
    total_witnesses: int = 0
    measured: int | None = None
    details: tuple = ()
    note: str = ""

    def __str__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        extra = f", measured {self.measured}" if self.measured is not None else ""
        tail = f", {self.total_witnesses} witness(es)" if self.total_witnesses else ""
        return f"{self.name}: {status} (bound {self.bound}{extra}{tail})"


def _report(name, passed, bound, witnesses=(), measured=None, details=(), note=""):
    witnesses = tuple(witnesses)
    return VerificationReport(
        name=name,
        passed=passed,
        bound=bound,
        witnesses=witnesses[:WITNESS_CAP],
        total_witnesses=len(witnesses),
        measured=measured,
        details=tuple(details),
        note=note,
    )


# --- accepted-word index ----------------------------------------------------

class WordIndex:
    """Shortlex enumeration of the accepted language with interned elements.

    For every accepted word of length <= max_len the index stores the word,
    its evaluated element, and the chain of prefix element ids, which makes
    the synchronous fellow-traveller sweeps cheap. Elements are interned so
    identity is a single integer comparison.
    """

    def __init__(self, bs: BiautomaticStructure, max_len: int):
        self.structure = bs
        self.max_len = max_len
        self.elements: list[Element] = []
        self._ids: dict[Element, int] = {}
        self.words: list[str] = []
        self.word_elems: list[int] = []
        self.prefix_ids: list[tuple[int, ...]] = []
        self.by_element: dict[int, list[int]] = {}
        self._build()

    def intern(self, e: Element) -> int:
        i = self._ids.get(e)
        if i is None:
            i = len(self.elements)
            self._ids[e] = i
            self.elements.append(e)
        return i

    def _build(self):
        M = self.structure.acceptor
        model = self.structure.model
        dist = fsa._distance_to_accept(M)
        if dist[M.start] is None or dist[M.start] > self.max_len:
            return
        images = [model.image(x) for x in M.alphabet]
        ident = self.intern(model.identity())
        level = [(M.start, "", ident, (ident,))]
        for length in range(self.max_len + 1):
            for s, w, eid, chain in level:
                if s in M.accept:
                    idx = len(self.words)
                    self.words.append(w)
                    self.word_elems.append(eid)
                    self.prefix_ids.append(chain)
                    self.by_element.setdefault(eid, []).append(idx)
            if length == self.max_len:
                break
            budget = self.max_len - length - 1
            nxt = []
            for s, w, eid, chain in level:
                g = self.elements[eid]
                for i, x in enumerate(M.alphabet):
                    t = M.delta[s][i]
                    if dist[t] is not None and dist[t] <= budget:
                        hid = self.intern(model.mul(g, images[i]))
                        nxt.append((t, w + x, hid, chain + (hid,)))
            level = nxt

    def collisions(self) -> list[tuple[Element, list[str]]]:
        out = []
        for eid, idxs in self.by_element.items():
            if len(idxs) > 1:
                out.append((self.elements[eid], [self.words[i] for i in idxs]))
        return out


@lru_cache(maxsize=8)
def word_index(bs: BiautomaticStructure, max_len: int) -> WordIndex:
    return WordIndex(bs, max_len)


# --- verification sweeps ----------------------------------------------------

def verify_surjectivity(bs: BiautomaticStructure, radius: int, *,
                        slack: int = DEFAULT_SURJECTIVITY_SLACK) -> VerificationReport:
    """Every element of the radius-ball must be hit by an accepted word
    of length <= radius + slack."""
    if radius < 0:
        raise InputError("radius must be non-negative")
    idx = word_index(bs, radius + slack)
    hit = {idx.elements[eid] for eid in idx.by_element}
    missing = sorted(g for g in groups.ball(bs.model, radius).members if g not in hit)
    return _report("surjectivity", not missing, radius, missing)


def verify_uniqueness(bs: BiautomaticStructure, max_len: int) -> VerificationReport:
    """No two distinct accepted words of length <= max_len share an element."""
    idx = word_index(bs, max_len)
    witnesses = [
        (tuple(words), elem) for elem, words in sorted(idx.collisions(), key=lambda c: c[1])
    ]
    return _report("uniqueness", not witnesses, max_len, witnesses)


def verify_fellow_traveller(bs: BiautomaticStructure, max_len: int) -> VerificationReport:
    """Measure the least two-way fellow traveller constant at the given bound.

    All accepted pairs (v, w) of length <= max_len related by one letter on
    either side are swept; the synchronous prefix distance uses the paper
    convention that a word, once exhausted, stays at its endpoint. Passes
    when the measured constant is at most the claimed one.
    """
    idx = word_index(bs, max_len)
    model = bs.model
    words = idx.words
    elements = idx.elements
    letters = list(bs.alphabet.letters)
    images = [model.image(x) for x in letters]
    inverse_images = [model.inv(img) for img in images]
    ident_id = idx.intern(model.identity())
    inv_ids = [idx.intern(g) for g in inverse_images]

    mul_right: dict[tuple[int, int], int] = {}
    mul_left: dict[tuple[int, int], int] = {}
    step_cache: dict[tuple[int | None, int, int | None], int] = {}
    norm_cache: dict[int, int] = {ident_id: 0}
    letter_pos = {x: i for i, x in enumerate(letters)}

    def norm_of(did: int) -> int:
        n = norm_cache.get(did)
        if n is None:
            n = groups.norm(model, elements[did])
            norm_cache[did] = n
        return n

    measured = 0
    witnesses = []

    def check_pair(vi: int, wi: int, d0: int, label):
        nonlocal measured
        v, w = words[vi], words[wi]
        did = d0
        top = max(len(v), len(w))
        for t in range(top + 1):
            n = norm_of(did)
            if n > measured:
                measured = n
            if n > bs.k and len(witnesses) < WITNESS_CAP * 4:
                witnesses.append((v, w, label, t, n))
            if t == top:
                break
            vl = letter_pos[v[t]] if t < len(v) else None
            wl = letter_pos[w[t]] if t < len(w) else None
            key = (vl, did, wl)
            nid = step_cache.get(key)
            if nid is None:
                d = elements[did]
                if vl is not None:
                    d = model.mul(inverse_images[vl], d)
                if wl is not None:
                    d = model.mul(d, images[wl])
                nid = idx.intern(d)
                step_cache[key] = nid
            did = nid

    n_words = len(words)
    for wi in range(n_words):
        ew = idx.word_elems[wi]
        # epsilon on either side: pairs sharing the element
        for vi in idx.by_element.get(ew, ()):
            if vi != wi:
                check_pair(vi, wi, ident_id, ("right", ""))
        for a_pos in range(len(letters)):
            # right multiplication: v-bar = w-bar * a
            key = (ew, a_pos)
            tid = mul_right.get(key)
            if tid is None:
                tid = idx.intern(model.mul(elements[ew], images[a_pos]))
                mul_right[key] = tid
            for vi in idx.by_element.get(tid, ()):
                check_pair(vi, wi, ident_id, ("right", letters[a_pos]))
            # left multiplication: a * v-bar = w-bar
            tid = mul_left.get(key)
            if tid is None:
                tid = idx.intern(model.mul(inverse_images[a_pos], elements[ew]))
                mul_left[key] = tid
            for vi in idx.by_element.get(tid, ()):
                check_pair(vi, wi, inv_ids[a_pos], ("left", letters[a_pos]))

    witnesses.sort()
    return _report(
        "fellow_traveller", measured <= bs.k, max_len, witnesses, measured=measured
    )


# --- built-in fixtures -------------------------------------------------------
#
# Three demonstration structures with verified constants:
#   Z2    rank-2 lattice, words are a sign-run in x followed by one in y
#   Z3    rank-3 analogue
#   F2xZ  free-of-rank-2 times a central line, words are a reduced word
#         followed by a run of the central letter
# The fellow traveller constants are frozen from exhaustive scans to word
# length 12 (Z2, Z3) and 10 (F2xZ).

def _build_z2() -> BiautomaticStructure:
    alphabet = Alphabet.of("aAbB")
    rules = {}
    for x, s in (("a", "Sa"), ("A", "SA"), ("b", "Sb"), ("B", "SB")):
        rules[("S", x)] = s
    for run in ("Sa", "SA"):
        rules[(run, run[1])] = run
        rules[(run, "b")] = "Sb"
        rules[(run, "B")] = "SB"
    rules[("Sb", "b")] = "Sb"
    rules[("SB", "B")] = "SB"
    M = fsa.from_rules(alphabet, ("S", "Sa", "SA", "Sb", "SB"), "S",
                       ("S", "Sa", "SA", "Sb", "SB"), rules)
    model = GroupModel(
        groups.FreeAbelian(2),
        (("a", (1, 0)), ("A", (-1, 0)), ("b", (0, 1)), ("B", (0, -1))),
    )
    return BiautomaticStructure(M, model, 2)


def _build_z3() -> BiautomaticStructure:
    alphabet = Alphabet.of("aAbBcC")
    axis = {"a": "Sa", "A": "SA", "b": "Sb", "B": "SB", "c": "Sc", "C": "SC"}
    rules = {}
    for x, s in axis.items():
        rules[("S", x)] = s
    for first in ("Sa", "SA"):
        rules[(first, first[1])] = first
        for x in ("b", "B", "c", "C"):
            rules[(first, x)] = axis[x]
    for second in ("Sb", "SB"):
        rules[(second, second[1])] = second
        for x in ("c", "C"):
            rules[(second, x)] = axis[x]
    rules[("Sc", "c")] = "Sc"
    rules[("SC", "C")] = "SC"
    states = ("S", "Sa", "SA", "Sb", "SB", "Sc", "SC")
    M = fsa.from_rules(alphabet, states, "S", states, rules)
    e = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    model = GroupModel(
        groups.FreeAbelian(3),
        (
            ("a", e[0]), ("A", (-1, 0, 0)),
            ("b", e[1]), ("B", (0, -1, 0)),
            ("c", e[2]), ("C", (0, 0, -1)),
        ),
    )
    return BiautomaticStructure(M, model, 2)


def _build_f2xz() -> BiautomaticStructure:
    alphabet = Alphabet.of("xXyYzZ")
    follow = {"x": "Rx", "X": "RX", "y": "Ry", "Y": "RY"}
    blocked = {"Rx": "X", "RX": "x", "Ry": "Y", "RY": "y"}
    rules = {}
    for x, s in follow.items():
        rules[("S", x)] = s
    rules[("S", "z")] = "Tz"
    rules[("S", "Z")] = "TZ"
    for state, bad in blocked.items():
        for x, s in follow.items():
            if x != bad:
                rules[(state, x)] = s
        rules[(state, "z")] = "Tz"
        rules[(state, "Z")] = "TZ"
    rules[("Tz", "z")] = "Tz"
    rules[("TZ", "Z")] = "TZ"
    states = ("S", "Rx", "RX", "Ry", "RY", "Tz", "TZ")
    M = fsa.from_rules(alphabet, states, "S", states, rules)
    f2 = groups.Free(2)
    line = groups.FreeAbelian(1)
    kind = groups.DirectProduct(f2, line)
    ident_line = (0,)
    model = GroupModel(
        kind,
        (
            ("x", ((1,), ident_line)), ("X", ((-1,), ident_line)),
            ("y", ((2,), ident_line)), ("Y", ((-2,), ident_line)),
            ("z", ((), (1,))), ("Z", ((), (-1,))),
        ),
    )
    return BiautomaticStructure(M, model, 2)


_BUILTINS = {"Z2": _build_z2, "Z3": _build_z3, "F2xZ": _build_f2xz}

_DEFAULT_Z: dict[str, Element] = {
    "Z2": (1, 1),
    "Z3": (1, 1, 1),
    "F2xZ": ((), (1,)),
}


@lru_cache(maxsize=None)
def builtin(name: str) -> BiautomaticStructure:
    """One of the shipped demonstration structures: Z2, Z3, or F2xZ."""
    try:
        bs = _BUILTINS[name]()
    except KeyError:
        raise InputError(f"unknown builtin {name!r}; choose from {sorted(_BUILTINS)}") from None
    validate_structure(bs)
    return bs


def builtin_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILTINS))


def builtin_default_z(name: str) -> Element:
    if name not in _DEFAULT_Z:
        raise InputError(f"unknown builtin {name!r}")
    return _DEFAULT_Z[name]


def with_accept_states(bs: BiautomaticStructure, accept_names) -> BiautomaticStructure:
    """Same structure with a replaced accept set (used for mutation tests)."""
    M = bs.acceptor
    accept = frozenset(M.state_index(a) for a in accept_names)
    return replace(bs, acceptor=replace(M, accept=accept))
