"""The quotient normal-form language and its fellow-traveller bound.

Given a structure with uniqueness and a central element z of infinite
order, the words compatible with some positive Z-cycle but containing no
Z-cycle form a regular language that projects to a biautomatic structure on
the quotient by <z>. This module builds that language out of touch and
containment acceptors, computes the explicit constant

    K' = (B |z| + 2) K   with   B = A R (|U| |M| + 1) + A,

and verifies the resulting structure by bounded enumeration. Iterating the
construction peels off a whole finitely generated central subgroup.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import cycles, fsa, groups, structures
from .cycles import CentralCycle, CycleConstants, ZCycle
from .errors import InputError, PreconditionError, StructuralError
from .fsa import Automaton, Loop
from .groups import Element, GroupModel
from .structures import BiautomaticStructure, VerificationReport, _report


def _check_loop_of(M: Automaton, loop: Loop) -> None:
    word, visited = loop.word, loop.visited
    for i, x in enumerate(word):
        if M.delta[visited[i]][M.alphabet.index(x)] != visited[i + 1]:
            raise InputError("the loop does not follow the automaton's transitions")


def build_touch_acceptor(M: Automaton, loop: Loop) -> Automaton:
    """Acceptor for the words whose path meets the loop.

    Every state on the loop becomes an accepting dead end, so the language
    is absorbing: once touched, any continuation stays accepted.
    """
    _check_loop_of(M, loop)
    on_loop = loop.states
    k = len(M.alphabet)
    delta = tuple(
        tuple(s if s in on_loop else M.delta[s][x] for x in range(k))
        for s in range(M.n_states)
    )
    return Automaton(M.alphabet, M.states, M.start, frozenset(on_loop), delta)


def build_contains_acceptor(M: Automaton, loop: Loop, n: int) -> Automaton:
    """Acceptor for the words whose path, at its first visit to the loop,
    immediately traverses the loop's rotation n consecutive full times."""
    if n < 1:
        raise InputError("power must be at least 1")
    if not loop.is_simple():
        raise InputError("containment acceptors take simple loops; put iterates in the cycle")
    _check_loop_of(M, loop)
    ell = len(loop)
    on_loop = sorted(loop.states)
    rotations = {s: fsa.rotate_loop(loop, s)[0] for s in on_loop}

    # Tracker states: untouched per automaton state, in-progress per
    # (anchor, position), plus absorbing done/failed.
    names: list[str] = []
    index: dict = {}

    def intern(key, name):
        if key not in index:
            index[key] = len(names)
            names.append(name)
        return index[key]

    done = intern("done", "done")
    failed = intern("failed", "failed")
    for s in range(M.n_states):
        intern(("u", s), f"u:{M.states[s]}")
    for s in on_loop:
        for j in range(n * ell):
            intern(("p", s, j), f"p:{M.states[s]}:{j}")

    k = len(M.alphabet)
    delta_rows: list[tuple[int, ...]] = [(done,) * k, (failed,) * k]
    for key in list(index)[2:]:
        row = []
        for xi in range(k):
            x = M.alphabet.letters[xi]
            if key[0] == "u":
                s = key[1]
                t = M.delta[s][xi]
                row.append(index[("p", t, 0)] if t in loop.states else index[("u", t)])
            else:
                _, anchor, j = key
                expected = rotations[anchor][j % ell]
                if x == expected:
                    row.append(done if j + 1 == n * ell else index[("p", anchor, j + 1)])
                else:
                    row.append(failed)
        delta_rows.append(tuple(row))
    start = index[("p", M.start, 0)] if M.start in loop.states else index[("u", M.start)]
    out = Automaton(M.alphabet, tuple(names), start, frozenset({done}), tuple(delta_rows))
    return fsa.minimize(out)


def _cycle_compatibility_acceptor(M: Automaton, cycle: CentralCycle) -> Automaton:
    out = None
    for cl, _ in cycle.terms:
        acc = build_touch_acceptor(M, cl.loop)
        out = acc if out is None else fsa.minimize(fsa.intersect(out, acc))
    if out is None:
        raise InputError("a compatibility acceptor needs a non-empty cycle")
    return out


def _cycle_contains_acceptor(M: Automaton, cycle: CentralCycle) -> Automaton:
    out = None
    for cl, n in cycle.terms:
        acc = build_contains_acceptor(M, cl.loop, n)
        out = acc if out is None else fsa.minimize(fsa.intersect(out, acc))
    if out is None:
        raise InputError("a containment acceptor needs a non-empty cycle")
    return out


@dataclass(frozen=True)
class BoundReport:
    """The constant chain, each field exactly as computed.

    state_count is the number of live states of the minimized source
    acceptor; z_length is the word length of z. The chain is
    k1 = (A |z| + 2) K, b = A R (|U| |M| + 1) + A, k_prime = (b |z| + 2) K.
    """

    k: int
    max_exponent: int
    global_bound: int
    z_length: int
    k1: int
    ball_size: int
    state_count: int
    b: int
    k_prime: int


def compute_bound(bs: BiautomaticStructure, z: Element, *,
                  constants: CycleConstants | None = None) -> BoundReport:
    """Evaluate the explicit fellow-traveller bound for the quotient language."""
    cc = constants if constants is not None else cycles.compute_cycle_constants(bs, z)
    a = cc.max_exponent
    r = cc.global_bound
    z_len = groups.norm(bs.model, z)
    k1 = (a * z_len + 2) * bs.k
    ball_size = len(groups.ball(bs.model, k1))
    state_count = len(fsa.live_state_indices(fsa.minimize(bs.acceptor)))
    b = a * r * (ball_size * state_count + 1) + a
    k_prime = (b * z_len + 2) * bs.k
    return BoundReport(bs.k, a, r, z_len, k1, ball_size, state_count, b, k_prime)


@dataclass(eq=False)
class QuotientStructure:
    """The quotient language packaged as a structure on G/<z>."""

    structure: BiautomaticStructure
    source: BiautomaticStructure
    z: Element
    project: Callable[[Element], Element]
    bound: BoundReport
    positive_cycles: tuple[ZCycle, ...]
    all_cycles: tuple[ZCycle, ...]


def build_quotient(bs: BiautomaticStructure, z: Element) -> QuotientStructure:
    """Acceptor, model, and constant for the quotient by the central line <z>.

    The language keeps exactly the accepted words compatible with some
    positive primitive Z-cycle while containing no primitive Z-cycle of
    either sign.
    """
    simplicity = cycles.check_simplicity(bs)
    if not simplicity.passed:
        raise StructuralError(
            f"acceptor violates loop disjointness: {simplicity.witnesses[:3]}"
        )
    zcycles = cycles.find_primitive_z_cycles(bs, z)
    positive = tuple(zc for zc in zcycles if zc.positive)
    if not positive:
        raise StructuralError("no positive Z-cycle: the coset language would be empty")
    M = bs.acceptor
    branch = None
    for zc in positive:
        compat = _cycle_compatibility_acceptor(M, zc.cycle)
        blocked = fsa.complement(_cycle_contains_acceptor(M, zc.cycle))
        piece = fsa.minimize(fsa.intersect(compat, blocked))
        branch = piece if branch is None else fsa.minimize(fsa.union(branch, piece))
    language = fsa.minimize(fsa.intersect(M, branch))
    for zc in zcycles:
        blocked = fsa.complement(_cycle_contains_acceptor(M, zc.cycle))
        language = fsa.minimize(fsa.intersect(language, blocked))

    constants = cycles.compute_cycle_constants(bs, z)
    bound = compute_bound(bs, z, constants=constants)
    model, project = groups.quotient_model(bs.model, [z])
    quotient = BiautomaticStructure(language, model, bound.k_prime)
    return QuotientStructure(quotient, bs, z, project, bound, positive, zcycles)


def verify_quotient(qs: QuotientStructure, radius: int, max_len: int) -> VerificationReport:
    """Three sub-checks: coset surjectivity, the measured two-way constant in
    the quotient, and that constant against the computed bound."""
    slack = max(max_len - radius, 0)
    surj = structures.verify_surjectivity(qs.structure, radius, slack=slack)
    surj = VerificationReport(
        name="coset_surjectivity", passed=surj.passed, bound=surj.bound,
        witnesses=surj.witnesses, total_witnesses=surj.total_witnesses,
    )
    travel = structures.verify_fellow_traveller(qs.structure, max_len)
    measured = travel.measured or 0
    dominated = _report(
        "bound_dominates", measured <= qs.bound.k_prime, max_len,
        [] if measured <= qs.bound.k_prime else [(measured, qs.bound.k_prime)],
        measured=measured,
    )
    checks = (surj, travel, dominated)
    return _report(
        "quotient",
        all(c.passed for c in checks),
        max_len,
        [w for c in checks for w in c.witnesses],
        measured=measured,
        details=checks,
    )


def finite_quotient_projection(bs: BiautomaticStructure, generators) -> BiautomaticStructure:
    """Project the structure to the quotient by a finite central subgroup.

    The language and the constant are unchanged; only the model's torsion
    is adjusted.
    """
    generators = list(generators)
    for g in generators:
        if not bs.model.is_central(g):
            raise PreconditionError(f"subgroup generator {g!r} is not central")
        if bs.model.has_infinite_order(g):
            raise InputError(f"subgroup generator {g!r} has infinite order")
    model, _ = groups.quotient_model(bs.model, generators)
    return BiautomaticStructure(bs.acceptor, model, bs.k)


@dataclass(eq=False)
class TowerStep:
    kind: str  # "peel" or "finite"
    z: Element | None
    quotient: QuotientStructure | None
    result: BiautomaticStructure


@dataclass(eq=False)
class TowerResult:
    final: BiautomaticStructure
    steps: tuple[TowerStep, ...]


def central_quotient_tower(bs: BiautomaticStructure, generators) -> TowerResult:
    """Quotient by the central subgroup the generators generate.

    Infinite-order directions are peeled one at a time through
    build_quotient; the residual finite central image is removed by a single
    projection at the end.
    """
    pending = list(generators)
    for g in pending:
        if not bs.model.is_central(g):
            raise PreconditionError(f"subgroup generator {g!r} is not central")
    current = bs
    steps: list[TowerStep] = []
    while True:
        pending = [g for g in pending if g != current.model.identity()]
        z = next((g for g in pending if current.model.has_infinite_order(g)), None)
        if z is None:
            break
        qs = build_quotient(current, z)
        pending = [qs.project(g) for g in pending]
        current = qs.structure
        steps.append(TowerStep("peel", z, qs, current))
    if pending:
        current = finite_quotient_projection(current, pending)
        steps.append(TowerStep("finite", None, None, current))
    return TowerResult(current, tuple(steps))
