"""Central loops, live sets, Z-cycles, and the splice/strip calculus.

A central loop is a live simple loop whose word evaluates into the center.
A central cycle is a formal positive-integer combination of a live set of
central loops; it is a Z-cycle when the represented element is a power of
the distinguished central element z. Splicing inserts the cycle's loop
powers into a compatible path at its first visit to each loop; stripping is
the inverse, removing as many copies as possible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from . import fsa, intlinalg
from .errors import InputError, PreconditionError, StructuralError
from .fsa import Loop, Path
from .groups import Element
from .structures import BiautomaticStructure, VerificationReport, _report


@dataclass(frozen=True)
class CentralLoop:
    loop: Loop
    element: Element
    free_coords: tuple[int, ...]
    torsion_coords: tuple[int, ...]

    @property
    def word(self) -> str:
        return self.loop.word

    @property
    def states(self) -> frozenset[int]:
        return self.loop.states


@dataclass(frozen=True)
class LiveSet:
    loops: tuple[CentralLoop, ...]
    witness: Path


@dataclass(frozen=True)
class CentralCycle:
    """terms maps loops to their positive integer coefficients."""

    terms: tuple[tuple[CentralLoop, int], ...]
    live_set: LiveSet
    element: Element

    @property
    def is_primitive(self) -> bool:
        g = 0
        for _, n in self.terms:
            g = gcd(g, n)
        return g == 1


@dataclass(frozen=True)
class ZCycle:
    cycle: CentralCycle
    exponent: int

    @property
    def positive(self) -> bool:
        return self.exponent >= 1


@dataclass
class CycleConstants:
    """The constants feeding the quotient fellow-traveller bound.

    max_exponent        largest exponent of a primitive positive Z-cycle (A)
    related_loops       per loop, the central loops a power of which
                        represents a positive power of it (G_gamma)
    common_power        per loop, the least positive power every related
                        loop can reach (m_gamma)
    cycle_multipliers   per positive cycle, the least coefficient vector
                        that is a multiple of each common_power (rho)
    global_bound        max over all multipliers (R)
    """

    max_exponent: int
    related_loops: dict[CentralLoop, tuple[CentralLoop, ...]]
    common_power: dict[CentralLoop, int]
    cycle_multipliers: dict[ZCycle, tuple[int, ...]]
    global_bound: int


def find_central_loops(bs: BiautomaticStructure) -> tuple[CentralLoop, ...]:
    """All live simple loops representing central elements, in canonical order."""
    out = []
    for loop in fsa.enumerate_simple_loops(bs.acceptor, live_only=True):
        g = bs.evaluate(loop.word)
        if bs.model.is_central(g):
            free, tors = _loop_coords(bs, g)
            out.append(CentralLoop(loop, g, free, tors))
    return tuple(out)


def _loop_coords(bs, g):
    from .groups import center_coords

    return center_coords(bs.model.kind, g)


def check_simplicity(bs: BiautomaticStructure) -> VerificationReport:
    """Central loops must be vertex-disjoint from every other live simple loop."""
    loops = fsa.enumerate_simple_loops(bs.acceptor, live_only=True)
    central = {lp: bs.model.is_central(bs.evaluate(lp.word)) for lp in loops}
    witnesses = []
    for l1, l2 in itertools.combinations(loops, 2):
        if (central[l1] or central[l2]) and (l1.states & l2.states):
            shared = sorted(bs.acceptor.states[s] for s in l1.states & l2.states)
            witnesses.append((l1.word, l2.word, tuple(shared)))
    return _report("simplicity", not witnesses, len(loops), witnesses)


def enumerate_live_sets(bs: BiautomaticStructure, loops) -> tuple[LiveSet, ...]:
    """All subsets of the given loops compatible with some accepted path.

    A single product sweep over (state, touched-loops bitmask) finds, for
    every subset, the shortest accepted witness touching all of it.
    """
    loops = tuple(loops)
    M = bs.acceptor
    state_mask = [0] * M.n_states
    for i, cl in enumerate(loops):
        for s in cl.states:
            state_mask[s] |= 1 << i
    start_key = (M.start, state_mask[M.start])
    seen = {start_key: ""}
    frontier = [start_key]
    accepted_masks: dict[int, str] = {}
    if M.start in M.accept:
        accepted_masks[start_key[1]] = ""
    while frontier:
        nxt = []
        for s, mask in frontier:
            w = seen[(s, mask)]
            for i, x in enumerate(M.alphabet):
                t = M.delta[s][i]
                key = (t, mask | state_mask[t])
                if key not in seen:
                    seen[key] = w + x
                    nxt.append(key)
                    if t in M.accept and key[1] not in accepted_masks:
                        accepted_masks[key[1]] = w + x
        frontier = nxt

    out = []
    for bits in range(1 << len(loops)):
        best = None
        for mask, w in accepted_masks.items():
            if mask & bits == bits:
                if best is None or (len(w), w) < (len(best), best):
                    best = w
        if best is not None:
            subset = tuple(loops[i] for i in range(len(loops)) if bits >> i & 1)
            out.append(LiveSet(subset, fsa.path(M, best)))
    out.sort(key=lambda ls: (len(ls.loops), tuple(l.loop.visited for l in ls.loops)))
    return tuple(out)


def check_independence(bs: BiautomaticStructure, live_set: LiveSet) -> VerificationReport:
    """The loop elements of a live set must be linearly independent over Z."""
    rows = [cl.free_coords for cl in live_set.loops]
    if not rows:
        return _report("independence", True, 0)
    kernel = intlinalg.left_kernel_basis(rows)
    if not kernel:
        return _report("independence", True, len(rows))
    relation = kernel[0]
    # Lift to a genuine relation: clear any torsion the combination leaves.
    torsion = [cl.torsion_coords for cl in live_set.loops]
    orders = _torsion_orders(bs)
    residual = [sum(n * t[j] for n, t in zip(relation, torsion)) % m
                for j, m in enumerate(orders)]
    k = 1
    for r, m in zip(residual, orders):
        if r:
            step = m // gcd(m, r)
            k = k * step // gcd(k, step)
    witness = tuple(k * n for n in relation)
    return _report("independence", False, len(rows),
                   [(witness, tuple(cl.word for cl in live_set.loops))])


def _torsion_orders(bs) -> tuple[int, ...]:
    from .groups import center_shape

    return center_shape(bs.model.kind)[1]


def _cycle_element(bs, terms) -> Element:
    model = bs.model
    out = model.identity()
    for cl, n in terms:
        p = cl.element
        acc = model.identity()
        for _ in range(n):
            acc = model.mul(acc, p)
        out = model.mul(out, acc)
    return out


def make_cycle(bs: BiautomaticStructure, live_set: LiveSet, coefficients) -> CentralCycle:
    coefficients = tuple(coefficients)
    if len(coefficients) != len(live_set.loops) or any(n < 1 for n in coefficients):
        raise InputError("a cycle needs one positive coefficient per loop")
    terms = tuple(zip(live_set.loops, coefficients))
    return CentralCycle(terms, live_set, _cycle_element(bs, terms))


def scale_cycle(bs: BiautomaticStructure, cycle: CentralCycle, k: int) -> CentralCycle:
    return make_cycle(bs, cycle.live_set, tuple(k * n for _, n in cycle.terms))


def find_primitive_z_cycles(bs: BiautomaticStructure, z: Element) -> tuple[ZCycle, ...]:
    """All primitive Z-cycles, each tagged with its exponent over z.

    Per live set the positive solutions of sum(n_i * loop_i) in <z> form at
    most a single ray (by independence), so at most one primitive cycle
    exists per set; the candidate from the integer kernel is confirmed
    exactly on the represented element.
    """
    if not bs.model.is_central(z):
        raise PreconditionError("z must be central")
    if not bs.model.has_infinite_order(z):
        raise PreconditionError("z must have infinite order")
    from .groups import center_coords

    z_free, _ = center_coords(bs.model.kind, z)
    loops = find_central_loops(bs)
    out = []
    for live_set in enumerate_live_sets(bs, loops):
        if not live_set.loops:
            continue
        indep = check_independence(bs, live_set)
        if not indep.passed:
            raise StructuralError(
                f"live set is not independent; relation {indep.witnesses[0][0]} over "
                f"loops {indep.witnesses[0][1]}"
            )
        rows = [cl.free_coords for cl in live_set.loops] + [z_free]
        kernel = intlinalg.left_kernel_basis(rows)
        if not kernel:
            continue
        if len(kernel) > 1:
            raise StructuralError("solution space has rank above one")
        vec = kernel[0]
        coeffs = vec[:-1]
        if all(n < 0 for n in coeffs):
            coeffs = tuple(-n for n in coeffs)
        if any(n <= 0 for n in coeffs):
            continue
        g = 0
        for n in coeffs:
            g = gcd(g, n)
        coeffs = tuple(n // g for n in coeffs)
        cycle = make_cycle(bs, live_set, coeffs)
        alpha = bs.model.cyclic_exponent(z, cycle.element)
        if alpha is None or alpha == 0:
            continue
        out.append(ZCycle(cycle, alpha))
    return tuple(out)


# --- splice and strip -------------------------------------------------------

def _first_visits(path: Path, cycle: CentralCycle) -> list[tuple[int, CentralLoop, int]]:
    """(first visit time, loop, coefficient) sorted by time; error if some
    loop is never met."""
    out = []
    for cl, n in cycle.terms:
        t = next((i for i, s in enumerate(path.visited) if s in cl.states), None)
        if t is None:
            raise PreconditionError(
                f"path {path.word!r} is not compatible with the cycle: "
                f"loop {cl.word!r} is never met"
            )
        out.append((t, cl, n))
    out.sort(key=lambda item: item[0])
    times = [t for t, _, _ in out]
    if len(set(times)) != len(times):
        raise StructuralError("loop first-visit times collide; simplicity is violated")
    return out


def splice(bs: BiautomaticStructure, path: Path, cycle: CentralCycle) -> Path:
    """Insert each loop's power at the path's first visit to that loop.

    For an accepted path the result is accepted and represents the product
    of the path's element with the cycle's element.
    """
    visits = _first_visits(path, cycle)
    word = path.word
    pieces = []
    prev = 0
    for t, cl, n in visits:
        pieces.append(word[prev:t])
        rotated, _ = fsa.rotate_loop(cl.loop, path.visited[t])
        pieces.append(rotated * n)
        prev = t
    pieces.append(word[prev:])
    return fsa.path(bs.acceptor, "".join(pieces), path.origin)


def contains(bs: BiautomaticStructure, path: Path, cycle: CentralCycle) -> bool:
    """Whether the path traverses each loop's full power right at its first visit."""
    try:
        visits = _first_visits(path, cycle)
    except PreconditionError:
        return False
    word = path.word
    for t, cl, n in visits:
        rotated, _ = fsa.rotate_loop(cl.loop, path.visited[t])
        block = rotated * n
        if word[t:t + len(block)] != block:
            return False
    return True


def strip(bs: BiautomaticStructure, path: Path, cycle: CentralCycle) -> tuple[Path, int]:
    """Remove as many copies of the cycle as the path contains.

    Returns (base path, multiplicity m) with path == splice^m(base, cycle).
    """
    m = 0
    current = path
    while contains(bs, current, cycle):
        visits = _first_visits(current, cycle)
        word = current.word
        drop = []
        for t, cl, n in visits:
            drop.append((t, n * len(cl.loop)))
        kept = []
        prev = 0
        for t, length in drop:
            kept.append(word[prev:t])
            prev = t + length
        kept.append(word[prev:])
        current = fsa.path(bs.acceptor, "".join(kept), current.origin)
        m += 1
    return current, m


# --- the constants for the quotient bound ------------------------------------

def _positive_power_ratio(cl: CentralLoop, target: CentralLoop, orders) -> int | None:
    """Least positive p such that some positive iterate of cl represents
    target^p; None when no iterate of cl is a positive power of target."""
    lam_f, tgt_f = cl.free_coords, target.free_coords
    # need s,t >= 1 with s*lam = t*tgt on free parts, i.e. lam parallel to tgt
    # with positive ratio t/s.
    ratio = None  # (num, den) reduced, ratio = num/den = t/s
    for a, b in zip(lam_f, tgt_f):
        if (a == 0) != (b == 0):
            return None
        if a == 0:
            continue
        num, den = a, b  # s*a = t*b -> t/s = a/b
        if num * den <= 0:
            return None
        g = gcd(abs(num), abs(den))
        num, den = abs(num) // g, abs(den) // g
        if ratio is None:
            ratio = (num, den)
        elif ratio != (num, den):
            return None
    if ratio is None:
        return None
    t0, s0 = ratio
    # torsion must match for the iterate pair (k*s0, k*t0); find least k.
    k = 1
    for j, m in enumerate(orders):
        defect = (s0 * cl.torsion_coords[j] - t0 * target.torsion_coords[j]) % m
        if defect:
            step = m // gcd(m, defect)
            k = k * step // gcd(k, step)
    return k * t0


def compute_cycle_constants(bs: BiautomaticStructure, z: Element) -> CycleConstants:
    """The exponent bound, related-loop powers, and cycle multipliers that
    enter the quotient fellow-traveller bound."""
    zcycles = find_primitive_z_cycles(bs, z)
    positive = [zc for zc in zcycles if zc.positive]
    if not positive:
        raise StructuralError("no positive Z-cycle: the coset language would be empty")
    max_exponent = max(zc.exponent for zc in positive)
    orders = _torsion_orders(bs)
    all_loops = find_central_loops(bs)
    loops_in_positive = []
    for zc in positive:
        for cl, _ in zc.cycle.terms:
            if cl not in loops_in_positive:
                loops_in_positive.append(cl)
    related: dict[CentralLoop, tuple[CentralLoop, ...]] = {}
    common_power: dict[CentralLoop, int] = {}
    for gamma in loops_in_positive:
        members = []
        powers = []
        for cl in all_loops:
            p = _positive_power_ratio(cl, gamma, orders)
            if p is not None:
                members.append(cl)
                powers.append(p)
        related[gamma] = tuple(members)
        m = 1
        for p in powers:
            m = m * p // gcd(m, p)
        common_power[gamma] = m
    multipliers: dict[ZCycle, tuple[int, ...]] = {}
    global_bound = 1
    for zc in positive:
        ell = 1
        for cl, n in zc.cycle.terms:
            step = common_power[cl] // gcd(common_power[cl], n)
            ell = ell * step // gcd(ell, step)
        rho = tuple(ell * n for _, n in zc.cycle.terms)
        multipliers[zc] = rho
        global_bound = max(global_bound, max(rho))
    return CycleConstants(max_exponent, related, common_power, multipliers, global_bound)
