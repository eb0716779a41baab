"""The rational simplicial subdivision at infinity of an abelian structure.

For a free abelian model, every simple accepted path orders the simple
loops it meets; the primitive directions of those loop elements span an
ordered rational simplex on the unit sphere, and together the simplices
subdivide it. Far-away group elements point visually close to the simplex
of their normal form, which is what makes the subdivision useful: the star
of [z] localizes the normal forms carrying a positive Z-cycle, giving a
constructive coset representative search for the quotient language.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import cycles, fsa, groups, intlinalg
from .errors import InputError, PreconditionError, ResourceError, StructuralError
from .fsa import Automaton, Loop, Path
from .groups import Element, FreeAbelian
from .structures import BiautomaticStructure, VerificationReport, _report


@dataclass(frozen=True)
class Direction:
    """A primitive integer vector, standing for its ray's class on the sphere."""

    vector: tuple[int, ...]

    def __post_init__(self):
        if not any(self.vector):
            raise InputError("a direction must be a nonzero vector")
        if intlinalg.vec_gcd(self.vector) != 1:
            raise InputError(f"direction {self.vector} is not primitive")


def direction_of(vector) -> Direction:
    return Direction(intlinalg.primitive_vector(tuple(vector)))


@dataclass(frozen=True)
class Simplex:
    """Ordered simplex of independent directions, tagged with a source word."""

    directions: tuple[Direction, ...]
    source_word: str = ""

    @property
    def dim(self) -> int:
        return len(self.directions) - 1

    def key(self):
        return tuple(d.vector for d in self.directions)


@dataclass(frozen=True)
class Subdivision:
    dimension: int
    simplices: tuple[Simplex, ...]

    def by_dim(self) -> dict[int, tuple[Simplex, ...]]:
        out: dict[int, list[Simplex]] = {}
        for s in self.simplices:
            out.setdefault(s.dim, []).append(s)
        return {d: tuple(v) for d, v in sorted(out.items())}


def _require_abelian(bs: BiautomaticStructure) -> FreeAbelian:
    kind = bs.model.kind
    if not isinstance(kind, FreeAbelian) or kind.rank < 1:
        raise InputError("this construction needs a free abelian model of rank >= 1")
    return kind


@lru_cache(maxsize=16)
def _loop_at_state(M: Automaton) -> dict[int, Loop]:
    """Map each live state to its unique simple loop; error if not unique."""
    out: dict[int, Loop] = {}
    for loop in fsa.enumerate_simple_loops(M, live_only=True):
        for s in loop.states:
            if s in out and out[s] != loop:
                raise StructuralError(
                    f"state {M.states[s]} lies on two simple loops "
                    f"({out[s].word!r} and {loop.word!r}); loop disjointness fails"
                )
            out[s] = loop
    return out


def loop_sequence(M: Automaton, p: Path) -> tuple[tuple[int, Loop], ...]:
    """The ordered (anchor state, loop) list a simple path meets.

    The first anchor is the first state on any simple loop; each next anchor
    is the first later state on a loop distinct from the previous one.
    """
    interior = set(p.visited[:-1])
    if len(interior | {p.visited[-1]}) != len(p.visited):
        raise InputError("loop_sequence needs a vertex-simple path")
    at = _loop_at_state(M)
    out: list[tuple[int, Loop]] = []
    previous = None
    for s in p.visited:
        loop = at.get(s)
        if loop is not None and loop != previous:
            out.append((s, loop))
            previous = loop
    return tuple(out)


@lru_cache(maxsize=16)
def _simple_accepted_paths(M: Automaton) -> tuple[Path, ...]:
    live = fsa.live_state_indices(M)
    out: list[Path] = []

    def walk(state: int, word: str, seen: tuple[int, ...]):
        if state in M.accept:
            out.append(Path(M.start, word, seen))
        for i, x in enumerate(M.alphabet):
            t = M.delta[state][i]
            if t in live and t not in seen:
                walk(t, word + x, seen + (t,))

    if M.start in live:
        walk(M.start, "", (M.start,))
    return tuple(out)


def build_subdivision(bs: BiautomaticStructure) -> Subdivision:
    """Collect the ordered simplices of all simple accepted paths, faces closed."""
    kind = _require_abelian(bs)
    seen: dict[tuple, Simplex] = {}
    for p in _simple_accepted_paths(bs.acceptor):
        seq = loop_sequence(bs.acceptor, p)
        if not seq:
            continue
        vectors = []
        for _, loop in seq:
            g = bs.evaluate(loop.word)
            free = g[: kind.rank]
            if not any(free):
                raise StructuralError(f"loop {loop.word!r} has torsion direction")
            vectors.append(intlinalg.primitive_vector(free))
        if intlinalg.rational_rank(vectors) != len(vectors):
            raise StructuralError(
                f"dependent loop directions {vectors} along path {p.word!r}"
            )
        # The simplex and all its ordered faces.
        n = len(vectors)
        for mask in range(1, 1 << n):
            sub = tuple(vectors[i] for i in range(n) if mask >> i & 1)
            key = sub
            if key not in seen:
                seen[key] = Simplex(tuple(Direction(v) for v in sub), p.word)
    simplices = tuple(sorted(seen.values(), key=lambda s: (s.dim, s.key())))
    return Subdivision(kind.rank, simplices)


@lru_cache(maxsize=4096)
def _simplex_solver(simplex: Simplex) -> intlinalg.SpanSolver:
    return intlinalg.SpanSolver([d.vector for d in simplex.directions])


def cone_coefficients(simplex: Simplex, point) -> tuple[Fraction, ...] | None:
    """Rational coefficients placing `point` in the simplex's closed cone, or None."""
    sol = _simplex_solver(simplex).solve(tuple(point))
    if sol is None or any(c < 0 for c in sol):
        return None
    return sol


def star(subdivision: Subdivision, d: Direction) -> tuple[Simplex, ...]:
    """All simplices whose closed cone contains the direction."""
    return tuple(
        s for s in subdivision.simplices if cone_coefficients(s, d.vector) is not None
    )


def verify_subdivision(subdivision: Subdivision, sample_radius: int) -> VerificationReport:
    """Exact checks: simplex independence, and each nonzero integer point in
    the sample box lies in the cone of exactly one minimal-dimension simplex."""
    witnesses = []
    for s in subdivision.simplices:
        rows = [d.vector for d in s.directions]
        if intlinalg.rational_rank(rows) != len(rows):
            witnesses.append(("dependent", s.key()))
    k = subdivision.dimension
    if not witnesses:
        from itertools import product

        for point in product(range(-sample_radius, sample_radius + 1), repeat=k):
            if not any(point):
                continue
            best_dim = None
            count = 0
            for s in subdivision.simplices:
                if cone_coefficients(s, point) is not None:
                    if best_dim is None or s.dim < best_dim:
                        best_dim, count = s.dim, 1
                    elif s.dim == best_dim:
                        count += 1
            if best_dim is None:
                witnesses.append(("uncovered", point))
            elif count > 1:
                witnesses.append(("covered_twice", point))
            if len(witnesses) >= 50:
                break
    return _report("subdivision", not witnesses, sample_radius, witnesses)


@dataclass(frozen=True)
class PathNormalForm:
    """g as a simple path with loop powers pumped in at its anchors."""

    path: Path
    anchors: tuple[int, ...]
    loops: tuple[Loop, ...]
    exponents: tuple[int, ...]


def reconstruct(bs: BiautomaticStructure, pnf: PathNormalForm) -> Path:
    word = pnf.path.word
    visited = pnf.path.visited
    pieces = []
    prev = 0
    for anchor, loop, n in zip(pnf.anchors, pnf.loops, pnf.exponents):
        t = visited.index(anchor)
        pieces.append(word[prev:t])
        rotated, _ = fsa.rotate_loop(loop, anchor)
        pieces.append(rotated * n)
        prev = t
    pieces.append(word[prev:])
    return fsa.path(bs.acceptor, "".join(pieces), pnf.path.origin)


@lru_cache(maxsize=16)
def _path_solvers(bs: BiautomaticStructure):
    """Per simple path: loop sequence, elements, and a precomputed solver."""
    kind = bs.model.kind
    out = []
    for p in _simple_accepted_paths(bs.acceptor):
        seq = loop_sequence(bs.acceptor, p)
        base = bs.evaluate(p.word)
        rows = [bs.evaluate(loop.word) for _, loop in seq]
        solver = intlinalg.SpanSolver([e[: kind.rank] for e in rows])
        out.append((p, seq, base, rows, solver))
    return tuple(out)


def path_normal_form(bs: BiautomaticStructure, g: Element) -> PathNormalForm:
    """The unique decomposition of g's normal form over a simple path.

    Solved exactly: g must equal the path element times non-negative loop
    powers, coordinate-wise in the abelian model.
    """
    kind = _require_abelian(bs)
    width = kind.width
    matches = []
    for p, seq, base, loop_elems, solver in _path_solvers(bs):
        target = bs.model.mul(bs.model.inv(base), g)
        sol = solver.solve(target[: kind.rank])
        if sol is None or any(c.denominator != 1 or c < 0 for c in sol):
            continue
        ns = tuple(int(c) for c in sol)
        # confirm exactly, torsion included
        coords = list(base)
        for e, n in zip(loop_elems, ns):
            for i in range(width):
                coords[i] += n * e[i]
        for i, m in enumerate(kind.torsion):
            coords[kind.rank + i] %= m
        if tuple(coords) == g:
            matches.append((p, seq, ns))
    if not matches:
        raise StructuralError(f"element {g!r} has no accepted normal form")
    if len(matches) > 1:
        words = [p.word for p, _, _ in matches]
        raise StructuralError(f"element {g!r} has several decompositions: {words}")
    p, seq, ns = matches[0]
    return PathNormalForm(
        p,
        tuple(s for s, _ in seq),
        tuple(loop for _, loop in seq),
        ns,
    )


def visual_distance(d1, d2) -> float:
    """Angle in [0, pi] between two rays given by integer vectors."""
    v1 = d1.vector if isinstance(d1, Direction) else tuple(d1)
    v2 = d2.vector if isinstance(d2, Direction) else tuple(d2)
    dot = sum(a * b for a, b in zip(v1, v2))
    n1 = math.sqrt(sum(a * a for a in v1))
    n2 = math.sqrt(sum(a * a for a in v2))
    c = max(-1.0, min(1.0, dot / (n1 * n2)))
    return math.acos(c)


def angle_compare(d1, d2, cos_bound: Fraction) -> int:
    """Sign of cos(angle(d1, d2)) - cos_bound, decided exactly."""
    v1 = d1.vector if isinstance(d1, Direction) else tuple(d1)
    v2 = d2.vector if isinstance(d2, Direction) else tuple(d2)
    dot = sum(a * b for a, b in zip(v1, v2))
    nn = (sum(a * a for a in v1)) * (sum(b * b for b in v2))
    # cos = dot / sqrt(nn); compare against cos_bound by squaring with signs.
    lhs_sign = (dot > 0) - (dot < 0)
    rhs_sign = (cos_bound > 0) - (cos_bound < 0)
    if lhs_sign != rhs_sign:
        return lhs_sign - rhs_sign
    lhs = Fraction(dot * dot, nn)
    rhs = cos_bound * cos_bound
    if lhs == rhs:
        return 0
    bigger_sq = 1 if lhs > rhs else -1
    return bigger_sq * (1 if lhs_sign >= 0 else -1)


def longest_simple_path(bs: BiautomaticStructure) -> int:
    paths = _simple_accepted_paths(bs.acceptor)
    return max((len(p) for p in paths), default=0)


def visual_ball_radius(delta: int, epsilon: float) -> int:
    """A radius so any delta-step path outside the ball has visual diameter
    below epsilon: (radius - delta) * sin(epsilon) >= delta."""
    if delta == 0:
        return 0
    return math.ceil(delta / math.sin(min(epsilon, math.pi / 2))) + delta


def verify_visual_approximation(bs: BiautomaticStructure, epsilon: float) -> VerificationReport:
    """Every element in the annulus outside the computed ball must point
    within epsilon of its loop-power combination."""
    if epsilon <= 0:
        raise InputError("epsilon must be positive")
    kind = _require_abelian(bs)
    delta = longest_simple_path(bs)
    radius = visual_ball_radius(delta, epsilon)
    witnesses = []
    checked = 0
    worst = 0.0
    if radius > 0:
        loop_free = {
            loop: bs.evaluate(loop.word)[: kind.rank]
            for loop in _loop_at_state(bs.acceptor).values()
        }
        members = groups.ball(bs.model, 2 * radius).members
        inner = groups.ball(bs.model, radius).members
        for g in members:
            if g in inner:
                continue
            checked += 1
            pnf = path_normal_form(bs, g)
            combo = [0] * kind.rank
            for loop, n in zip(pnf.loops, pnf.exponents):
                e = loop_free[loop]
                for i in range(kind.rank):
                    combo[i] += n * e[i]
            free = g[: kind.rank]
            if not any(free) or not any(combo):
                witnesses.append(("degenerate_ray", g))
                continue
            angle = visual_distance(free, combo)
            worst = max(worst, angle)
            if angle >= epsilon:
                witnesses.append((g, tuple(combo), angle))
    note = f"delta={delta} ball_radius={radius} checked={checked} worst_angle={worst:.6f}"
    return _report("visual_approximation", not witnesses, radius, witnesses, note=note)


def find_quotient_representative(
    bs: BiautomaticStructure,
    z: Element,
    g: Element,
    *,
    qs=None,
    power_cap: int = 100_000,
) -> str:
    """A quotient-language word in g's coset of <z>, found constructively.

    Walk g up the z direction until its ray enters the star of [z] beyond
    the visual ball, read off the normal form's loop powers, and strip the
    positive Z-cycle living on them as often as possible. The result is
    asserted to lie in the quotient language and in the right coset.
    """
    from . import quotient as quotient_mod

    kind = _require_abelian(bs)
    if not bs.model.has_infinite_order(z):
        raise PreconditionError("z must have infinite order")
    if qs is None:
        qs = _cached_quotient(bs, z)
    subdivision = build_subdivision(bs)
    z_dir = direction_of(z[: kind.rank])
    in_star = star(subdivision, z_dir)
    if not in_star:
        raise StructuralError("the direction of z misses the subdivision")

    epsilon = 0.25
    while epsilon > 1e-6:
        word = _representative_attempt(bs, z, g, qs, subdivision, z_dir, epsilon, power_cap)
        if word is not None:
            return word
        epsilon /= 2
    raise StructuralError("no representative found; this contradicts the construction")


def _representative_attempt(bs, z, g, qs, subdivision, z_dir, epsilon, power_cap):
    kind = bs.model.kind
    delta = longest_simple_path(bs)
    radius = visual_ball_radius(delta, epsilon)
    gz = g
    for m in range(1, power_cap + 1):
        gz = bs.model.mul(gz, z)
        free = gz[: kind.rank]
        if not any(free):
            continue
        if visual_distance(free, z_dir.vector) >= epsilon:
            continue
        try:
            if groups.norm(bs.model, gz, cap=4 * radius + 8) <= radius:
                continue
        except ResourceError:
            pass  # far outside the ball
        pnf = path_normal_form(bs, gz)
        support = set(pnf.loops)
        candidate = None
        for zc in qs.positive_cycles:
            if all(cl.loop in support for cl, _ in zc.cycle.terms):
                candidate = zc
                break
        if candidate is None:
            # epsilon was not small enough to force [z] into this simplex
            return None
        full = reconstruct(bs, pnf)
        base, _ = cycles.strip(bs, full, candidate.cycle)
        if not fsa.accepts(qs.structure.acceptor, base.word):
            raise StructuralError(
                f"stripped word {base.word!r} left the quotient language"
            )
        residue = bs.model.mul(bs.model.inv(bs.evaluate(base.word)), g)
        if bs.model.cyclic_exponent(z, residue) is None:
            raise StructuralError(
                f"representative {base.word!r} landed in the wrong coset"
            )
        return base.word
    raise ResourceError(f"no suitable power of z within {power_cap}", cap=power_cap)


@lru_cache(maxsize=8)
def _cached_quotient(bs: BiautomaticStructure, z: Element):
    from . import quotient as quotient_mod

    return quotient_mod.build_quotient(bs, z)


def export_subdivision(subdivision: Subdivision) -> str:
    """Plain-text listing: one simplex per line, vectors separated by ';'."""
    lines = [f"dimension {subdivision.dimension}"]
    counts = {d: len(v) for d, v in subdivision.by_dim().items()}
    lines.append("counts " + " ".join(f"{d}:{n}" for d, n in sorted(counts.items())))
    for s in subdivision.simplices:
        vecs = " ; ".join(" ".join(str(x) for x in d.vector) for d in s.directions)
        lines.append(f"simplex {vecs}")
    return "\n".join(lines) + "\n"
