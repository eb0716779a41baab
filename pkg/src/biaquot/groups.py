"""Exact computable group models and their word geometry.

Three model kinds are supported: free abelian groups with optional finite
torsion, free groups, and direct products of models. Elements are nested
tuples so they hash and compare structurally:

* free abelian: a flat integer tuple, free coordinates first, then one
  residue in [0, m) per torsion order m;
* free: a reduced tuple of signed generator indices (+i and -i are inverse
  letters, never adjacent);
* product: a pair (left element, right element).

A GroupModel couples a kind with the images of the alphabet letters, which
induces the evaluation homomorphism from words and the word metric.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .errors import InputError, PreconditionError, ResourceError
from . import intlinalg

Element = tuple

DEFAULT_DISTANCE_CAP = 64
BALL_MEMBER_CAP = 5_000_000


@dataclass(frozen=True)
class FreeAbelian:
    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise InputError("rank must be non-negative")
        if any(m < 2 for m in self.torsion):
            raise InputError("torsion orders must be at least 2")

    @property
    def width(self) -> int:
        return self.rank + len(self.torsion)

    def identity(self) -> Element:
        return (0,) * self.width

    def mul(self, a: Element, b: Element) -> Element:
        k = self.rank
        free = tuple(x + y for x, y in zip(a[:k], b[:k]))
        tors = tuple((x + y) % m for x, y, m in zip(a[k:], b[k:], self.torsion))
        return free + tors

    def inv(self, a: Element) -> Element:
        k = self.rank
        return tuple(-x for x in a[:k]) + tuple((-x) % m for x, m in zip(a[k:], self.torsion))

    def is_central(self, a: Element) -> bool:
        return True

    def infinite_order(self, a: Element) -> bool:
        return any(a[: self.rank])

    def validate(self, a) -> None:
        if not (isinstance(a, tuple) and len(a) == self.width and all(isinstance(x, int) for x in a)):
            raise InputError(f"expected an integer {self.width}-tuple, got {a!r}")
        for x, m in zip(a[self.rank:], self.torsion):
            if not 0 <= x < m:
                raise InputError(f"torsion residue {x} out of range for order {m}")


@dataclass(frozen=True)
class Free:
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise InputError("rank must be non-negative")

    def identity(self) -> Element:
        return ()

    def mul(self, a: Element, b: Element) -> Element:
        out = list(a)
        for s in b:
            if out and out[-1] == -s:
                out.pop()
            else:
                out.append(s)
        return tuple(out)

    def inv(self, a: Element) -> Element:
        return tuple(-s for s in reversed(a))

    def is_central(self, a: Element) -> bool:
        return self.rank <= 1 or a == ()

    def infinite_order(self, a: Element) -> bool:
        return a != ()

    def validate(self, a) -> None:
        if not isinstance(a, tuple):
            raise InputError(f"expected a tuple of signed indices, got {a!r}")
        for s in a:
            if not isinstance(s, int) or s == 0 or abs(s) > self.rank:
                raise InputError(f"generator index {s} out of range for rank {self.rank}")
        if any(a[i] == -a[i + 1] for i in range(len(a) - 1)):
            raise InputError(f"word {a!r} is not freely reduced")


@dataclass(frozen=True)
class DirectProduct:
    left: "GroupKind"
    right: "GroupKind"

    def identity(self) -> Element:
        return (self.left.identity(), self.right.identity())

    def mul(self, a: Element, b: Element) -> Element:
        return (self.left.mul(a[0], b[0]), self.right.mul(a[1], b[1]))

    def inv(self, a: Element) -> Element:
        return (self.left.inv(a[0]), self.right.inv(a[1]))

    def is_central(self, a: Element) -> bool:
        return self.left.is_central(a[0]) and self.right.is_central(a[1])

    def infinite_order(self, a: Element) -> bool:
        return self.left.infinite_order(a[0]) or self.right.infinite_order(a[1])

    def validate(self, a) -> None:
        if not (isinstance(a, tuple) and len(a) == 2):
            raise InputError(f"expected a pair, got {a!r}")
        self.left.validate(a[0])
        self.right.validate(a[1])


GroupKind = FreeAbelian | Free | DirectProduct


def is_abelian(kind: GroupKind) -> bool:
    if isinstance(kind, FreeAbelian):
        return True
    if isinstance(kind, Free):
        return kind.rank <= 1
    return is_abelian(kind.left) and is_abelian(kind.right)


def is_trivial(kind: GroupKind) -> bool:
    if isinstance(kind, FreeAbelian):
        return kind.width == 0
    if isinstance(kind, Free):
        return kind.rank == 0
    return is_trivial(kind.left) and is_trivial(kind.right)


# --- center presentation -------------------------------------------------
#
# The center of every model is presented as Z^kc + (finite torsion), and
# center_coords writes a central element in those coordinates (free row,
# torsion row). This is the lattice the cycle computations work in.

def center_shape(kind: GroupKind) -> tuple[int, tuple[int, ...]]:
    if isinstance(kind, FreeAbelian):
        return kind.rank, kind.torsion
    if isinstance(kind, Free):
        return (1, ()) if kind.rank == 1 else (0, ())
    lf, lt = center_shape(kind.left)
    rf, rt = center_shape(kind.right)
    return lf + rf, lt + rt


def center_coords(kind: GroupKind, a: Element) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if not kind.is_central(a):
        raise PreconditionError(f"element {a!r} is not central")
    if isinstance(kind, FreeAbelian):
        return a[: kind.rank], a[kind.rank:]
    if isinstance(kind, Free):
        if kind.rank == 1:
            return (sum(1 if s > 0 else -1 for s in a),), ()
        return (), ()
    lf, lt = center_coords(kind.left, a[0])
    rf, rt = center_coords(kind.right, a[1])
    return lf + rf, lt + rt


def element_from_center_coords(kind: GroupKind, free, tors) -> Element:
    if isinstance(kind, FreeAbelian):
        return tuple(free) + tuple(t % m for t, m in zip(tors, kind.torsion))
    if isinstance(kind, Free):
        if kind.rank == 1:
            n = free[0]
            return (1,) * n if n >= 0 else (-1,) * (-n)
        return ()
    lf, ltors = center_shape(kind.left)
    lt = len(ltors)
    left = element_from_center_coords(kind.left, free[:lf], tors[:lt])
    right = element_from_center_coords(kind.right, free[lf:], tors[lt:])
    return (left, right)


# --- discrete logarithm along a cyclic subgroup ---------------------------
#
# Solution sets of g = z^e are represented as None (empty) or (base, step):
# step == 0 is the single point {base}; step >= 1 is base + step*Z.

def _sol_member(x: int, sol) -> bool:
    base, step = sol
    return x == base if step == 0 else (x - base) % step == 0


def _sol_meet(p, q):
    if p is None or q is None:
        return None
    a1, d1 = p
    a2, d2 = q
    if d1 == 0:
        return p if _sol_member(a1, q) else None
    if d2 == 0:
        return q if _sol_member(a2, p) else None
    g = gcd(d1, d2)
    if (a2 - a1) % g:
        return None
    lcm = d1 // g * d2
    # a1 + d1*t == a2 (mod d2)  =>  t == (a2-a1)/g * inv(d1/g) (mod d2/g)
    m = d2 // g
    t = ((a2 - a1) // g * pow(d1 // g, -1, m)) % m if m > 1 else 0
    return ((a1 + d1 * t) % lcm, lcm)


def _exponent_solutions(kind: GroupKind, z: Element, g: Element):
    if isinstance(kind, FreeAbelian):
        sol = (0, 1)
        for i in range(kind.rank):
            if z[i] == 0:
                if g[i] != 0:
                    return None
            else:
                if g[i] % z[i]:
                    return None
                sol = _sol_meet(sol, (g[i] // z[i], 0))
        for x, y, m in zip(z[kind.rank:], g[kind.rank:], kind.torsion):
            d = gcd(x, m)
            if y % d:
                return None
            mm = m // d
            base = (y // d * pow(x // d, -1, mm)) % mm if mm > 1 else 0
            sol = _sol_meet(sol, (base, mm))
        return sol
    if isinstance(kind, Free):
        if z == ():
            return (0, 1) if g == () else None
        for direction in (1, -1):
            zz = z if direction == 1 else kind.inv(z)
            p = ()
            e = 0
            while len(p) <= len(g):
                if p == g:
                    return (direction * e, 0)
                p = kind.mul(p, zz)
                e += 1
        return None
    sol = _sol_meet(
        _exponent_solutions(kind.left, z[0], g[0]),
        _exponent_solutions(kind.right, z[1], g[1]),
    )
    return sol


# --- models ---------------------------------------------------------------

@dataclass(frozen=True)
class GroupModel:
    """A group kind together with the images of the alphabet letters."""

    kind: GroupKind
    gens: tuple[tuple[str, Element], ...]

    @property
    def generator_map(self) -> dict[str, Element]:
        return dict(self.gens)

    def image(self, letter: str) -> Element:
        img = _image_map(self).get(letter)
        if img is None:
            raise InputError(f"letter {letter!r} has no generator image")
        return img

    def identity(self) -> Element:
        return self.kind.identity()

    def mul(self, a: Element, b: Element) -> Element:
        return self.kind.mul(a, b)

    def inv(self, a: Element) -> Element:
        return self.kind.inv(a)

    def evaluate(self, word: str) -> Element:
        """Image of a word under the induced monoid homomorphism."""
        imgs = _image_map(self)
        out = self.kind.identity()
        for i, x in enumerate(word):
            img = imgs.get(x)
            if img is None:
                raise InputError(f"letter {x!r} at position {i} has no generator image")
            out = self.kind.mul(out, img)
        return out

    def is_central(self, g: Element) -> bool:
        return self.kind.is_central(g)

    def has_infinite_order(self, g: Element) -> bool:
        return self.kind.infinite_order(g)

    def cyclic_exponent(self, z: Element, g: Element) -> int | None:
        """The exponent e with g = z^e, if one exists. z must have infinite order."""
        if not self.kind.infinite_order(z):
            raise PreconditionError("cyclic_exponent requires z of infinite order")
        sol = _exponent_solutions(self.kind, z, g)
        if sol is None:
            return None
        base, step = sol
        if step != 0:
            raise PreconditionError("exponent is not unique; z has finite order")
        return base


@lru_cache(maxsize=None)
def _image_map(model: GroupModel) -> dict[str, Element]:
    return dict(model.gens)


def evaluate(model: GroupModel, word: str) -> Element:
    return model.evaluate(word)


def is_central(model: GroupModel, g: Element) -> bool:
    return model.is_central(g)


def cyclic_exponent(model: GroupModel, z: Element, g: Element) -> int | None:
    return model.cyclic_exponent(z, g)


# --- word metric ----------------------------------------------------------

@dataclass(frozen=True)
class Ball:
    radius: int
    members: frozenset

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, g) -> bool:
        return g in self.members


@lru_cache(maxsize=32)
def _norm_map(model: GroupModel, radius: int, max_members: int) -> dict:
    """BFS word norms out to `radius` over the letter images."""
    images = [img for _, img in model.gens]
    dist = {model.identity(): 0}
    frontier = [model.identity()]
    for r in range(1, radius + 1):
        nxt = []
        for g in frontier:
            for img in images:
                h = model.mul(g, img)
                if h not in dist:
                    dist[h] = r
                    nxt.append(h)
        if len(dist) > max_members:
            raise ResourceError(
                f"ball of radius {radius} exceeds {max_members} members",
                cap=max_members,
            )
        if not nxt:
            break
        frontier = nxt
    return dist


def ball(model: GroupModel, radius: int, *, max_members: int = BALL_MEMBER_CAP) -> Ball:
    """Exact closed ball of the word metric around the identity."""
    if radius < 0:
        raise InputError("radius must be non-negative")
    return Ball(radius, frozenset(_norm_map(model, radius, max_members)))


def _bidirectional_distance(model: GroupModel, src: Element, dst: Element, cap: int) -> int:
    if src == dst:
        return 0
    images = [img for _, img in model.gens]
    inverses = [model.inv(img) for img in images]
    fwd = {src: 0}
    bwd = {dst: 0}
    f_frontier, b_frontier = [src], [dst]
    rf = rb = 0
    while rf + rb < cap:
        if not f_frontier and not b_frontier:
            break
        expand_fwd = len(fwd) <= len(bwd) if f_frontier else False
        if not b_frontier:
            expand_fwd = True
        if expand_fwd:
            rf += 1
            nxt = []
            for g in f_frontier:
                for img in images:
                    h = model.mul(g, img)
                    if h not in fwd:
                        fwd[h] = rf
                        if h in bwd:
                            return rf + bwd[h]
                        nxt.append(h)
            f_frontier = nxt
        else:
            rb += 1
            nxt = []
            for g in b_frontier:
                for inv in inverses:
                    h = model.mul(g, inv)
                    if h not in bwd:
                        bwd[h] = rb
                        if h in fwd:
                            return rb + fwd[h]
                        nxt.append(h)
            b_frontier = nxt
    raise ResourceError(f"distance overflow: no path within radius {cap}", cap=cap)


def norm(model: GroupModel, g: Element, *, cap: int = DEFAULT_DISTANCE_CAP) -> int:
    """Word length |g| = min length of a word evaluating to g."""
    table = _norm_map(model, 4, BALL_MEMBER_CAP)
    if g in table:
        return table[g]
    return _bidirectional_distance(model, model.identity(), g, cap)


def distance(model: GroupModel, g: Element, h: Element, *, cap: int = DEFAULT_DISTANCE_CAP) -> int:
    """Word metric d(g, h) = |g^-1 h|."""
    return norm(model, model.mul(model.inv(g), h), cap=cap)


# --- central coordinates --------------------------------------------------

@dataclass(frozen=True)
class CenterCoordinates:
    free_rank: int
    torsion_orders: tuple[int, ...]
    free_rows: tuple[tuple[int, ...], ...]
    torsion_rows: tuple[tuple[int, ...], ...]


def central_coordinates(model: GroupModel, gs) -> CenterCoordinates:
    """Coordinates of central elements in the model's center presentation."""
    kc, torsion = center_shape(model.kind)
    free_rows = []
    torsion_rows = []
    for g in gs:
        f, t = center_coords(model.kind, g)
        free_rows.append(f)
        torsion_rows.append(t)
    return CenterCoordinates(kc, torsion, tuple(free_rows), tuple(torsion_rows))


# --- quotients by central subgroups ---------------------------------------

def _flatten_abelian(kind: GroupKind):
    """(FreeAbelian presentation, element -> flat tuple, flat tuple -> element)."""
    if isinstance(kind, FreeAbelian):
        return kind, (lambda e: e), (lambda v: v)
    if isinstance(kind, Free):
        if kind.rank == 0:
            return FreeAbelian(0), (lambda e: ()), (lambda v: ())
        if kind.rank == 1:
            def to_flat(e):
                return (sum(1 if s > 0 else -1 for s in e),)

            def from_flat(v):
                n = v[0]
                return (1,) * n if n >= 0 else (-1,) * (-n)

            return FreeAbelian(1), to_flat, from_flat
        raise InputError("free groups of rank >= 2 are not abelian")
    lk, lto, lfrom = _flatten_abelian(kind.left)
    rk, rto, rfrom = _flatten_abelian(kind.right)
    fa = FreeAbelian(lk.rank + rk.rank, lk.torsion + rk.torsion)

    def to_flat(e):
        lf = lto(e[0])
        rf = rto(e[1])
        return (lf[: lk.rank] + rf[: rk.rank] + lf[lk.rank:] + rf[rk.rank:])

    def from_flat(v):
        lf = v[: lk.rank] + v[fa.rank: fa.rank + len(lk.torsion)]
        rf = v[lk.rank: fa.rank] + v[fa.rank + len(lk.torsion):]
        return (lfrom(lf), rfrom(rf))

    return fa, to_flat, from_flat


def _abelian_quotient(fa: FreeAbelian, relations):
    rows = []
    for i, m in enumerate(fa.torsion):
        row = [0] * fa.width
        row[fa.rank + i] = m
        rows.append(tuple(row))
    rows.extend(tuple(r) for r in relations)
    rows = [r for r in rows if any(r)]
    if not rows:
        return fa, (lambda e: e)
    _, D, V = intlinalg.smith_normal_form(rows)
    n = fa.width
    diag = [D[i][i] if i < len(rows) else 0 for i in range(n)]
    free_pos = [j for j in range(n) if diag[j] == 0]
    tors_pos = [j for j in range(n) if diag[j] >= 2]
    new = FreeAbelian(len(free_pos), tuple(diag[j] for j in tors_pos))

    def project(e):
        y = [sum(e[i] * V[i][j] for i in range(n)) for j in range(n)]
        return tuple(y[j] for j in free_pos) + tuple(y[j] % diag[j] for j in tors_pos)

    return new, project


def quotient_by_central(kind: GroupKind, relations) -> tuple[GroupKind, "object"]:
    """Quotient of the group by the central subgroup the relations generate.

    Returns the new kind and a projection mapping old elements to new ones.
    Relations living in one factor of a product quotient that factor alone;
    fully abelian models are flattened first.
    """
    for r in relations:
        if not kind.is_central(r):
            raise PreconditionError(f"relation {r!r} is not central")
    relations = [r for r in relations if r != kind.identity()]
    if not relations:
        return kind, (lambda e: e)
    if isinstance(kind, FreeAbelian):
        return _abelian_quotient(kind, relations)
    if isinstance(kind, DirectProduct):
        left_parts = [r[0] for r in relations]
        right_parts = [r[1] for r in relations]
        left_trivial = all(x == kind.left.identity() for x in left_parts)
        right_trivial = all(x == kind.right.identity() for x in right_parts)
        if right_trivial:
            qleft, pleft = quotient_by_central(kind.left, left_parts)
            if is_trivial(qleft):
                return kind.right, (lambda e: e[1])
            return DirectProduct(qleft, kind.right), (lambda e: (pleft(e[0]), e[1]))
        if left_trivial:
            qright, pright = quotient_by_central(kind.right, right_parts)
            if is_trivial(qright):
                return kind.left, (lambda e: e[0])
            return DirectProduct(kind.left, qright), (lambda e: (e[0], pright(e[1])))
        if is_abelian(kind):
            fa, to_flat, _ = _flatten_abelian(kind)
            q, p = _abelian_quotient(fa, [to_flat(r) for r in relations])
            return q, (lambda e: p(to_flat(e)))
        raise InputError("central quotient across mixed product factors is not supported")
    if isinstance(kind, Free):
        if kind.rank <= 1:
            fa, to_flat, _ = _flatten_abelian(kind)
            q, p = _abelian_quotient(fa, [to_flat(r) for r in relations])
            return q, (lambda e: p(to_flat(e)))
        # Central relations in a non-abelian free group are trivial; handled above.
        raise PreconditionError("non-trivial central relations are impossible here")
    raise InputError(f"unsupported group kind {kind!r}")


def quotient_model(model: GroupModel, relations) -> tuple[GroupModel, "object"]:
    """Quotient model with letter images projected along the quotient map."""
    new_kind, project = quotient_by_central(model.kind, relations)
    gens = tuple((letter, project(img)) for letter, img in model.gens)
    return GroupModel(new_kind, gens), project


# --- generation sanity check ----------------------------------------------

def generates(kind: GroupKind, images) -> bool:
    """Desk-scale check that the images generate the whole group."""
    if isinstance(kind, FreeAbelian):
        q, _ = _abelian_quotient(kind, [tuple(img) for img in images])
        return is_trivial(q)
    if isinstance(kind, Free):
        if kind.rank == 0:
            return True
        if kind.rank == 1:
            return generates(FreeAbelian(1), [(sum(1 if s > 0 else -1 for s in e),) for e in images])
        # Conservative criterion: each generator appears (up to sign) as a
        # single-symbol image.
        singles = {e[0] for e in images if len(e) == 1}
        return all({i, -i} & singles for i in range(1, kind.rank + 1))
    return generates(kind.left, [e[0] for e in images]) and generates(
        kind.right, [e[1] for e in images]
    )
