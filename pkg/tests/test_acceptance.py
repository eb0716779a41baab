"""Acceptance suite: one test per criterion, each printing a PASS line.

Every check is exact (tolerance zero): languages are compared word for
word, constants and counts by equality, and inequalities as stated. Run
with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.
"""

import dataclasses
import itertools
import random

import pytest

from biaquot import cycles, fan, fsa, groups, quotient, structures
from biaquot.errors import PreconditionError
from biaquot.fsa import Alphabet, from_rules


FIXTURES = [("Z2", (1, 1)), ("Z3", (1, 1, 1)), ("F2xZ", ((), (1,)))]


def _ok(number, name):
    print(f"ACCEPTANCE {number:02d} {name}: PASS")


def test_01_fixture_soundness():
    for name, _ in FIXTURES:
        bs = structures.builtin(name)
        assert structures.verify_surjectivity(bs, 6).passed, name
        assert structures.verify_uniqueness(bs, 10).passed, name
        travel = structures.verify_fellow_traveller(bs, 10)
        assert travel.passed and travel.measured <= bs.k, name
        assert cycles.check_simplicity(bs).passed, name
        loops = cycles.find_central_loops(bs)
        for live_set in cycles.enumerate_live_sets(bs, loops):
            assert cycles.check_independence(bs, live_set).passed, name
    _ok(1, "fixture soundness")


def test_02_quotient_construction_z2():
    bs = structures.builtin("Z2")
    qs = quotient.build_quotient(bs, (1, 1))
    words = set(fsa.enumerate_words(qs.structure.acceptor, 12))
    expected = {"a" + "b" * j for j in range(1, 12)} | {"a" * i + "b" for i in range(1, 12)}
    assert words == expected
    reps = {}
    for w in sorted(words, key=len):
        (v,) = qs.structure.evaluate(w)
        reps.setdefault(v, []).append(w)
    for v in range(-6, 7):
        assert len(reps[v]) == 1, (v, reps.get(v))
    _ok(2, "quotient language on Z2")


def test_03_quotient_construction_f2z():
    bs = structures.builtin("F2xZ")
    qs = quotient.build_quotient(bs, ((), (1,)))
    inverse = {"x": "X", "X": "x", "y": "Y", "Y": "y"}
    words = fsa.enumerate_words(qs.structure.acceptor, 8)
    for w in words:
        r = w[:-1]
        assert w.endswith("z") and "Z" not in w and "z" not in r
        assert all(inverse[a] != b for a, b in zip(r, r[1:]))
    assert len(words) == 1 + sum(4 * 3 ** (i - 1) for i in range(1, 8))
    # free factor recovered: the quotient covers the whole radius-6 ball
    covered = {qs.structure.evaluate(w) for w in words}
    assert groups.ball(qs.structure.model, 6).members <= covered
    _ok(3, "quotient language on F2xZ (direct factor demo)")


def test_04_formula_matches_path_predicate():
    for name, z in FIXTURES:
        bs = structures.builtin(name)
        qs = quotient.build_quotient(bs, z)
        for w in fsa.enumerate_words(bs.acceptor, 10):
            p = fsa.path(bs.acceptor, w)
            visited = set(p.visited)
            compatible = any(
                all(visited & cl.states for cl, _ in zc.cycle.terms)
                for zc in qs.positive_cycles
            )
            contains_any = any(
                cycles.contains(bs, p, zc.cycle) for zc in qs.all_cycles
            )
            assert fsa.accepts(qs.structure.acceptor, w) == (compatible and not contains_any), w
    _ok(4, "regular construction equals the path predicate")


def test_05_splice_strip_calculus():
    for name, z in FIXTURES:
        bs = structures.builtin(name)
        model = bs.model
        for zc in cycles.find_primitive_z_cycles(bs, z):
            c = zc.cycle
            for w in fsa.enumerate_words(bs.acceptor, 6):
                p = fsa.path(bs.acceptor, w)
                try:
                    sp = cycles.splice(bs, p, c)
                except PreconditionError:
                    continue
                assert fsa.accepts(bs.acceptor, sp.word)
                assert bs.evaluate(sp.word) == model.mul(bs.evaluate(w), c.element)
                base0, m0 = cycles.strip(bs, p, c)
                base1, m1 = cycles.strip(bs, sp, c)
                assert m1 == m0 + 1 and base1.word == base0.word
    _ok(5, "splice/strip calculus")


def test_06_lemma_suite():
    # at most one compatible primitive Z-cycle per accepted word
    for name, z in FIXTURES:
        bs = structures.builtin(name)
        zcs = cycles.find_primitive_z_cycles(bs, z)
        for w in fsa.enumerate_words(bs.acceptor, 10):
            visited = set(fsa.path(bs.acceptor, w).visited)
            compatible = [
                zc for zc in zcs
                if all(visited & cl.states for cl, _ in zc.cycle.terms)
            ]
            assert len(compatible) <= 1, (name, w)
    # documented mutations fail
    z2 = structures.builtin("Z2")
    dead_accepting = structures.with_accept_states(z2, z2.acceptor.states)
    assert not cycles.check_simplicity(dead_accepting).passed
    assert not structures.verify_uniqueness(dead_accepting, 2).passed
    alphabet = Alphabet.of("aAbB")
    single = from_rules(alphabet, ("q",), "q", ("q",),
                        {("q", x): "q" for x in "aAbB"})
    single_bs = dataclasses.replace(z2, acceptor=single)
    assert not cycles.check_simplicity(single_bs).passed
    assert not structures.verify_uniqueness(single_bs, 2).passed
    _ok(6, "uniqueness corollary and negative tests")


def test_07_subdivision_at_infinity():
    z2 = structures.builtin("Z2")
    sub2 = fan.build_subdivision(z2)
    assert {d: len(v) for d, v in sub2.by_dim().items()} == {0: 4, 1: 4}
    z3 = structures.builtin("Z3")
    sub3 = fan.build_subdivision(z3)
    assert {d: len(v) for d, v in sub3.by_dim().items()} == {0: 6, 1: 12, 2: 8}
    assert fan.verify_subdivision(sub2, 8).passed
    assert fan.verify_subdivision(sub3, 8).passed
    for eps in (0.5, 0.01):
        assert fan.verify_visual_approximation(z2, eps).passed
    # rank 3 at eps 0.01 would sweep ~3e8 lattice points; checked at 0.5
    assert fan.verify_visual_approximation(z3, 0.5).passed
    _ok(7, "subdivision combinatorics and visual checks")


def test_08_bound_chain_and_dominance():
    z2 = structures.builtin("Z2")
    b = quotient.compute_bound(z2, (1, 1))
    assert b.k1 == (b.max_exponent * b.z_length + 2) * b.k == 8
    assert b.ball_size == 145 and b.state_count == 5
    assert b.b == b.max_exponent * b.global_bound * (b.ball_size * b.state_count + 1) + b.max_exponent == 727
    assert b.k_prime == (b.b * b.z_length + 2) * b.k == 2912
    bounds = {"Z2": (6, 12), "Z3": (3, 12), "F2xZ": (6, 8)}
    for name, z in FIXTURES:
        bs = structures.builtin(name)
        qs = quotient.build_quotient(bs, z)
        radius, max_len = bounds[name]
        report = quotient.verify_quotient(qs, radius, max_len)
        assert report.passed, (name, report)
        assert report.measured <= qs.bound.k_prime
    _ok(8, "explicit bound chain dominates the measured constant")


def test_09_quotient_tower():
    z2 = structures.builtin("Z2")
    result = quotient.central_quotient_tower(z2, [(1, 0), (0, 1)])
    assert [s.kind for s in result.steps] == ["peel", "peel"]
    final = result.final
    assert final.model.kind == groups.FreeAbelian(0)
    assert fsa.enumerate_words(final.acceptor, 8) == ["ab"]

    z3 = structures.builtin("Z3")
    result = quotient.central_quotient_tower(z3, [(1, 1, 1)])
    assert len(result.steps) == 1
    plane = result.final
    assert plane.model.kind == groups.FreeAbelian(2)
    assert structures.verify_uniqueness(plane, 8).passed
    assert structures.verify_fellow_traveller(plane, 8).passed
    assert structures.verify_surjectivity(plane, 4, slack=11).passed
    assert cycles.check_simplicity(plane).passed
    loops = cycles.find_central_loops(plane)
    for live_set in cycles.enumerate_live_sets(plane, loops):
        assert cycles.check_independence(plane, live_set).passed
    _ok(9, "central quotient tower")


def test_10_fsa_algebra_against_enumeration():
    rng = random.Random(20250810)
    alphabet = Alphabet.of("ab")
    all_words = [""]
    level = [""]
    for _ in range(8):
        level = [w + x for w in level for x in "ab"]
        all_words.extend(level)

    def random_automaton():
        n = rng.randint(1, 4)
        delta = tuple(
            tuple(rng.randrange(n) for _ in range(2)) for _ in range(n)
        )
        accept = frozenset(i for i in range(n) if rng.random() < 0.5)
        return fsa.Automaton(alphabet, tuple(f"s{i}" for i in range(n)), 0, accept, delta)

    for _ in range(20):
        m1, m2 = random_automaton(), random_automaton()
        member1 = {w: fsa.accepts(m1, w) for w in all_words}
        member2 = {w: fsa.accepts(m2, w) for w in all_words}
        for op, pyop in [
            ("intersect", lambda a, b: a and b),
            ("union", lambda a, b: a or b),
            ("difference", lambda a, b: a and not b),
        ]:
            out = fsa.boolean(m1, m2, op)
            for w in all_words:
                assert fsa.accepts(out, w) == pyop(member1[w], member2[w])
        comp = fsa.complement(m1)
        mini = fsa.minimize(m1)
        for w in all_words:
            assert fsa.accepts(comp, w) == (not member1[w])
            assert fsa.accepts(mini, w) == member1[w]
        assert fsa.minimize(mini) == mini
    _ok(10, "automaton algebra matches enumeration oracles")