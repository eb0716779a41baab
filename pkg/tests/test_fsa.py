import pytest
from hypothesis import given, strategies as st

from biaquot import fsa
from biaquot.errors import InputError, ResourceError
from biaquot.fsa import Alphabet, from_rules


@st.composite
def small_automata(draw, letters="ab"):
    n = draw(st.integers(1, 4))
    alphabet = Alphabet.of(letters)
    delta = tuple(
        tuple(draw(st.integers(0, n - 1)) for _ in letters) for _ in range(n)
    )
    accept = frozenset(
        i for i in range(n) if draw(st.booleans())
    )
    return fsa.Automaton(alphabet, tuple(f"s{i}" for i in range(n)), 0, accept, delta)


def all_words(letters, max_len):
    out = [""]
    level = [""]
    for _ in range(max_len):
        level = [w + x for w in level for x in letters]
        out.extend(level)
    return out


# --- run / accepts ---------------------------------------------------------

def test_run_traces(z2):
    M = z2.acceptor
    assert fsa.run(M, "", "S") == ["S"]
    assert fsa.run(M, "ab", "S") == ["S", "Sa", "Sb"]
    assert fsa.run(M, "ba", "S") == ["S", "Sb", "dead"]


def test_run_unknown_letter_names_position(z2):
    with pytest.raises(InputError, match=r"'q'.*position 1"):
        fsa.run(z2.acceptor, "aq")


def test_accepts(z2):
    assert fsa.accepts(z2.acceptor, "ab")
    assert not fsa.accepts(z2.acceptor, "ba")
    assert fsa.accepts(z2.acceptor, "")


# --- liveness ----------------------------------------------------------------

def test_live_states_fixture(z2):
    assert fsa.live_states(z2.acceptor) == {"S", "Sa", "SA", "Sb", "SB"}


def test_live_states_empty_accept(z2):
    M = z2.acceptor
    empty = fsa.Automaton(M.alphabet, M.states, M.start, frozenset(), M.delta)
    assert fsa.live_states(empty) == frozenset()


def test_live_states_all_self_loops():
    M = from_rules(Alphabet.of("ab"), ("q",), "q", ("q",),
                   {("q", "a"): "q", ("q", "b"): "q"})
    assert fsa.live_states(M) == {"q"}


# --- boolean algebra ----------------------------------------------------------

def test_complement_of_everything():
    M = from_rules(Alphabet.of("ab"), ("q",), "q", ("q",),
                   {("q", "a"): "q", ("q", "b"): "q"})
    assert fsa.is_empty_language(fsa.complement(M))


def test_even_runs_intersection():
    # over {a}: even lengths meet lengths >= 1 in even lengths >= 2
    even = from_rules(Alphabet.of("a"), ("e", "o"), "e", ("e",),
                      {("e", "a"): "o", ("o", "a"): "e"})
    nonempty = from_rules(Alphabet.of("a"), ("0", "1"), "0", ("1",),
                          {("0", "a"): "1", ("1", "a"): "1"})
    both = fsa.intersect(even, nonempty)
    got = fsa.enumerate_words(both, 7)
    assert got == ["aa", "aaaa", "aaaaaa"]


def test_language_meets_own_complement_is_empty(z2):
    M = z2.acceptor
    meet = fsa.intersect(M, fsa.complement(M))
    assert fsa.is_empty_language(meet)
    assert fsa.enumerate_words(meet, 8) == []


def test_boolean_alphabet_mismatch(z2, z3):
    with pytest.raises(InputError):
        fsa.intersect(z2.acceptor, z3.acceptor)


@given(small_automata(), small_automata(), st.sampled_from(["intersect", "union", "difference"]))
def test_boolean_semantics_exhaustive(m1, m2, op):
    out = fsa.boolean(m1, m2, op)
    pyop = {"intersect": lambda a, b: a and b,
            "union": lambda a, b: a or b,
            "difference": lambda a, b: a and not b}[op]
    for w in all_words("ab", 5):
        assert fsa.accepts(out, w) == pyop(fsa.accepts(m1, w), fsa.accepts(m2, w))


# --- minimization ---------------------------------------------------------------

def test_minimize_fixture_counts(z2):
    m = fsa.minimize(z2.acceptor)
    assert m.n_states == 6
    assert fsa.minimize(m).n_states == 6


def test_minimize_canonical_for_same_language():
    # two different acceptors for the finite language {"", "ab"}
    a1 = from_rules(Alphabet.of("ab"), ("0", "1", "2"), "0", ("0", "2"),
                    {("0", "a"): "1", ("1", "b"): "2"})
    a2 = from_rules(Alphabet.of("ab"), ("u", "v", "w", "x"), "u", ("u", "w"),
                    {("u", "a"): "v", ("v", "b"): "w", ("w", "a"): "x"})
    assert fsa.minimize(a1) == fsa.minimize(a2)


@given(small_automata())
def test_minimize_preserves_language(m):
    mm = fsa.minimize(m)
    for w in all_words("ab", 6):
        assert fsa.accepts(m, w) == fsa.accepts(mm, w)
    assert mm.n_states <= m.n_states


# --- loops -----------------------------------------------------------------------

def test_simple_loops_fixture(z2):
    loops = fsa.enumerate_simple_loops(z2.acceptor, live_only=True)
    assert [(l.word, z2.acceptor.states[l.base]) for l in loops] == [
        ("a", "Sa"), ("A", "SA"), ("b", "Sb"), ("B", "SB"),
    ]


def test_simple_loops_finite_language():
    # completion adds a sink self-loop, but no live state lies on a loop
    M = from_rules(Alphabet.of("a"), ("0", "1"), "0", ("1",), {("0", "a"): "1"})
    assert fsa.enumerate_simple_loops(M, live_only=True) == ()
    assert [l.word for l in fsa.enumerate_simple_loops(M, live_only=False)] == ["a"]


def test_simple_loops_parallel_self_loops():
    M = from_rules(Alphabet.of("ab"), ("q",), "q", ("q",),
                   {("q", "a"): "q", ("q", "b"): "q"})
    loops = fsa.enumerate_simple_loops(M)
    assert sorted(l.word for l in loops) == ["a", "b"]


def test_loop_canonical_rotation_identifies_cycles():
    # 2-state cycle read from either base canonicalizes identically
    M = from_rules(Alphabet.of("ab"), ("0", "1"), "0", ("0",),
                   {("0", "a"): "1", ("1", "b"): "0"})
    l1 = fsa.make_loop(M, "ab", "0")
    l2 = fsa.make_loop(M, "ba", "1")
    assert l1 == l2


def test_loop_cap():
    # complete 2-letter graph on 5 states has plenty of simple loops
    n = 5
    alphabet = Alphabet.of("ab")
    delta = tuple(((s + 1) % n, (s + 2) % n) for s in range(n))
    M = fsa.Automaton(alphabet, tuple(f"s{i}" for i in range(n)), 0,
                      frozenset(range(n)), delta)
    with pytest.raises(ResourceError):
        fsa.enumerate_simple_loops(M, cap=3)


# --- word enumeration ---------------------------------------------------------------

def test_enumerate_words_fixture(z2):
    M = z2.acceptor
    assert fsa.enumerate_words(M, 0) == [""]
    assert fsa.enumerate_words(M, 2) == [
        "", "a", "A", "b", "B",
        "aa", "ab", "aB", "AA", "Ab", "AB", "bb", "BB",
    ]


def test_enumerate_words_empty_language(z2):
    M = z2.acceptor
    empty = fsa.Automaton(M.alphabet, M.states, M.start, frozenset(), M.delta)
    assert fsa.enumerate_words(empty, 5) == []


@given(small_automata())
def test_enumerate_words_matches_acceptance(m):
    got = fsa.enumerate_words(m, 5)
    expected = [w for w in all_words("ab", 5) if fsa.accepts(m, w)]
    assert sorted(got, key=lambda w: (len(w), w)) == expected
    assert got == sorted(got, key=lambda w: (len(w), [m.alphabet.index(x) for x in w]))


def test_determinism(z2):
    M = z2.acceptor
    assert fsa.enumerate_words(M, 6) == fsa.enumerate_words(M, 6)
    assert fsa.run(M, "aabb") == fsa.run(M, "aabb")
