"""Complete deterministic finite automata over ordered finite alphabets.

Every automaton is total: each state has exactly one outgoing edge per
letter. Partial transition tables supplied by callers are completed with a
non-accepting sink. Alphabet letters are single printable characters, so a
word is just a Python string; the alphabet's declared order (not codepoint
order) is used wherever words or loops are compared lexicographically.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .errors import InputError, ResourceError

DEFAULT_LOOP_CAP = 10_000


@dataclass(frozen=True)
class Alphabet:
    letters: tuple[str, ...]

    def __post_init__(self):
        if not self.letters:
            raise InputError("alphabet must be non-empty")
        if len(set(self.letters)) != len(self.letters):
            raise InputError("alphabet letters must be distinct")
        for x in self.letters:
            if len(x) != 1 or not x.isprintable() or x.isspace():
                raise InputError(f"letters must be single printable characters, got {x!r}")

    @classmethod
    def of(cls, letters: str) -> "Alphabet":
        return cls(tuple(letters))

    def __iter__(self):
        return iter(self.letters)

    def __len__(self):
        return len(self.letters)

    def __contains__(self, letter) -> bool:
        return letter in _letter_positions(self)

    def index(self, letter: str) -> int:
        try:
            return _letter_positions(self)[letter]
        except KeyError:
            raise InputError(f"unknown letter {letter!r}") from None

    def word_key(self, word: str) -> tuple[int, ...]:
        return tuple(self.index(x) for x in word)


@lru_cache(maxsize=None)
def _letter_positions(alphabet: Alphabet) -> dict[str, int]:
    return {x: i for i, x in enumerate(alphabet.letters)}


@dataclass(frozen=True)
class Automaton:
    """Complete DFA: states are indexed, delta[s][i] is the i-th letter's target."""

    alphabet: Alphabet
    states: tuple[str, ...]
    start: int
    accept: frozenset[int]
    delta: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.states)
        if n == 0:
            raise InputError("automaton needs at least one state")
        if len(set(self.states)) != n:
            raise InputError("duplicate state names")
        if not 0 <= self.start < n:
            raise InputError("start state out of range")
        if any(not 0 <= s < n for s in self.accept):
            raise InputError("accept state out of range")
        if len(self.delta) != n or any(len(row) != len(self.alphabet) for row in self.delta):
            raise InputError("transition table must cover every state and letter")
        if any(not 0 <= t < n for row in self.delta for t in row):
            raise InputError("transition target out of range")

    @property
    def n_states(self) -> int:
        return len(self.states)

    def state_index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise InputError(f"unknown state {name!r}") from None

    def step(self, state: int, letter: str) -> int:
        return self.delta[state][self.alphabet.index(letter)]


def from_rules(alphabet, states, start, accept, rules, *, sink_name="dead") -> Automaton:
    """Build an automaton from a partial rule map (state, letter) -> state.

    Missing transitions are sent to `sink_name`, which is appended as a fresh
    non-accepting sink unless a state of that name already exists.
    """
    if not isinstance(alphabet, Alphabet):
        alphabet = Alphabet(tuple(alphabet))
    names = list(states)
    pos = {s: i for i, s in enumerate(names)}
    if len(pos) != len(names):
        raise InputError("duplicate state names")
    for (s, x), t in rules.items():
        for name in (s, t):
            if name not in pos:
                raise InputError(f"transition references unknown state {name!r}")
        if x not in alphabet:
            raise InputError(f"transition uses unknown letter {x!r}")
    missing = any((s, x) not in rules for s in names for x in alphabet)
    if missing and sink_name not in pos:
        pos[sink_name] = len(names)
        names.append(sink_name)
    sink = pos.get(sink_name)
    delta = tuple(
        tuple(pos[rules[(s, x)]] if (s, x) in rules else sink for x in alphabet)
        for s in names
    )
    if start not in pos:
        raise InputError(f"start state {start!r} is not a declared state")
    bad = [a for a in accept if a not in pos]
    if bad:
        raise InputError(f"accept states {bad} are not declared states")
    return Automaton(alphabet, tuple(names), pos[start], frozenset(pos[a] for a in accept), delta)


def _resolve(M: Automaton, state) -> int:
    if isinstance(state, str):
        return M.state_index(state)
    if not 0 <= state < M.n_states:
        raise InputError(f"state index {state} out of range")
    return state


def _follow(M: Automaton, word: str, origin: int) -> tuple[int, ...]:
    s = origin
    visited = [s]
    for i, x in enumerate(word):
        if x not in M.alphabet:
            raise InputError(f"unknown letter {x!r} at position {i}")
        s = M.delta[s][M.alphabet.index(x)]
        visited.append(s)
    return tuple(visited)


def run(M: Automaton, word: str, origin=None) -> list[str]:
    """State names visited by the unique path reading `word` from `origin`."""
    start = M.start if origin is None else _resolve(M, origin)
    return [M.states[s] for s in _follow(M, word, start)]


def accepts(M: Automaton, word: str) -> bool:
    return _follow(M, word, M.start)[-1] in M.accept


def _reachable(M: Automaton) -> frozenset[int]:
    seen = {M.start}
    todo = deque([M.start])
    while todo:
        s = todo.popleft()
        for t in M.delta[s]:
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return frozenset(seen)


def _coreachable(M: Automaton) -> frozenset[int]:
    rev: list[set[int]] = [set() for _ in M.states]
    for s, row in enumerate(M.delta):
        for t in row:
            rev[t].add(s)
    seen = set(M.accept)
    todo = deque(seen)
    while todo:
        s = todo.popleft()
        for t in rev[s]:
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return frozenset(seen)


def live_state_indices(M: Automaton) -> frozenset[int]:
    return _reachable(M) & _coreachable(M)


def live_states(M: Automaton) -> frozenset[str]:
    """States lying on some accepted path."""
    return frozenset(M.states[s] for s in live_state_indices(M))


def is_empty_language(M: Automaton) -> bool:
    return not live_state_indices(M)


def _product(M1: Automaton, M2: Automaton, keep) -> Automaton:
    if M1.alphabet != M2.alphabet:
        raise InputError("boolean operations require identical alphabets")
    k = len(M1.alphabet)
    pairs: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []

    def intern(p):
        if p not in pairs:
            pairs[p] = len(order)
            order.append(p)
        return pairs[p]

    intern((M1.start, M2.start))
    delta: list[tuple[int, ...]] = []
    i = 0
    while i < len(order):
        s1, s2 = order[i]
        delta.append(tuple(intern((M1.delta[s1][x], M2.delta[s2][x])) for x in range(k)))
        i += 1
    accept = frozenset(
        i for i, (s1, s2) in enumerate(order) if keep(s1 in M1.accept, s2 in M2.accept)
    )
    names = tuple(f"({M1.states[s1]},{M2.states[s2]})" for s1, s2 in order)
    return Automaton(M1.alphabet, names, 0, accept, tuple(delta))


def intersect(M1: Automaton, M2: Automaton) -> Automaton:
    return _product(M1, M2, lambda a, b: a and b)


def union(M1: Automaton, M2: Automaton) -> Automaton:
    return _product(M1, M2, lambda a, b: a or b)


def difference(M1: Automaton, M2: Automaton) -> Automaton:
    return _product(M1, M2, lambda a, b: a and not b)


def complement(M: Automaton) -> Automaton:
    accept = frozenset(range(M.n_states)) - M.accept
    return Automaton(M.alphabet, M.states, M.start, accept, M.delta)


def boolean(M1: Automaton, M2: Automaton, op: str) -> Automaton:
    ops = {"intersect": intersect, "union": union, "difference": difference}
    if op not in ops:
        raise InputError(f"unknown boolean operation {op!r}")
    return ops[op](M1, M2)


def minimize(M: Automaton) -> Automaton:
    """Canonical minimal automaton: unique for each language over an alphabet.

    Reachable states are merged into Nerode classes by partition refinement,
    then renamed q0, q1, ... in breadth-first order from the start state with
    edges explored in alphabet order.
    """
    reach = sorted(_reachable(M))
    k = len(M.alphabet)
    # Moore refinement on the reachable part.
    block = {s: (1 if s in M.accept else 0) for s in reach}
    nblocks = len(set(block.values()))
    while True:
        sig = {s: (block[s],) + tuple(block[M.delta[s][x]] for x in range(k)) for s in reach}
        relabel: dict[tuple, int] = {}
        for s in reach:
            relabel.setdefault(sig[s], len(relabel))
        new = {s: relabel[sig[s]] for s in reach}
        if len(relabel) == nblocks:
            block = new
            break
        block, nblocks = new, len(relabel)

    # Canonical BFS numbering of the classes.
    numbering: dict[int, int] = {}
    order: list[int] = []  # representative state per class, BFS order

    def visit(s):
        b = block[s]
        if b not in numbering:
            numbering[b] = len(order)
            order.append(s)

    visit(M.start)
    i = 0
    while i < len(order):
        s = order[i]
        for x in range(k):
            visit(M.delta[s][x])
        i += 1

    delta = tuple(
        tuple(numbering[block[M.delta[s][x]]] for x in range(k)) for s in order
    )
    accept = frozenset(numbering[block[s]] for s in reach if s in M.accept)
    names = tuple(f"q{i}" for i in range(len(order)))
    return Automaton(M.alphabet, names, 0, accept, delta)


@dataclass(frozen=True)
class Path:
    """A directed path: origin state, word read, and the visited state indices."""

    origin: int
    word: str
    visited: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.word)


def path(M: Automaton, word: str, origin=None) -> Path:
    start = M.start if origin is None else _resolve(M, origin)
    return Path(start, word, _follow(M, word, start))


def accepted_path(M: Automaton, word: str) -> Path:
    p = path(M, word)
    if p.visited[-1] not in M.accept:
        raise InputError(f"word {word!r} is not accepted")
    return p


@dataclass(frozen=True)
class Loop:
    """A loop stored in canonical form: the least rotation in alphabet order.

    Two loops are equal exactly when they are cyclic permutations of each
    other. `visited` is the closed state sequence, so visited[0] == visited[-1].
    """

    word: str
    visited: tuple[int, ...]

    @property
    def states(self) -> frozenset[int]:
        return frozenset(self.visited[:-1])

    @property
    def base(self) -> int:
        return self.visited[0]

    def is_simple(self) -> bool:
        interior = self.visited[:-1]
        return len(set(interior)) == len(interior)

    def __len__(self) -> int:
        return len(self.word)


def _canonical_rotation(alphabet: Alphabet, word: str, visited) -> tuple[str, tuple[int, ...]]:
    interior = tuple(visited[:-1])
    idx = alphabet.word_key(word)
    best = None
    for r in range(len(word)):
        key = (idx[r:] + idx[:r], interior[r:] + interior[:r])
        if best is None or key < best:
            best = key
    letters, states = best
    return "".join(alphabet.letters[i] for i in letters), states + (states[0],)


def make_loop(M: Automaton, word: str, base) -> Loop:
    """Validate that `word` traces a loop at `base` and canonicalize it."""
    origin = _resolve(M, base)
    visited = _follow(M, word, origin)
    if len(word) == 0 or visited[-1] != origin:
        raise InputError(f"word {word!r} is not a loop at {M.states[origin]}")
    w, v = _canonical_rotation(M.alphabet, word, visited)
    return Loop(w, v)


def rotate_loop(loop: Loop, base_state: int) -> tuple[str, tuple[int, ...]]:
    """The rotation of a simple loop based at the given state."""
    interior = loop.visited[:-1]
    try:
        r = interior.index(base_state)
    except ValueError:
        raise InputError(f"state {base_state} does not lie on the loop") from None
    word = loop.word[r:] + loop.word[:r]
    states = interior[r:] + interior[:r]
    return word, states + (states[0],)


def loop_sort_key(alphabet: Alphabet, loop: Loop):
    return (len(loop), alphabet.word_key(loop.word), loop.visited)


def enumerate_simple_loops(M: Automaton, live_only: bool = True,
                           cap: int = DEFAULT_LOOP_CAP) -> tuple[Loop, ...]:
    """All vertex-simple loops, canonicalized and deduplicated.

    Enumeration anchors every state cycle at its least state, so each cycle
    is produced once; parallel edges (distinct letters between the same
    states) yield distinct loops. Aborts with a diagnostic once more than
    `cap` loops are found.
    """
    allowed = sorted(live_state_indices(M)) if live_only else list(range(M.n_states))
    allowed_set = set(allowed)
    adj: dict[int, dict[int, list[str]]] = {s: {} for s in allowed}
    for s in allowed:
        for i, x in enumerate(M.alphabet):
            t = M.delta[s][i]
            if t in allowed_set:
                adj[s].setdefault(t, []).append(x)

    found: set[Loop] = set()

    def record(state_cycle: list[int]):
        steps = [adj[state_cycle[i]][state_cycle[(i + 1) % len(state_cycle)]]
                 for i in range(len(state_cycle))]
        for letters in itertools.product(*steps):
            word = "".join(letters)
            w, v = _canonical_rotation(M.alphabet, word, tuple(state_cycle) + (state_cycle[0],))
            found.add(Loop(w, v))
            if len(found) > cap:
                raise ResourceError(
                    f"more than {cap} simple loops; raise the cap for pathological inputs",
                    cap=cap,
                )

    def walk(root: int, cur: int, seq: list[int]):
        for t in sorted(adj[cur]):
            if t == root:
                record(seq)
            elif t > root and t not in seq:
                walk(root, t, seq + [t])

    for root in allowed:
        walk(root, root, [root])

    return tuple(sorted(found, key=lambda lp: loop_sort_key(M.alphabet, lp)))


def _distance_to_accept(M: Automaton) -> list[int | None]:
    rev: list[set[int]] = [set() for _ in M.states]
    for s, row in enumerate(M.delta):
        for t in row:
            rev[t].add(s)
    dist: list[int | None] = [None] * M.n_states
    todo = deque()
    for s in M.accept:
        dist[s] = 0
        todo.append(s)
    while todo:
        s = todo.popleft()
        for t in rev[s]:
            if dist[t] is None:
                dist[t] = dist[s] + 1
                todo.append(t)
    return dist


def enumerate_words(M: Automaton, max_len: int) -> list[str]:
    """Accepted words of length <= max_len, shortest first, then in alphabet order."""
    if max_len < 0:
        raise InputError("max_len must be non-negative")
    dist = _distance_to_accept(M)
    out: list[str] = []
    if dist[M.start] is None or dist[M.start] > max_len:
        return out
    level: list[tuple[int, str]] = [(M.start, "")]
    for length in range(max_len + 1):
        for s, w in level:
            if s in M.accept:
                out.append(w)
        if length == max_len:
            break
        budget = max_len - length - 1
        nxt: list[tuple[int, str]] = []
        for s, w in level:
            for i, x in enumerate(M.alphabet):
                t = M.delta[s][i]
                if dist[t] is not None and dist[t] <= budget:
                    nxt.append((t, w + x))
        level = nxt
    return out
