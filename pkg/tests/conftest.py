import pytest

from biaquot import structures
from biaquot.fsa import Alphabet, from_rules
from biaquot.groups import FreeAbelian, GroupModel
from biaquot.structures import BiautomaticStructure


@pytest.fixture(scope="session")
def z2():
    return structures.builtin("Z2")


@pytest.fixture(scope="session")
def z3():
    return structures.builtin("Z3")


@pytest.fixture(scope="session")
def f2z():
    return structures.builtin("F2xZ")


@pytest.fixture(scope="session")
def z2_dead_accepting(z2):
    # every word becomes accepted: uniqueness and loop disjointness both break
    return structures.with_accept_states(z2, z2.acceptor.states)


@pytest.fixture(scope="session")
def single_state_z2():
    # one accepting state carrying all four self-loops
    alphabet = Alphabet.of("aAbB")
    rules = {("q", x): "q" for x in "aAbB"}
    M = from_rules(alphabet, ("q",), "q", ("q",), rules)
    model = GroupModel(
        FreeAbelian(2),
        (("a", (1, 0)), ("A", (-1, 0)), ("b", (0, 1)), ("B", (0, -1))),
    )
    return BiautomaticStructure(M, model, 2)
