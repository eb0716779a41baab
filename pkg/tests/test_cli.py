import json

import pytest

from biaquot import cli, fileformat, structures
from biaquot.errors import InputError
from biaquot.groups import DirectProduct, Free, FreeAbelian


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def machine(capsys, *argv):
    code, out, err = run_cli(capsys, *argv, "--format", "machine")
    return code, (json.loads(out) if out.strip() else None), err


# --- element and kind syntax ------------------------------------------------------

def test_kind_roundtrip():
    for text in ["free_abelian(2)", "free_abelian(1, 2, 4)", "free(2)",
                 "product(free(2), free_abelian(1))"]:
        kind = fileformat.parse_kind(text)
        assert fileformat.kind_to_text(kind) == text


def test_kind_examples():
    assert fileformat.parse_kind("free_abelian(1, 2)") == FreeAbelian(1, (2,))
    assert fileformat.parse_kind("product(free(2), free_abelian(1))") == DirectProduct(
        Free(2), FreeAbelian(1)
    )
    with pytest.raises(InputError):
        fileformat.parse_kind("banana(1)")


def test_element_roundtrip():
    kind = DirectProduct(Free(2), FreeAbelian(1))
    for text in ["([1 -2], [3])", "([], [0])"]:
        e = fileformat.parse_element(kind, text)
        assert fileformat.element_to_text(kind, e) == text


def test_element_validation():
    with pytest.raises(InputError):
        fileformat.parse_element(FreeAbelian(2), "[1]")
    with pytest.raises(InputError):
        fileformat.parse_element(Free(1), "[2]")


# --- structure files ------------------------------------------------------------------

GOOD_FILE = """
# a two-word structure over the integers
[alphabet]
a A

[model]
kind free_abelian(1)
gen a [1]
gen A [-1]

[acceptor]
start S
accept S P
S a P

[constants]
k 1
z [1]
"""


def test_parse_structure_text():
    loaded = fileformat.parse_structure_text(GOOD_FILE, "good")
    assert loaded.structure.k == 1
    assert loaded.z == (1,)
    assert loaded.structure.acceptor.n_states == 3  # sink added


def test_parse_error_missing_start():
    bad = GOOD_FILE.replace("start S\n", "")
    with pytest.raises(InputError, match="start"):
        fileformat.parse_structure_text(bad, "bad")


def test_parse_error_unknown_letter_with_line():
    bad = GOOD_FILE.replace("S a P", "S q P")
    with pytest.raises(InputError, match=r"bad:\d+.*'q'"):
        fileformat.parse_structure_text(bad, "bad")


def test_parse_error_asymmetric_generators():
    bad = GOOD_FILE.replace("gen A [-1]", "gen A [1]")
    with pytest.raises(InputError, match="inversion"):
        fileformat.parse_structure_text(bad, "bad")


def test_emit_and_reload_builtin(z2):
    text = fileformat.emit_structure_text(z2, (1, 1), header="demo")
    loaded = fileformat.parse_structure_text(text, "emitted")
    assert loaded.z == (1, 1)
    assert loaded.structure.model.gens == z2.model.gens
    assert loaded.structure.k == z2.k


# --- commands -------------------------------------------------------------------------

def test_inspect_builtin(capsys):
    code, report, _ = machine(capsys, "inspect", "--builtin", "Z2")
    assert code == 0
    assert len(report["central_loops"]) == 4
    assert len(report["primitive_z_cycles"]) == 2
    assert report["structure"]["live_states"] == ["S", "SA", "SB", "Sa", "Sb"]


def test_inspect_f2z(capsys):
    code, report, _ = machine(capsys, "inspect", "--builtin", "F2xZ")
    assert code == 0
    assert len(report["central_loops"]) == 2


def test_verify_builtin_passes(capsys):
    code, report, _ = machine(capsys, "verify", "--builtin", "Z2", "--max-len", "10")
    assert code == 0 and report["passed"]
    names = {c["name"]: c for c in report["checks"]}
    assert names["fellow_traveller"]["measured"] == 2


def test_verify_mutated_file_fails(capsys, tmp_path, z2):
    mutated = structures.with_accept_states(z2, z2.acceptor.states)
    path = tmp_path / "mutated.bia"
    path.write_text(fileformat.emit_structure_text(mutated))
    code, report, _ = machine(capsys, "verify", "--file", str(path), "--max-len", "6")
    assert code == 1 and not report["passed"]
    names = {c["name"]: c["passed"] for c in report["checks"]}
    assert not names["uniqueness"]
    assert not names["simplicity"]


def test_verify_z3(capsys):
    code, report, _ = machine(capsys, "verify", "--builtin", "Z3", "--max-len", "8")
    assert code == 0 and report["passed"]


def test_quotient_builtin_roundtrip(capsys, tmp_path):
    out = tmp_path / "z2_quotient.bia"
    code, report, _ = machine(
        capsys, "quotient", "--builtin", "Z2", "--out", str(out), "--max-len", "10"
    )
    assert code == 0 and report["passed"]
    assert report["bound"]["k_prime"] == 2912
    # round-trip: the emitted quotient verifies at the same bounds
    code, report, _ = machine(capsys, "verify", "--file", str(out), "--max-len", "10")
    assert code == 0 and report["passed"]


def test_quotient_f2z_recovers_free_factor(capsys):
    code, report, _ = machine(capsys, "quotient", "--builtin", "F2xZ",
                              "--max-len", "8")
    assert code == 0 and report["passed"]
    assert report["quotient_model"] == "free(2)"


def test_quotient_tower_z3(capsys):
    code, report, _ = machine(
        capsys, "quotient", "--builtin", "Z3", "--central", "[1 1 1]", "--max-len", "8"
    )
    assert code == 0 and report["passed"]
    assert report["final_model"] == "free_abelian(2)"
    assert [step["kind"] for step in report["tower"]] == ["peel"]


def test_fan_builtin(capsys):
    code, report, _ = machine(capsys, "fan", "--builtin", "Z2")
    assert code == 0 and report["passed"]
    assert report["counts_by_dim"] == {"0": 4, "1": 4}


def test_fan_rejects_nonabelian(capsys):
    code, _, err = run_cli(capsys, "fan", "--builtin", "F2xZ")
    assert code == 2
    assert "abelian" in err


def test_unknown_builtin_is_input_error(capsys):
    code, _, err = run_cli(capsys, "inspect", "--file", "/nonexistent/zzz.bia")
    assert code == 2


def test_reports_byte_identical_without_timing(capsys):
    code1, rep1, _ = machine(capsys, "verify", "--builtin", "Z2", "--max-len", "8")
    code2, rep2, _ = machine(capsys, "verify", "--builtin", "Z2", "--max-len", "8")
    rep1.pop("timing")
    rep2.pop("timing")
    assert code1 == code2 == 0
    assert json.dumps(rep1, sort_keys=True) == json.dumps(rep2, sort_keys=True)


def test_exit_code_semantics(capsys, tmp_path, z2):
    # 0 pass, 1 failed checks, 2 bad input
    assert run_cli(capsys, "verify", "--builtin", "Z2", "--max-len", "6")[0] == 0
    mutated = structures.with_accept_states(z2, z2.acceptor.states)
    path = tmp_path / "bad.bia"
    path.write_text(fileformat.emit_structure_text(mutated))
    assert run_cli(capsys, "verify", "--file", str(path), "--max-len", "4")[0] == 1
    assert run_cli(capsys, "verify", "--builtin", "Z2", "--file", str(path))[0] == 2