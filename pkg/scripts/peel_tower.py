"""Peel whole central subgroups off the lattice fixtures, step by step.

Each peel quotients by one central line and re-certifies the intermediate
structure; the script prints how the state counts and fellow-traveller
constants grow along the tower. The rank-3 run also writes the subdivision
at infinity of the source structure next to this script.

Run: python scripts/peel_tower.py
"""

import pathlib

from biaquot import fan, fileformat, fsa, quotient, structures


def show_tower(name, generators):
    bs = structures.builtin(name)
    print(f"== {name}: quotient by the subgroup generated by {generators}")
    result = quotient.central_quotient_tower(bs, generators)
    for i, step in enumerate(result.steps, start=1):
        model = fileformat.kind_to_text(step.result.model.kind)
        if step.kind == "peel":
            b = step.quotient.bound
            print(f"  step {i}: peel z={step.z}  ->  {model}, "
                  f"{step.result.acceptor.n_states} states, K'={b.k_prime}")
        else:
            print(f"  step {i}: finite projection  ->  {model}")
    final = result.final
    words = fsa.enumerate_words(final.acceptor, 8)
    print(f"  final language to length 8: {len(words)} words")
    uniq = structures.verify_uniqueness(final, 8)
    travel = structures.verify_fellow_traveller(final, 8)
    print(f"  {uniq}")
    print(f"  {travel}")
    return uniq.passed and travel.passed


def main():
    ok = show_tower("Z2", [(1, 0), (0, 1)])
    ok &= show_tower("Z3", [(1, 1, 1)])

    z3 = structures.builtin("Z3")
    subdivision = fan.build_subdivision(z3)
    out = pathlib.Path(__file__).with_name("z3_fan.txt")
    out.write_text(fan.export_subdivision(subdivision))
    counts = {d: len(v) for d, v in subdivision.by_dim().items()}
    print(f"== Z3 subdivision at infinity: {counts} -> {out.name}")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
