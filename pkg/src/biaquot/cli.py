"""Command line surface: inspect, verify, quotient, and fan.

Every command assembles one report dictionary; --format machine prints it
as JSON, --format human renders the same data as text. Reports for
identical inputs are identical apart from the timing field. The exit status
is 0 exactly when every check in the report passed, 1 when some check
failed, and 2 for input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import cycles, fan, fileformat, fsa, quotient, structures
from .errors import InputError, PreconditionError, ResourceError, StructuralError
from .structures import BiautomaticStructure, VerificationReport


def _load(args) -> tuple[BiautomaticStructure, object, str, str]:
    """(structure, default z or None, display name, content digest)."""
    if args.builtin and args.file:
        raise InputError("give either --builtin or --file, not both")
    if args.builtin:
        bs = structures.builtin(args.builtin)
        z = structures.builtin_default_z(args.builtin)
        text = fileformat.emit_structure_text(bs, z)
        name = f"builtin:{args.builtin}"
    elif args.file:
        loaded = fileformat.load_structure(args.file)
        bs, z, name = loaded.structure, loaded.z, loaded.source
        text = fileformat.emit_structure_text(bs, z)
    else:
        raise InputError("one of --builtin or --file is required")
    digest = hashlib.sha256(text.encode()).hexdigest()[:16]
    return bs, z, name, digest


def _parse_z(args, bs) -> object:
    if getattr(args, "z", None):
        return fileformat.parse_element(bs.model.kind, args.z, "--z")
    return None


def _report_dict(r: VerificationReport) -> dict:
    out = {
        "name": r.name,
        "passed": r.passed,
        "bound": r.bound,
        "witnesses": [repr(w) for w in r.witnesses],
        "total_witnesses": r.total_witnesses,
    }
    if r.measured is not None:
        out["measured"] = r.measured
    if r.note:
        out["note"] = r.note
    if r.details:
        out["details"] = [_report_dict(d) for d in r.details]
    return out


def _emit(report: dict, fmt: str) -> None:
    if fmt == "machine":
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    print(f"command: {report['command']}   input: {report['input']['name']}")
    for key, value in report.items():
        if key in ("command", "input", "checks", "timing", "passed"):
            continue
        if isinstance(value, dict):
            print(f"{key}:")
            for k2, v2 in value.items():
                print(f"  {k2}: {v2}")
        elif isinstance(value, list):
            print(f"{key}:")
            for item in value:
                print(f"  {item}")
        else:
            print(f"{key}: {value}")

    def show(check: dict, indent: str = "  "):
        status = "pass" if check["passed"] else "FAIL"
        extra = f" measured={check['measured']}" if "measured" in check else ""
        note = f"  [{check['note']}]" if check.get("note") else ""
        print(f"{indent}{check['name']}: {status} (bound {check['bound']}{extra}){note}")
        for w in check["witnesses"][:5]:
            print(f"{indent}  witness: {w}")
        for d in check.get("details", []):
            show(d, indent + "  ")

    if report.get("checks"):
        print("checks:")
        for check in report["checks"]:
            show(check)
    print(f"result: {'PASS' if report['passed'] else 'FAIL'}"
          f"   ({report['timing']['seconds']:.2f}s)")


def _base_report(command: str, name: str, digest: str, flags: dict) -> dict:
    return {
        "command": command,
        "input": {"name": name, "digest": digest, "flags": flags},
        "checks": [],
        "passed": True,
    }


def _finish(report: dict, t0: float, fmt: str) -> int:
    report["passed"] = all(c["passed"] for c in report["checks"])
    report["timing"] = {"seconds": time.time() - t0}
    _emit(report, fmt)
    return 0 if report["passed"] else 1


def cmd_inspect(args) -> int:
    t0 = time.time()
    bs, default_z, name, digest = _load(args)
    z = _parse_z(args, bs) or default_z
    report = _base_report("inspect", name, digest,
                          {"z": None if z is None else repr(z)})
    M = bs.acceptor
    kind = bs.model.kind
    report["structure"] = {
        "letters": list(M.alphabet.letters),
        "states": list(M.states),
        "start": M.states[M.start],
        "accept": sorted(M.states[s] for s in M.accept),
        "live_states": sorted(fsa.live_states(M)),
        "model": fileformat.kind_to_text(kind),
        "claimed_k": bs.k,
    }
    simple = fsa.enumerate_simple_loops(M, live_only=True)
    report["simple_loops"] = [f"{lp.word}@{M.states[lp.base]}" for lp in simple]
    central = cycles.find_central_loops(bs)
    report["central_loops"] = [
        f"{cl.word}@{M.states[cl.loop.base]} -> {fileformat.element_to_text(kind, cl.element)}"
        for cl in central
    ]
    live_sets = cycles.enumerate_live_sets(bs, central)
    report["live_sets"] = [
        "{" + ", ".join(cl.word for cl in ls.loops) + "}" + f" witness {ls.witness.word!r}"
        for ls in live_sets
    ]
    if z is not None:
        zcs = cycles.find_primitive_z_cycles(bs, z)
        report["primitive_z_cycles"] = [
            " + ".join(f"{n}*{cl.word}" for cl, n in zc.cycle.terms)
            + f"  (exponent {zc.exponent})"
            for zc in zcs
        ]
    return _finish(report, t0, args.format)


def cmd_verify(args) -> int:
    t0 = time.time()
    bs, _, name, digest = _load(args)
    report = _base_report("verify", name, digest,
                          {"max_len": args.max_len, "radius": args.radius})
    checks = [
        structures.verify_surjectivity(bs, args.radius),
        structures.verify_uniqueness(bs, args.max_len),
        structures.verify_fellow_traveller(bs, args.max_len),
        cycles.check_simplicity(bs),
    ]
    central = cycles.find_central_loops(bs)
    for ls in cycles.enumerate_live_sets(bs, central):
        indep = cycles.check_independence(bs, ls)
        if not indep.passed:
            checks.append(indep)
    if all(c.name != "independence" for c in checks):
        checks.append(VerificationReport("independence", True, len(central)))
    report["checks"] = [_report_dict(c) for c in checks]
    return _finish(report, t0, args.format)


def cmd_quotient(args) -> int:
    t0 = time.time()
    bs, default_z, name, digest = _load(args)
    fmt = args.format
    if args.central:
        gens = [
            fileformat.parse_element(bs.model.kind, part, "--central")
            for part in args.central.split(";")
            if part.strip()
        ]
        report = _base_report("quotient", name, digest,
                              {"central": args.central, "max_len": args.max_len,
                               "radius": args.radius})
        tower = quotient.central_quotient_tower(bs, gens)
        report["tower"] = [
            {
                "kind": step.kind,
                "z": None if step.z is None else repr(step.z),
                "model": fileformat.kind_to_text(step.result.model.kind),
                "states": step.result.acceptor.n_states,
                "k": step.result.k,
            }
            for step in tower.steps
        ]
        final = tower.final
        report["final_model"] = fileformat.kind_to_text(final.model.kind)
        checks = [
            structures.verify_uniqueness(final, args.max_len),
            structures.verify_fellow_traveller(final, args.max_len),
        ]
        report["checks"] = [_report_dict(c) for c in checks]
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(fileformat.emit_structure_text(
                    final, header=f"tower quotient of {name}"))
            report["out"] = args.out
        return _finish(report, t0, fmt)

    z = _parse_z(args, bs) or default_z
    if z is None:
        raise InputError("--z is required (no default for this input)")
    report = _base_report("quotient", name, digest,
                          {"z": repr(z), "max_len": args.max_len, "radius": args.radius})
    qs = quotient.build_quotient(bs, z)
    b = qs.bound
    report["bound"] = {
        "k": b.k, "A": b.max_exponent, "R": b.global_bound, "z_length": b.z_length,
        "k1": b.k1, "ball_size": b.ball_size, "state_count": b.state_count,
        "b": b.b, "k_prime": b.k_prime,
        "convention": "state_count = live states of the minimized source acceptor",
    }
    report["quotient_model"] = fileformat.kind_to_text(qs.structure.model.kind)
    report["quotient_states"] = list(qs.structure.acceptor.states)
    check = quotient.verify_quotient(qs, args.radius, args.max_len)
    report["checks"] = [_report_dict(check)]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(fileformat.emit_structure_text(
                qs.structure, header=f"central quotient of {name} by z"))
        report["out"] = args.out
    return _finish(report, t0, fmt)


def cmd_fan(args) -> int:
    t0 = time.time()
    bs, _, name, digest = _load(args)
    report = _base_report("fan", name, digest,
                          {"sample_radius": args.sample_radius, "epsilon": args.epsilon})
    subdivision = fan.build_subdivision(bs)
    report["counts_by_dim"] = {
        str(d): len(v) for d, v in subdivision.by_dim().items()
    }
    checks = [
        fan.verify_subdivision(subdivision, args.sample_radius),
        fan.verify_visual_approximation(bs, args.epsilon),
    ]
    report["checks"] = [_report_dict(c) for c in checks]
    export = fan.export_subdivision(subdivision)
    report["export"] = export.splitlines()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(export)
        report["out"] = args.out
    return _finish(report, t0, args.format)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biaquot",
        description="Construct and verify biautomatic structures on central quotients.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--builtin", choices=structures.builtin_names(),
                       help="use a shipped demonstration structure")
        p.add_argument("--file", help="load a structure file")
        p.add_argument("--format", choices=("human", "machine"), default="human")

    p = sub.add_parser("inspect", help="list states, loops, live sets, and Z-cycles")
    common(p)
    p.add_argument("--z", help="central element (element syntax)")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("verify", help="run the structure verification suite")
    common(p)
    p.add_argument("--max-len", type=int, default=10, dest="max_len")
    p.add_argument("--radius", type=int, default=6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("quotient", help="build and verify the quotient language")
    common(p)
    p.add_argument("--z", help="central element to quotient by")
    p.add_argument("--central", help="semicolon-separated central generators (tower mode)")
    p.add_argument("--max-len", type=int, default=10, dest="max_len")
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--out", help="write the quotient structure file here")
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("fan", help="build and verify the subdivision at infinity")
    common(p)
    p.add_argument("--sample-radius", type=int, default=8, dest="sample_radius")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--out", help="write the subdivision export here")
    p.set_defaults(func=cmd_fan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, PreconditionError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (StructuralError, ResourceError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
