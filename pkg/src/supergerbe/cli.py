"""Command-line surface.

Exit code 0 means every asserted identity verified; any failure exits
nonzero after printing a machine-readable failure section.  `--report PATH`
additionally writes the structured report; `--parallel N` bounds the worker
count (default from SUPERGERBE_PARALLEL).
"""

from __future__ import annotations

import argparse
import sys

from pathlib import Path

from . import examples as ex
from .bodysoul import decompose as run_decompose
from .errors import ManifestError, SupergerbeError
from .gerbes import construct_from_integral_form, integral_check
from .manifest import (
    Manifest,
    emit_certificate_doc,
    emit_decomposition_doc,
    emit_manifest,
    parse_certificate_doc,
    parse_decomposition_doc,
    parse_manifest,
    parse_tree,
)
from .reports import Report
from .util import default_workers

__all__ = ["run_command", "main"]


def _load_manifest(path: str) -> Manifest:
    text = Path(path).read_text(encoding="utf-8")
    return parse_manifest(text)


def _pick_gerbe(man: Manifest, name: str):
    if name not in man.gerbes:
        raise ManifestError(
            f"manifest {man.name!r} has no gerbe {name!r}; "
            f"available: {sorted(man.gerbes)}")
    return man.gerbes[name]


def _pick_form(man: Manifest, name: str):
    if name not in man.forms:
        raise ManifestError(
            f"manifest {man.name!r} has no form {name!r}; "
            f"available: {sorted(man.forms)}")
    return man.forms[name]


def _finish(rep: Report, args) -> int:
    text = rep.render()
    print(text, end="")
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    return 0 if rep.passed else 1


def _failure(kind: str, detail: str, witness=None, report_path=None) -> int:
    lines = ["status: fail", "failure:", f"  kind: {kind}",
             f"  detail: {detail}"]
    if witness is not None:
        lines.append(f"  witness: {witness}")
    text = "\n".join(lines) + "\n"
    print(text, end="")
    if report_path:
        Path(report_path).write_text(text, encoding="utf-8")
    return 1


def _integer_class_report(title: str, cls) -> Report:
    rep = Report(title)
    rep.add("class is an integer cocycle", cls.is_cocycle())
    nonzero = {t: v for t, v in sorted(cls.components.items()) if v}
    rep.add(f"representative has {len(nonzero)} nonzero entries", True)
    pairing = cls.pair_fundamental()
    if pairing is not None:
        rep.add(f"pairing with the fundamental cycle: {pairing}", True)
    rep.add("class vanishes" if cls.is_zero() else "class is nonzero", True)
    return rep


def cmd_check(args) -> int:
    man = _load_manifest(args.manifest)
    g = _pick_gerbe(man, args.gerbe)
    rep = man.cover.validate()
    rep2 = g.check(workers=args.parallel)
    combined = Report(f"check {man.name}:{args.gerbe}")
    combined.extend(rep)
    combined.extend(rep2)
    return _finish(combined, args)


def cmd_dd(args) -> int:
    man = _load_manifest(args.manifest)
    g = _pick_gerbe(man, args.gerbe)
    cls = g.dd_class()
    rep = _integer_class_report(f"dd_class {man.name}:{args.gerbe}", cls)
    return _finish(rep, args)


def cmd_curvature(args) -> int:
    man = _load_manifest(args.manifest)
    g = _pick_gerbe(man, args.gerbe)
    h = g.curvature()
    rep = Report(f"curvature {man.name}:{args.gerbe}")
    rep.add(f"curvature: {h}", True)
    rep.add("curvature is closed", h.d().is_zero())
    rep.add("curvature is even", h.is_even())
    return _finish(rep, args)


def cmd_rep_identity(args) -> int:
    man = _load_manifest(args.manifest)
    g = _pick_gerbe(man, args.gerbe)
    return _finish(g.rep_identity_report(), args)


def cmd_trivialize(args) -> int:
    man = _load_manifest(args.manifest)
    g = _pick_gerbe(man, args.gerbe)
    cert = g.trivialize()
    doc = emit_certificate_doc(cert, man.name, args.gerbe)
    print(doc, end="")
    rep = g.verify_certificate(cert)
    if args.report:
        Path(args.report).write_text(rep.render(), encoding="utf-8")
    return 0 if rep.passed else 1


def cmd_construct(args) -> int:
    man = _load_manifest(args.manifest)
    omega = _pick_form(man, args.form)
    g = construct_from_integral_form(man.cover, omega)
    name = args.name
    out = Manifest(man.name, man.cover, dict(man.forms),
                   {**man.gerbes, name: g})
    Path(args.output).write_text(emit_manifest(out), encoding="utf-8")
    rep = Report(f"construct {man.name}:{args.form}")
    rep.add(f"gerbe {name!r} written to {args.output}", True)
    rep.add("curvature equals the input form", g.curvature() == omega)
    rep.extend(g.check(workers=args.parallel))
    return _finish(rep, args)


def cmd_integral(args) -> int:
    man = _load_manifest(args.manifest)
    omega = _pick_form(man, args.form)
    p = omega.degree()
    cls = integral_check(man.cover, omega, p)
    rep = _integer_class_report(f"integral {man.name}:{args.form}", cls)
    return _finish(rep, args)


def cmd_decompose(args) -> int:
    man = _load_manifest(args.manifest)
    g = _pick_gerbe(man, args.gerbe)
    result = run_decompose(g)
    doc = emit_decomposition_doc(result, man.name, args.gerbe)
    Path(args.output).write_text(doc, encoding="utf-8")
    rep = result.verify(g)
    out = Report(f"decompose {man.name}:{args.gerbe}")
    out.add(f"decomposition written to {args.output}", True)
    out.extend(rep)
    return _finish(out, args)


def cmd_verify(args) -> int:
    man = _load_manifest(args.manifest)
    g = _pick_gerbe(man, args.gerbe)
    text = Path(args.certificate).read_text(encoding="utf-8")
    kind_node = parse_tree(text).get("kind")
    kind = kind_node.expect_str() if kind_node is not None else "certificate"
    if kind == "decomposition":
        _gname, result = parse_decomposition_doc(text, man.cover)
        rep = result.verify(g)
    else:
        _gname, cert = parse_certificate_doc(text, man.cover)
        rep = g.verify_certificate(cert)
    return _finish(rep, args)


def cmd_examples(args) -> int:
    if args.action == "list":
        for name in ex.example_names():
            print(name)
        return 0
    if not args.name:
        print("usage: supergerbe examples emit <name>", file=sys.stderr)
        return 2
    print(ex.emit_example(args.name), end="")
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest
    rep = run_selftest(workers=args.parallel, quick=args.quick)
    return _finish(rep, args)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="supergerbe",
        description="Exact Cech-Deligne calculus for bundle gerbes on "
                    "supermanifolds.")
    ap.add_argument("--report", metavar="PATH",
                    help="write the structured report to PATH")
    ap.add_argument("--parallel", type=int, default=default_workers(),
                    metavar="N", help="bound the worker count "
                    "(default: SUPERGERBE_PARALLEL or 1)")
    sub = ap.add_subparsers(dest="command", required=True)

    def gerbe_cmd(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("manifest")
        p.add_argument("gerbe")
        p.set_defaults(fn=fn)
        return p

    gerbe_cmd("check", cmd_check, "verify the three cocycle conditions")
    gerbe_cmd("dd", cmd_dd, "Dixmier-Douady integer class")
    gerbe_cmd("curvature", cmd_curvature, "global curvature 3-form")
    gerbe_cmd("rep-identity", cmd_rep_identity,
              "Cech-de Rham total-differential identity")
    gerbe_cmd("trivialize", cmd_trivialize,
              "emit a trivialization certificate document")

    p = sub.add_parser("construct", help="build a gerbe from an integral 3-form")
    p.add_argument("manifest")
    p.add_argument("form")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--name", default="constructed",
                   help="name of the gerbe in the output manifest")
    p.set_defaults(fn=cmd_construct)

    p = sub.add_parser("integral", help="integrality of a closed 2- or 3-form")
    p.add_argument("manifest")
    p.add_argument("form")
    p.set_defaults(fn=cmd_integral)

    p = sub.add_parser("decompose", help="body/soul decomposition document")
    p.add_argument("manifest")
    p.add_argument("gerbe")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("verify", help="verify a certificate or decomposition")
    p.add_argument("manifest")
    p.add_argument("gerbe")
    p.add_argument("certificate")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("examples", help="list or emit built-in manifests")
    p.add_argument("action", choices=["list", "emit"])
    p.add_argument("name", nargs="?")
    p.set_defaults(fn=cmd_examples)

    p = sub.add_parser("selftest", help="run the full property suite")
    p.add_argument("--quick", action="store_true",
                   help="skip the 27-chart constructions")
    p.set_defaults(fn=cmd_selftest)
    return ap


def run_command(argv) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ManifestError as e:
        return _failure("ManifestError", str(e), report_path=args.report)
    except SupergerbeError as e:
        return _failure(type(e).__name__, str(e),
                        witness=getattr(e, "witness", None),
                        report_path=args.report)
    except FileNotFoundError as e:
        return _failure("FileNotFound", str(e), report_path=args.report)


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
