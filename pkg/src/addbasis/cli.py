"""Command-line surface: construct, verify, classify, setalg, gamma2.

All file formats are line-oriented JSON/CSV with canonical element ordering,
so reruns of the same config are byte-identical.  Exit codes: 0 success,
2 validation/hypothesis failure, 3 parse error, 4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import sys
from pathlib import Path

from . import construct
from .classify import dilation_finite, gamma2_infeasible
from .construct import INF, TargetFunction, value_from_json, value_to_json
from .errors import (
    AddbasisError,
    DilationFiniteError,
    NoDecompositionError,
    ParseError,
    PostconditionError,
    SearchBoundError,
    SpecMismatchError,
    TargetFunctionError,
    UnsupportedOperationError,
)
from .groups import AmbientSpec, GroupSpec, SemigroupSpec
from .setalg import (
    FiniteSet,
    difference_set,
    dilation,
    rep_table,
    restricted_sumset,
    sumset,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PARSE = 3
EXIT_INTERNAL = 4


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _spec_from_doc(doc):
    """A spec document: ambient, bare group, or bare semigroup."""
    if not isinstance(doc, dict):
        raise ParseError("spec document must be a JSON object")
    if "semigroup" in doc and "group" in doc:
        return AmbientSpec.from_json(doc)
    if "group" in doc:
        return GroupSpec.from_json(doc["group"])
    if "summands" in doc:
        return GroupSpec.from_json(doc)
    if "semigroup" in doc:
        return SemigroupSpec.from_json(doc["semigroup"])
    raise ParseError("spec document needs 'group', 'semigroup', or both")


def _read_operand(path: str):
    doc = _load_json(path)
    if not isinstance(doc, dict) or "elements" not in doc:
        raise ParseError(f"{path}: operand files need 'spec' and 'elements'")
    spec = _spec_from_doc(doc.get("spec", doc))
    try:
        return FiniteSet.from_json(spec, doc["elements"])
    except SpecMismatchError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _parse_window(spec, text: str) -> FiniteSet:
    """Window argument: 'lo..hi' over integer carriers, or a JSON list."""
    if ".." in text and not text.lstrip().startswith("["):
        lo_s, hi_s = text.split("..", 1)
        try:
            lo, hi = int(lo_s), int(hi_s)
        except ValueError as exc:
            raise ParseError(f"bad window range {text!r}") from exc
        if hi < lo:
            raise ParseError(f"empty window range {text!r}")
        elements = []
        for v in range(lo, hi + 1):
            elements.append(spec.element_from_json(v))
        return FiniteSet(spec, elements, validate=False)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad window JSON {text!r}") from exc
    return FiniteSet.from_json(spec, doc)


def _write(path: Path, text: str):
    path.write_text(text)


def _basis_csv(basis: FiniteSet) -> str:
    import io

    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["s", "g"])
    amb = basis.spec
    for x in basis:
        w.writerow(
            [
                json.dumps(amb.semigroup.element_to_json(x[0])),
                json.dumps(amb.group.element_to_json(x[1])),
            ]
        )
    return out.getvalue()


def cmd_construct(args) -> int:
    doc = _load_json(args.config)
    if not isinstance(doc, dict):
        raise ParseError("run config must be a JSON object")
    try:
        ambient = AmbientSpec.from_json(doc["ambient"])
    except KeyError:
        raise ParseError("run config needs an 'ambient' entry") from None
    target = TargetFunction.from_json(ambient, doc.get("target", {}))
    mode = args.mode or doc.get("mode", "restricted")
    if mode not in ("restricted", "unrestricted"):
        raise ParseError(f"bad mode {mode!r}")
    steps = args.steps if args.steps is not None else doc.get("steps")
    if not isinstance(steps, int) or steps < 1:
        raise ParseError("steps must be a positive integer")
    seed_order = doc.get("seed_order", "canonical")
    if seed_order != "canonical":
        raise ParseError(f"unsupported seed_order {seed_order!r}")

    result = construct.run(
        ambient, target, mode, steps,
        search_bound=args.search_bound,
        cross_check=args.cross_check,
    )

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write(
        outdir / "basis.json",
        _dump(
            {
                "ambient": ambient.to_json(),
                "mode": mode,
                "steps": steps,
                "elements": result.basis.to_json(),
            }
        ),
    )
    _write(outdir / "basis.csv", _basis_csv(result.basis))
    _write(outdir / "report.json", _dump(result.report.to_json(ambient)))
    audit_lines = "".join(
        json.dumps(rec, sort_keys=True) + "\n" for rec in result.audit
    )
    _write(outdir / "audit.jsonl", audit_lines)

    ok = not result.report.has_exceeded
    print(
        f"constructed |B| = {len(result.basis)} over {steps} steps; "
        f"targets_met = {result.report.targets_met}; "
        f"cap_respected = {result.report.cap_respected}"
    )
    return EXIT_OK if ok else EXIT_INTERNAL


def cmd_verify(args) -> int:
    doc = _load_json(args.config)
    ambient = AmbientSpec.from_json(doc["ambient"])
    target = TargetFunction.from_json(ambient, doc.get("target", {}))
    mode = args.mode or doc.get("mode", "restricted")
    basis_doc = _load_json(args.basis)
    if not isinstance(basis_doc, dict) or "elements" not in basis_doc:
        raise ParseError("basis file needs an 'elements' entry")
    basis = FiniteSet.from_json(ambient, basis_doc["elements"])

    if args.window is not None:
        window = FiniteSet(
            ambient,
            [ambient.enumerate_element(i) for i in range(args.window)],
            validate=False,
        )
    else:
        steps = doc.get("steps")
        if not isinstance(steps, int) or steps < 1:
            raise ParseError(
                "config has no usable 'steps'; pass --window N instead"
            )
        window = FiniteSet(
            ambient,
            itertools.islice(construct.schedule_targets(target), steps),
            validate=False,
        )

    report = construct.verify(basis, target, window, mode)
    print(_dump(report.to_json(ambient)), end="")
    ok = not report.has_exceeded and report.cap_respected
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_classify(args) -> int:
    doc = _load_json(args.spec)
    spec = _spec_from_doc(doc)
    if not isinstance(spec, GroupSpec):
        raise ParseError("classify needs a group spec")
    decision = dilation_finite(spec, args.h)
    print(_dump(decision.to_json()), end="")
    return EXIT_OK


def cmd_setalg(args) -> int:
    op = args.op
    a = _read_operand(args.operands[0])
    fmt = args.format
    if op in ("sumset", "restricted-sumset", "difference"):
        if len(args.operands) != 2:
            raise ParseError(f"{op} needs exactly two operand files")
        b = _read_operand(args.operands[1])
        fn = {
            "sumset": sumset,
            "restricted-sumset": restricted_sumset,
            "difference": difference_set,
        }[op]
        result = fn(a, b)
        print(_dump(result.to_json()), end="")
        return EXIT_OK
    if op == "dilation":
        if args.h is None:
            raise ParseError("dilation needs --h")
        result = dilation(args.h, a)
        print(_dump(result.to_json()), end="")
        return EXIT_OK
    if op == "reptable":
        if args.window is None:
            raise ParseError("reptable needs --window")
        window = _parse_window(a.spec, args.window)
        table = rep_table(a, window, restricted=args.restricted)
        if fmt == "csv":
            import io

            out = io.StringIO()
            table.write_csv(out)
            print(out.getvalue(), end="")
        else:
            print(_dump(table.to_json()), end="")
        return EXIT_OK
    raise ParseError(f"unknown setalg operation {op!r}")


def cmd_gamma2(args) -> int:
    doc = _load_json(args.spec)
    spec = _spec_from_doc(doc)
    values = {}
    try:
        with open(args.table) as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:2]] != ["element", "f"]:
                raise ParseError("gamma2 table needs an 'element,f' header")
            for row in reader:
                if not row:
                    continue
                x = spec.element_from_json(json.loads(row[0]))
                v = row[1].strip()
                values[x] = INF if v == "inf" else int(v)
    except OSError as exc:
        raise ParseError(f"cannot read {args.table}: {exc}") from exc
    except (ValueError, json.JSONDecodeError) as exc:
        raise ParseError(f"bad gamma2 table: {exc}") from exc
    try:
        infeasible = gamma2_infeasible(values)
    except ValueError as exc:
        raise TargetFunctionError(str(exc)) from exc
    heavy = sum(1 for v in values.values() if v >= 2)
    print(_dump({"infeasible": infeasible, "elements_with_value_ge_2": heavy}), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="addbasis",
        description=(
            "Construct and check additive bases with prescribed "
            "representation functions."
        ),
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="run the inductive construction")
    c.add_argument("--config", required=True, help="run config JSON path")
    c.add_argument("--out", required=True, help="output directory")
    c.add_argument("--steps", type=int, default=None, help="override config steps")
    c.add_argument(
        "--mode", choices=("restricted", "unrestricted"), default=None,
        help="override config mode",
    )
    c.add_argument(
        "--search-bound", type=int, default=construct.DEFAULT_SEARCH_BOUND,
        help="per-step candidate scan bound",
    )
    c.add_argument(
        "--cross-check", action="store_true",
        help="recount sampled rejected candidates against the exact oracle",
    )
    c.set_defaults(fn=cmd_construct)

    v = sub.add_parser("verify", help="recount a basis file against a target")
    v.add_argument("--config", required=True, help="run config JSON (ambient+target)")
    v.add_argument("--basis", required=True, help="basis JSON path")
    v.add_argument(
        "--window", type=int, default=None,
        help="verify over the first N enumerated elements instead of the "
        "config's scheduled targets",
    )
    v.add_argument("--mode", choices=("restricted", "unrestricted"), default=None)
    v.set_defaults(fn=cmd_verify)

    k = sub.add_parser("classify", help="decide finiteness of h*G structurally")
    k.add_argument("--spec", required=True, help="group spec JSON path")
    k.add_argument("--h", type=int, required=True)
    k.set_defaults(fn=cmd_classify)

    s = sub.add_parser("setalg", help="finite sumset algebra on operand files")
    s.add_argument(
        "op",
        choices=("sumset", "restricted-sumset", "difference", "dilation", "reptable"),
    )
    s.add_argument("operands", nargs="+", help="operand JSON files")
    s.add_argument("--h", type=int, default=None, help="dilation factor")
    s.add_argument("--window", default=None, help="'lo..hi' or JSON element list")
    s.add_argument("--restricted", action="store_true")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(fn=cmd_setalg)

    g = sub.add_parser("gamma2", help="exponent-2 obstruction check on a window table")
    g.add_argument("check", choices=("check",), help="subaction")
    g.add_argument("--spec", required=True, help="group spec JSON path")
    g.add_argument("--table", required=True, help="CSV with element,f columns")
    g.set_defaults(fn=cmd_gamma2)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (
        NoDecompositionError,
        DilationFiniteError,
        TargetFunctionError,
        SpecMismatchError,
        UnsupportedOperationError,
    ) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (PostconditionError, SearchBoundError) as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except AddbasisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
