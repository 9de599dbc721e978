"""Command line front end: problem documents in, reports out.

Exit status: 0 abelian up to p_max, 10 obstruction, 2 bad input,
3 eigenvalue outside the tower or degree cap exceeded, 1 failed gauge check.
"""

import argparse
import json
import sys
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import yaml

from .constants import ConstantTower
from .errors import (CurveMismatch, DegreeCapExceeded, DiagonalNotAbelian,
                     EigenvalueOutsideTower, MRSError, MalformedHamiltonian,
                     ParseError, SingularGauge, Ve1NotReduced)
from .matrix import Matrix
from .ode import DEFAULT_DEGREE_CAP
from .ratfunc import RationalFunctionField
from .reducer import OBSTRUCTION, Verdict, mrs_driver
from .variational import (HamiltonianSystem, build_lve, parse_curve,
                          sym_power, verify_curve, verify_gauge)

SCHEMA = "mrsreduce.report/1"

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INPUT = 2
EXIT_TOWER = 3
EXIT_OBSTRUCTION = 10

_OPERATION = {
    ParseError: "parse",
    MalformedHamiltonian: "build_vector_field",
    CurveMismatch: "verify_curve",
    Ve1NotReduced: "mrs_driver (VE1 gauge check)",
    SingularGauge: "gauge_apply",
    EigenvalueOutsideTower: "adjoint_action",
    DegreeCapExceeded: "rational_solutions",
    DiagonalNotAbelian: "prereduce",
}


class DocumentError(ValueError):
    pass


# -- problem documents -----------------------------------------------------------


@dataclass
class RunOptions:
    p_max: int = 2
    mode: str = "full"
    iterate_unreduced: bool = False
    degree_cap: int = DEFAULT_DEGREE_CAP


@dataclass
class ProblemDocument:
    tower: ConstantTower
    n: int
    hamiltonian: str
    names: list
    curve: list
    ve1_gauge: object = None
    ve1_expected: object = None
    run: RunOptions = dc_field(default_factory=RunOptions)

    @property
    def field(self):
        return self.curve[0].field

    def system(self):
        return HamiltonianSystem(self.tower, self.n, self.hamiltonian, self.names)

    def to_dict(self):
        sysH = self.system()
        out = {
            "constants": self.tower.describe(),
            "hamiltonian": {"n": self.n, "expression": self.hamiltonian,
                            "names": list(sysH.names)},
            "curve": [str(c) for c in self.curve],
            "run": {"p_max": self.run.p_max, "mode": self.run.mode,
                    "iterate_unreduced": self.run.iterate_unreduced,
                    "degree_cap": self.run.degree_cap},
        }
        ve1 = {}
        if self.ve1_gauge is not None:
            ve1["gauge"] = self.ve1_gauge.to_strings()
        if self.ve1_expected is not None:
            ve1["expected"] = self.ve1_expected.to_strings()
        if ve1:
            out["ve1"] = ve1
        return out

    def __eq__(self, other):
        if not isinstance(other, ProblemDocument):
            return NotImplemented
        return (self.tower.describe() == other.tower.describe() and self.n == other.n
                and self.system().H == other.system().H
                and list(self.system().names) == list(other.system().names)
                and self.curve == other.curve and self.ve1_gauge == other.ve1_gauge
                and self.ve1_expected == other.ve1_expected and self.run == other.run)


def tower_from(section):
    if section is None:
        return ConstantTower()
    params = section.get("parameters", []) or []
    gens = []
    for g in section.get("generators", []) or []:
        if isinstance(g, dict):
            gens.append((g["name"], g["minpoly"]))
        else:
            gens.append((g[0], g[1]))
    return ConstantTower(params, gens)


def _matrix(field, rows, what):
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise DocumentError(f"{what} must be a non-empty list of rows")
    if len({len(r) for r in rows}) != 1:
        raise DocumentError(f"{what} has rows of different lengths")
    return Matrix.from_rows(field, [[str(v) for v in r] for r in rows])


def parse_document(data):
    if not isinstance(data, dict):
        raise DocumentError("a problem document is a mapping")
    tower = tower_from(data.get("constants"))
    field = RationalFunctionField(tower)
    ham = data.get("hamiltonian")
    if not isinstance(ham, dict) or "expression" not in ham or "n" not in ham:
        raise DocumentError("hamiltonian needs 'n' and 'expression'")
    n = int(ham["n"])
    names = ham.get("names")
    comps = data.get("curve")
    if not isinstance(comps, list) or len(comps) != 2 * n:
        raise DocumentError(f"curve must list {2 * n} expressions in x")
    curve = parse_curve(field, [str(c) for c in comps])
    doc = ProblemDocument(tower, n, str(ham["expression"]), names, curve)
    ve1 = data.get("ve1") or {}
    if "gauge" in ve1 and "gauge_inverse" in ve1:
        raise DocumentError("give either ve1.gauge or ve1.gauge_inverse, not both")
    if "gauge" in ve1:
        doc.ve1_gauge = _matrix(field, ve1["gauge"], "ve1.gauge")
    elif "gauge_inverse" in ve1:
        doc.ve1_gauge = _matrix(field, ve1["gauge_inverse"], "ve1.gauge_inverse").inverse()
    if "expected" in ve1:
        doc.ve1_expected = _matrix(field, ve1["expected"], "ve1.expected")
    run = data.get("run") or {}
    doc.run = RunOptions(int(run.get("p_max", 2)), str(run.get("mode", "full")),
                         bool(run.get("iterate_unreduced", False)),
                         int(run.get("degree_cap", DEFAULT_DEGREE_CAP)))
    if doc.run.mode not in ("full", "simplified"):
        raise DocumentError(f"unknown mode {doc.run.mode!r}")
    # validate the Hamiltonian eagerly
    doc.system()
    return doc


def load_data(path):
    text = Path(path).read_text()
    if str(path).endswith(".json"):
        return json.loads(text)
    return yaml.safe_load(text)


def load_document(path):
    return parse_document(load_data(path))


# -- report ----------------------------------------------------------------------


def sparse(M):
    return {"shape": [M.nrows, M.ncols],
            "entries": [[i, j, str(M.rows[i][j])] for i, j in M.nonzero_positions()]}


def dense_to_sparse(rows):
    return {"shape": [len(rows), len(rows[0]) if rows else 0],
            "entries": [[i, j, v] for i, r in enumerate(rows) for j, v in enumerate(r) if v != "0"]}


def matrix_from_sparse(field, data):
    n, m = data["shape"]
    M = Matrix.zeros(field, n, m)
    for i, j, v in data["entries"]:
        M.rows[i][j] = field(v)
    return M


def _order_entry(p, rec, with_timings):
    out = {
        "order": p,
        "size": rec["reduced"].nrows,
        "lve": sparse(rec["lve"].matrix),
        "prereduced": sparse(rec["prereduced"]),
        "reduced": sparse(rec["reduced"]),
        "gauge": sparse(rec["gauge"]),
        "lie_dimension": rec["lie"].dim if rec["lie"] is not None else None,
        "abelian": rec["lie"].abelian if rec["lie"] is not None else None,
        "envelope_dimension": rec.get("envelope"),
    }
    dec = rec.get("decomposition")
    if dec is not None:
        out["off_diagonal_dimension"] = dec.sub.dim
        out["eigenvalues"] = [str(v) for v in dec.eigenvalues]
        out["flag_dimensions"] = [[len(l) for l in sp.levels] for sp in dec.spaces]
        out["diagonalizable"] = dec.is_diagonalizable()
        out["minimal_polynomial"] = [[str(v), k] for v, k in dec.minimal_polynomial()]
    out["steps"] = [{"eigenvalue": str(s.eigenvalue), "level": s.level, "t": s.t, "s": s.s,
                     "factor": sparse(s.factor) if s.factor is not None else None}
                    for s in rec.get("steps", [])]
    if with_timings:
        out["seconds"] = rec.get("seconds")
    return out


def _witness(w):
    out = {}
    for key, val in w.items():
        if isinstance(val, list) and val and isinstance(val[0], list):
            out[key] = dense_to_sparse(val)
        else:
            out[key] = val
    return out


def build_report(doc, verdict, state, with_timings=False, seconds=None):
    rep = {
        "schema": SCHEMA,
        "constants": doc.tower.describe(),
        "hamiltonian": doc.to_dict()["hamiltonian"],
        "curve": [str(c) for c in doc.curve],
        "run": doc.to_dict()["run"],
        "orders": [_order_entry(p, state.orders[p], with_timings) for p in sorted(state.orders)],
        "verdict": {"kind": verdict.kind, "order": verdict.order,
                    "witness": _witness(verdict.witness)},
    }
    if with_timings:
        rep["seconds"] = seconds
    return rep


def render_structured(report):
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def render_text(report):
    lines = [f"verdict: {report['verdict']['kind']}({report['verdict']['order']})"]
    for o in report["orders"]:
        lines.append(f"order {o['order']}: size {o['size']}, Lie dimension {o['lie_dimension']}, "
                     f"abelian {o['abelian']}, envelope {o['envelope_dimension']}")
        if "eigenvalues" in o:
            lines.append(f"  off-diagonal dimension {o['off_diagonal_dimension']}")
            lines.append("  eigenvalues: " + ", ".join(o["eigenvalues"]))
            lines.append("  minimal polynomial: " + " ".join(
                f"(X - ({v}))" + (f"^{k}" if k > 1 else "") for v, k in o["minimal_polynomial"]))
            lines.append(f"  diagonalizable: {o['diagonalizable']}")
            removed = sum(s["s"] for s in o["steps"])
            lines.append(f"  reduction steps: {len(o['steps'])}, directions removed: {removed}")
        if "seconds" in o and o["seconds"] is not None:
            lines.append(f"  seconds: {o['seconds']:.2f}")
        red = o["reduced"]
        lines.append(f"  reduced matrix ({red['shape'][0]}x{red['shape'][1]}), nonzero entries:")
        for i, j, v in red["entries"]:
            lines.append(f"    [{i},{j}] {v}")
    w = report["verdict"]["witness"]
    if w:
        lines.append("witness:")
        for key in sorted(w):
            lines.append(f"  {key}: {json.dumps(w[key], sort_keys=True)}")
    return "\n".join(lines) + "\n"


# -- subcommands -------------------------------------------------------------------


def _emit(text_out, structured_out, fmt, output):
    main_text = structured_out if fmt == "structured" else text_out
    if output:
        Path(output).write_text(main_text)
        other = text_out if fmt == "structured" else structured_out
        suffix = ".txt" if fmt == "structured" else ".json"
        Path(str(output) + suffix).write_text(other)
    else:
        sys.stdout.write(main_text)


def cmd_run(args):
    doc = load_document(args.document)
    if args.p_max is not None:
        doc.run.p_max = args.p_max
    if args.mode is not None:
        doc.run.mode = args.mode
    if args.degree_cap is not None:
        doc.run.degree_cap = args.degree_cap
    if args.iterate_unreduced:
        doc.run.iterate_unreduced = True
    sysH = doc.system()
    ok, wit = verify_curve(sysH, doc.curve)
    if not ok:
        raise CurveMismatch(*wit)
    t0 = time.perf_counter()
    try:
        verdict, state = mrs_driver(sysH, doc.curve, doc.run.p_max, doc.run.mode,
                                    doc.ve1_gauge, doc.ve1_expected, doc.run.degree_cap,
                                    iterate_unreduced=doc.run.iterate_unreduced)
    except DiagonalNotAbelian as e:
        order = (e.order or 2) - 1
        print(f"diagonal part not abelian: obstruction at order {order}", file=sys.stderr)
        return EXIT_OBSTRUCTION
    report = build_report(doc, verdict, state, args.timings, time.perf_counter() - t0)
    _emit(render_text(report), render_structured(report), args.format, args.output)
    return EXIT_OBSTRUCTION if verdict.kind == OBSTRUCTION else EXIT_OK


def cmd_verify_gauge(args):
    data = load_data(args.document)
    tower = tower_from(data.get("constants"))
    field = RationalFunctionField(tower)
    A = _matrix(field, data["A"], "A")
    P = _matrix(field, data["P"], "P")
    B = _matrix(field, data["B"], "B")
    if not (A.nrows == A.ncols == P.nrows == P.ncols == B.nrows == B.ncols):
        raise DocumentError("A, P and B must be square of equal size")
    inverse = bool(args.inverse or data.get("inverse", False))
    ok, diff = verify_gauge(A, P, B, inverse)
    report = {"schema": SCHEMA, "relation": "P^-1[A] = B" if inverse else "P[A] = B",
              "holds": ok, "difference": sparse(diff)}
    text = f"{report['relation']}: {'true' if ok else 'false'}\n"
    if not ok:
        text += "difference P[A] - B, nonzero entries:\n"
        text += "".join(f"  [{i},{j}] {v}\n" for i, j, v in report["difference"]["entries"])
    _emit(text, render_structured(report), args.format, args.output)
    return EXIT_OK if ok else EXIT_FALSE


def cmd_build_ve(args):
    doc = load_document(args.document)
    sysH = doc.system()
    ok, wit = verify_curve(sysH, doc.curve)
    if not ok:
        raise CurveMismatch(*wit)
    M = build_lve(sysH, doc.curve, args.p).matrix
    report = {"schema": SCHEMA, "order": args.p, "matrix": sparse(M)}
    text = "\n".join("[" + ", ".join(r) + "]" for r in M.to_strings()) + "\n"
    _emit(text, render_structured(report), args.format, args.output)
    return EXIT_OK


def cmd_sym_power(args):
    data = load_data(args.document)
    tower = tower_from(data.get("constants"))
    field = RationalFunctionField(tower)
    A = _matrix(field, data["A"], "A")
    M = sym_power(A, args.p)
    report = {"schema": SCHEMA, "order": args.p, "matrix": sparse(M)}
    text = "\n".join("[" + ", ".join(r) + "]" for r in M.to_strings()) + "\n"
    _emit(text, render_structured(report), args.format, args.output)
    return EXIT_OK


def _common(p):
    p.add_argument("document", help="problem document (YAML or JSON)")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--format", choices=["text", "structured"], default="text")


def make_parser():
    parser = argparse.ArgumentParser(prog="mrsreduce",
                                     description="Reduced forms of variational equations "
                                                 "and the abelianity test.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the order-by-order reduction")
    _common(p)
    p.add_argument("--p-max", type=int)
    p.add_argument("--mode", choices=["full", "simplified"])
    p.add_argument("--degree-cap", type=int)
    p.add_argument("--iterate-unreduced", action="store_true")
    p.add_argument("--timings", action="store_true", help="include timings in the report")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify-gauge", help="check P[A] = B")
    _common(p)
    p.add_argument("--inverse", action="store_true", help="check P^-1[A] = B instead")
    p.set_defaults(func=cmd_verify_gauge)

    p = sub.add_parser("build-ve", help="print the matrix of the order-p variational equation")
    _common(p)
    p.add_argument("--p", type=int, default=2)
    p.set_defaults(func=cmd_build_ve)

    p = sub.add_parser("sym-power", help="print sym^p of a matrix")
    _common(p)
    p.add_argument("--p", type=int, default=2)
    p.set_defaults(func=cmd_sym_power)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EigenvalueOutsideTower, DegreeCapExceeded) as e:
        _report_error(e)
        return EXIT_TOWER
    except CurveMismatch as e:
        _report_error(e)
        print(f"witness: component {e.component}, residual {e.residual}", file=sys.stderr)
        return EXIT_INPUT
    except (MRSError, DocumentError, OSError, KeyError, ValueError, yaml.YAMLError) as e:
        _report_error(e)
        return EXIT_INPUT


def _report_error(e):
    op = next((name for cls, name in _OPERATION.items() if isinstance(e, cls)), "input")
    order = getattr(e, "order", None)
    where = f" at order {order}" if order is not None else ""
    print(f"error in {op}{where}: {e}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
