"""Batch front end: ``stackycdga <command> FILE [options]``.

Exit status: 0 pass, 1 fail, 2 unknown, 3 input error.
"""
from __future__ import annotations

import argparse
import itertools
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from . import __version__
from . import doldkan as dk
from .algebra import format_element
from .cdga import CDGA, check_d_squared, check_module_d_squared, cohomology_dim
from .constructions import ce_flatness_equivalence, chevalley_eilenberg, de_rham
from .errors import CDGAError, ParseError
from .etale import check_etale, check_geometric
from .mcgauge import (
    ConnectionData,
    GaugeElement,
    MatrixLieData,
    PointCandidate,
    QuotientModule,
    cartesian_check,
    flatness_check,
    gauge_transform,
    mc_check,
    point_check,
)
from .report import Verdict, VerificationReport, combine
from .serialize import (
    ReportDocument,
    cdga_to_json,
    lie_to_json,
    load_document,
    matrix_to_json,
    parse_action,
    parse_affine,
    parse_cdga,
    parse_dual_weights,
    parse_elem,
    parse_lie,
    parse_matrix,
    parse_module,
    parse_morphism,
    parse_scalar,
)
from .totalization import ChainCochainComplex, check_bicomplex, hat_tot, tangent_base_change, tangent_complex

EXIT_INPUT_ERROR = 3


@dataclass
class JobSpec:
    command: str
    document: Dict[str, Any]
    weight_bound: int = 4
    degree_bound: int = 3
    seed: int = 0
    format: str = "text"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise CDGAError(f"unknown command {self.command!r}")
        for name in ("weight_bound", "degree_bound"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
                raise CDGAError(f"{name.replace('_', '-')} must be a positive integer, got {v!r}")
        if self.format not in ("text", "structured"):
            raise CDGAError("format must be 'text' or 'structured'")

    @property
    def options(self) -> Dict[str, Any]:
        return {"weight_bound": self.weight_bound, "degree_bound": self.degree_bound, "seed": self.seed}

    @property
    def expect(self) -> Any:
        """``job.expect``: a value the command's result must reproduce."""
        job = self.document.get("job", {})
        return job.get("expect") if isinstance(job, dict) else None


Outcome = Tuple[VerificationReport, Dict[str, Any]]


def _weights(A: CDGA, bound: int) -> range:
    return range(-bound if A.presentation.inverted else 0, bound + 1)


def _cdga_or_ce(doc: Mapping) -> CDGA:
    """The algebra of the document, or the CE algebra of its quotient data."""
    if "generators" in doc:
        return parse_cdga(doc)
    Y = parse_affine(doc)
    g = parse_lie(doc)
    return chevalley_eilenberg(Y, g, parse_action(doc, Y, g), dual_weights=parse_dual_weights(doc))


def _expect_check(name: str, got: Any, want: Any) -> VerificationReport:
    if want is None:
        return VerificationReport(name, Verdict.PASS, "no expectation given")
    ok = got == want
    return VerificationReport(name, Verdict.of(ok), "matches expectation" if ok else "differs from expectation", witness={"expected": want, "found": got})


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------


def cmd_check_cdga(job: JobSpec) -> Outcome:
    A = _cdga_or_ce(job.document)
    return check_d_squared(A), {"algebra": cdga_to_json(A)}


def cmd_cohomology(job: JobSpec) -> Outcome:
    A = _cdga_or_ce(job.document)
    dsq = check_d_squared(A)
    if not dsq.passed:
        return dsq, {}
    table: Dict[str, Dict[str, int]] = {}
    totals = []
    for n in range(job.degree_bound + 1):
        row = {}
        for w in _weights(A, job.weight_bound):
            row[str(w)] = cohomology_dim(A, n, w)
        table[str(n)] = {k: v for k, v in row.items() if v}
        totals.append(sum(row.values()))
    exp = _expect_check("expected_dims", totals, job.expect)
    return combine("cohomology", [dsq, exp], "slice cohomology computed"), {"dims": totals, "by_weight": table}


def cmd_ce_build(job: JobSpec) -> Outcome:
    doc = job.document
    Y = parse_affine(doc)
    g = parse_lie(doc)
    alpha = parse_action(doc, Y, g)
    dw = parse_dual_weights(doc)
    rep = ce_flatness_equivalence(Y, g, alpha, dual_weights=dw)
    result: Dict[str, Any] = {"lie": lie_to_json(g)}
    if rep.passed:
        flat = {c.check: c for c in rep.children}
        if flat["d_squared"].passed:
            result["algebra"] = cdga_to_json(chevalley_eilenberg(Y, g, alpha, dual_weights=dw))
    # an inconsistent Lie or action datum is a FAIL, not a malformed document
    dsq = [c for c in rep.children if c.check == "d_squared"]
    return combine("ce_build", dsq + [rep], "Chevalley-Eilenberg algebra"), result


def cmd_derham_build(job: JobSpec) -> Outcome:
    A = de_rham(parse_affine(job.document))
    return check_d_squared(A), {"algebra": cdga_to_json(A)}


def cmd_denormalise(job: JobSpec) -> Outcome:
    A = parse_cdga(job.document)
    n = job.degree_bound
    ws = list(_weights(A, job.weight_bound))
    levels: Dict[str, Dict[str, Any]] = {}
    for k in range(n + 1):
        per = {}
        for w in ws:
            keys = dk.level_basis(A, k, w)
            if keys:
                per[str(w)] = {
                    "dim": len(keys),
                    "formula": dk.dimension_formula(A, k, w),
                    "basis": [dk.format_dlevel(dk.basis_element(A, k, key)) for key in keys],
                }
        levels[str(k)] = per
    dims_ok = all(v["dim"] == v["formula"] for per in levels.values() for v in per.values())
    dims = VerificationReport("dimension_formula", Verdict.of(dims_ok), "dim D^n A = sum_m C(n,m) dim A^m")
    rep = combine(
        "denormalise",
        [dims, dk.check_cosimplicial_identities(A, n, ws), dk.normalisation_roundtrip(A, n, ws)],
        f"D^k A for k <= {n}",
    )
    return rep, {"levels": levels}


def cmd_shuffle_table(job: JobSpec) -> Outcome:
    A = parse_cdga(job.document)
    n = job.degree_bound
    ws = list(_weights(A, job.weight_bound))
    basis = [(w, key) for w in ws for key in dk.level_basis(A, n, w)]
    elems = {k: dk.basis_element(A, n, k[1]) for k in basis}
    table = []
    comm = VerificationReport("commutative", Verdict.PASS, f"x * y = y * x on level {n}")
    for (a, xa), (b, xb) in itertools.combinations_with_replacement(basis, 2):
        if a + b > job.weight_bound:
            continue
        x, y = elems[(a, xa)], elems[(b, xb)]
        xy = dk.shuffle(x, y)
        table.append([dk.format_dlevel(x), dk.format_dlevel(y), dk.format_dlevel(xy)])
        if comm.passed and xy != dk.shuffle(y, x):
            comm = VerificationReport(
                "commutative", Verdict.FAIL, "shuffle product is not commutative", witness={"x": table[-1][0], "y": table[-1][1]}
            )
    return combine("shuffle_table", [comm], f"level {n}"), {"level": n, "table": table}


def cmd_check_etale(job: JobSpec) -> Outcome:
    B = _cdga_or_ce(job.document)
    f = parse_morphism(job.document, B)
    chain = f.check_chain_map()
    if not chain.passed:
        return chain, {}
    er = check_etale(f, weight_bound=job.weight_bound)
    return er.to_report(), {"etale": er.etale, "assumptions": list(er.assumptions)}


def cmd_check_geometric(job: JobSpec) -> Outcome:
    B = _cdga_or_ce(job.document)
    f = parse_morphism(job.document, B)
    return check_geometric(f), {}


def _matrix_lie(doc: Mapping, n: int) -> MatrixLieData:
    sec = doc.get("matrix_lie")
    if sec is None:
        return MatrixLieData(n)
    basis = sec.get("basis")
    if basis is not None:
        basis = [[[parse_scalar(x, "matrix_lie.basis") for x in row] for row in m] for m in basis]
    return MatrixLieData(sec.get("n", n), basis, sec.get("names"))


def cmd_mc_check(job: JobSpec) -> Outcome:
    B = _cdga_or_ce(job.document)
    omega = parse_matrix(B, job.document.get("omega"), "omega")
    return mc_check(_matrix_lie(job.document, len(omega)), B, omega), {}


def cmd_gauge(job: JobSpec) -> Outcome:
    doc = job.document
    B = _cdga_or_ce(doc)
    omega = parse_matrix(B, doc.get("omega"), "omega")
    sec = doc.get("gauge")
    if not isinstance(sec, dict):
        raise CDGAError("gauge: expected {\"g\": matrix, \"inverse\": matrix}")
    g = GaugeElement(B, parse_matrix(B, sec.get("g"), "gauge.g"), parse_matrix(B, sec.get("inverse"), "gauge.inverse"))
    out = gauge_transform(g, omega)
    lie = _matrix_lie(doc, len(omega))
    before = mc_check(lie, B, omega)
    after = mc_check(lie, B, out.omega)
    before.check, after.check = "mc_input", "mc_output"
    ok = before.passed == after.passed
    msg = "g.omega computed; MC status preserved" if ok else "MC status changed under the gauge action"
    return VerificationReport("gauge", Verdict.of(ok), msg, children=[before, after]), {"omega": matrix_to_json(out.omega)}


def cmd_point_check(job: JobSpec) -> Outcome:
    doc = job.document
    Y = parse_affine(doc)
    g = parse_lie(doc)
    alpha = parse_action(doc, Y, g)
    B = parse_cdga(doc) if "generators" in doc else chevalley_eilenberg(Y, g, alpha, dual_weights=parse_dual_weights(doc))
    sec = doc.get("point")
    if not isinstance(sec, dict):
        raise CDGAError("point: expected {\"y\": {...}, \"gamma\": {...}}")
    P = B.presentation
    y = {k: parse_elem(P, v, f"point.y.{k}") for k, v in sec.get("y", {}).items()}
    gamma = {k: parse_elem(P, v, f"point.gamma.{k}") for k, v in sec.get("gamma", {}).items()}
    return point_check(Y, g, alpha, B, PointCandidate(y, gamma)), {}


def cmd_flat_check(job: JobSpec) -> Outcome:
    B = _cdga_or_ce(job.document)
    sec = job.document.get("connection")
    if sec is None:
        raise CDGAError("missing section 'connection'")
    c = ConnectionData(B, parse_matrix(B, sec, "connection"))
    return flatness_check(c, seed=job.seed), {}


def cmd_cartesian_check(job: JobSpec) -> Outcome:
    B = _cdga_or_ce(job.document)
    sec = job.document.get("module")
    F = parse_module(B, sec)
    rels = []
    for k, r in enumerate(sec.get("relations", [])):
        if not isinstance(r, dict):
            raise CDGAError(f"module.relations[{k}]: expected {{basis: element}}")
        rels.append({F.index(b): parse_elem(B.presentation, v, f"module.relations[{k}].{b}") for b, v in r.items()})
    M = QuotientModule(F, rels)
    return cartesian_check(B, M, degree_bound=job.degree_bound, weight_bound=job.weight_bound), {}


def parse_bicomplex(sec: Any) -> ChainCochainComplex:
    if not isinstance(sec, dict):
        raise CDGAError("bicomplex: expected an object")
    dims = {}
    for k, cell in enumerate(sec.get("dims", [])):
        if not isinstance(cell, list) or len(cell) != 3:
            raise CDGAError(f"bicomplex.dims[{k}]: expected [i, j, dim]")
        dims[(cell[0], cell[1])] = cell[2]

    def maps(key):
        out = {}
        for k, entry in enumerate(sec.get(key, [])):
            if not isinstance(entry, dict) or "at" not in entry or "matrix" not in entry:
                raise CDGAError(f"bicomplex.{key}[{k}]: expected {{\"at\": [i, j], \"matrix\": rows}}")
            out[tuple(entry["at"])] = [[parse_scalar(x, f"bicomplex.{key}[{k}]") for x in row] for row in entry["matrix"]]
        return out

    return ChainCochainComplex(dims, maps("d"), maps("delta"))


def cmd_tot_hat(job: JobSpec) -> Outcome:
    V = parse_bicomplex(job.document.get("bicomplex"))
    bi = check_bicomplex(V)
    if not bi.passed:
        return bi, {}
    T = hat_tot(V)
    dsq = T.check_d_squared()
    coh = T.cohomology()
    dims = {str(m): T.dim(m) for m in T.degrees}
    hom = {str(m): v for m, v in coh.items()}
    exp = job.expect
    got = {k: v for k, v in hom.items() if v}
    return combine("tot_hat", [bi, dsq, _expect_check("expected_cohomology", got, exp)]), {"dims": dims, "cohomology": hom}


def cmd_tangent(job: JobSpec) -> Outcome:
    doc = job.document
    B = _cdga_or_ce(doc)
    T = tangent_complex(B)
    result = {"basis": [[b.name, b.degree, b.weight] for b in T.basis], "differential": T.differential_strings()}
    dsq = check_module_d_squared(T)
    if "morphism" not in doc:
        return dsq, result
    f = parse_morphism(doc, B)
    return combine("tangent", [dsq, tangent_base_change(f, weight_bound=job.weight_bound)]), result


COMMANDS: Dict[str, Callable[[JobSpec], Outcome]] = {
    "check-cdga": cmd_check_cdga,
    "cohomology": cmd_cohomology,
    "ce-build": cmd_ce_build,
    "derham-build": cmd_derham_build,
    "denormalise": cmd_denormalise,
    "shuffle-table": cmd_shuffle_table,
    "check-etale": cmd_check_etale,
    "check-geometric": cmd_check_geometric,
    "mc-check": cmd_mc_check,
    "gauge": cmd_gauge,
    "point-check": cmd_point_check,
    "flat-check": cmd_flat_check,
    "cartesian-check": cmd_cartesian_check,
    "tot-hat": cmd_tot_hat,
    "tangent": cmd_tangent,
}


def run(job: JobSpec) -> ReportDocument:
    t0 = time.perf_counter()
    report, result = COMMANDS[job.command](job)
    return ReportDocument(job.command, job.options, report, result, time.perf_counter() - t0, version=__version__)


# ----------------------------------------------------------------------
# argument handling
# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stackycdga", description="Exact verification of CDGA constructions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("input", help="JSON input document, or - for standard input")
    p.add_argument("--weight-bound", type=int, default=None)
    p.add_argument("--degree-bound", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="write the report here instead of standard output")
    p.add_argument("--format", choices=["text", "structured"], default="text")
    return p


def make_job(args: argparse.Namespace, text: str, source: str) -> JobSpec:
    doc = load_document(text, source)
    job = doc.get("job", {})
    if not isinstance(job, dict):
        raise CDGAError("job: expected an object")

    def pick(flag, key, default):
        return flag if flag is not None else job.get(key, default)

    return JobSpec(
        args.command,
        doc,
        weight_bound=pick(args.weight_bound, "weight_bound", 4),
        degree_bound=pick(args.degree_bound, "degree_bound", 3),
        seed=pick(args.seed, "seed", 0),
        format=args.format,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.input == "-":
            text, source = sys.stdin.read(), "<stdin>"
        else:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
            source = args.input
        doc = run(make_job(args, text, source))
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except CDGAError as exc:
        print(f"input error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    body = doc.to_json() if args.format == "structured" else doc.to_text()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return doc.exit_code


if __name__ == "__main__":
    sys.exit(main())
