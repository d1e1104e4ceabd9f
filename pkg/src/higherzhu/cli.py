"""Command-line front end: ``higherzhu <command> [flags]``.

Exit status is 0 on success, 1 when a verification fails and 2 on usage
errors (bad flags, unreadable inputs, inputs outside the truncation window).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .formal import format_scalar
from .matrix import SizeMismatch, UMatrix, diamond
from .modules import LowerBoundedModule, UnstableFiltration, build_gr, grvec_to_json, theta_apply
from .reduction import canonical_reduce, cn_quotient_dimension, ideal_experiment, quotient_dimension_table, reduced_basis
from .report import Report, dumps, reports_to_csv, table_to_csv
from .suites import (
    associator_suite,
    binomial_collapse_suite,
    corner_suite,
    filtration_suite,
    graded_axiom_suite,
    homomorphism_suite,
    irreducibility_probe,
    lder_suite,
    o_annihilation_suite,
    sl2_operator_suite,
    unit_suite,
    voa_axiom_suite,
)
from .voa import HEISENBERG, TruncationExceeded, VertexAlgebra
from .zhu import center_check, corner_agreement, dlm_product, polynomial_algebra_probe

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


class UsageError(Exception):
    pass


def rational(text: str) -> str:
    """argparse type: an integer or ``p/q``; decimals are rejected."""
    if not _RATIONAL.match(text.strip()):
        raise argparse.ArgumentTypeError(f"{text!r} is not an exact rational (use p/q)")
    value = Fraction(text.strip())
    return format_scalar(value)


def nonneg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 0:
        raise argparse.ArgumentTypeError("cutoffs must be nonnegative")
    return value


@dataclass(frozen=True)
class RunConfig:
    """Everything a command depends on.  Rationals are kept as ``p/q`` strings."""

    algebra: str = HEISENBERG
    central_charge: str | None = None
    mu: str = "1"
    h: str = "0"
    N: int = 1
    weight_cutoff: int = 4
    depth_cutoff: int = 4
    v_weight_cutoff: int = 2
    seed: int = 0
    format: str = "json"
    cache_dir: str | None = None

    def __post_init__(self):
        if self.algebra == HEISENBERG and self.central_charge is not None:
            raise UsageError("the Heisenberg algebra takes no central charge")
        if self.algebra != HEISENBERG and self.central_charge is None:
            raise UsageError("--central-charge is required for virasoro")
        for name in ("N", "weight_cutoff", "depth_cutoff", "v_weight_cutoff"):
            if getattr(self, name) < 0:
                raise UsageError(f"{name} must be nonnegative")

    @property
    def window(self) -> int:
        """Weight cutoff of the algebra: room for products of test-weight inputs."""
        return max(2, 2 * self.weight_cutoff + 2 * self.N + 2)

    def algebra_at(self, W: int) -> VertexAlgebra:
        if self.algebra == HEISENBERG:
            return VertexAlgebra.heisenberg(max(W, 2))
        return VertexAlgebra.virasoro(self.central_charge, max(W, 2))

    def module(self, V: VertexAlgebra) -> LowerBoundedModule:
        depth = self.depth_cutoff + self.N + 1
        if self.algebra == HEISENBERG:
            return LowerBoundedModule.fock(V, self.mu, depth)
        return LowerBoundedModule.verma(V, self.h, depth)

    def public(self) -> dict:
        """The config as it appears in artifacts (no paths)."""
        out = asdict(self)
        out.pop("cache_dir")
        out.pop("format")
        if self.algebra == HEISENBERG:
            out.pop("central_charge")
            out.pop("h")
        else:
            out.pop("mu")
        return out


# -- commands ---------------------------------------------------------------


def informational(rep: Report) -> bool:
    return bool(rep.details.get("informational"))


def gate(reports: list[Report]) -> int:
    return EXIT_OK if all(r.passed for r in reports if not informational(r)) else EXIT_FAIL


def run_selftest(cfg: RunConfig) -> list[Report]:
    V = cfg.algebra_at(cfg.weight_cutoff + 2)
    return [voa_axiom_suite(V, op_weight=min(3, cfg.weight_cutoff))]


def dims_report(cfg: RunConfig, V: VertexAlgebra) -> Report:
    wc = cfg.weight_cutoff
    rep = Report("quotient-dimensions", "quotient-dimensions", {"algebra": V.desc.tag(), "N": cfg.N, "w_max": wc})
    table = quotient_dimension_table(V, cfg.N, wc)
    c2 = cn_quotient_dimension(V, 2, wc)
    for ((k, l), w), d in sorted(table.items()):
        rep.record(0 <= d <= len(V.basis(w)), slot=[k, l], weight=w, dim=d)
    for w, d in c2.items():
        rep.record(0 <= d <= len(V.basis(w)), check="C2", weight=w, dim=d)
    rep.details["quotient"] = [[k, l, w, d] for ((k, l), w), d in sorted(table.items())]
    rep.details["C2"] = [[w, d] for w, d in sorted(c2.items())]
    return rep


def verify_all(cfg: RunConfig) -> list[Report]:
    """Every suite at the sizes implied by ``cfg``, in a fixed order."""
    wc, N, dc = cfg.weight_cutoff, cfg.N, cfg.depth_cutoff
    small = min(wc, 3)
    V = cfg.algebra_at(cfg.window)
    for k in range(N + 1):
        for l in range(N + 1):
            reduced_basis(V, (k, l), V.W, cfg.cache_dir)

    reports = [binomial_collapse_suite(6)]
    reports += run_selftest(cfg)
    reports.append(unit_suite(V, N_max=N, weight=wc))
    reports.append(lder_suite(V, weight=small, index_max=N))
    reports.append(associator_suite(V, N, samples=50, weight_budget=wc, seed=cfg.seed))
    reports.append(ideal_experiment(V, N, gen_cutoff=wc, factor_cutoff=min(wc, 2), samples=20, seed=cfg.seed))
    reports.append(corner_agreement(V, N, wc))
    for n in range(N + 1):
        reports.append(center_check(V, n, wc))
    if V.kind == HEISENBERG:
        reports.append(polynomial_algebra_probe(V, min(wc + 1, V.W)))
    reports.append(dims_report(cfg, V))

    G = build_gr(cfg.module(V), N, cfg.v_weight_cutoff)
    reports += [
        homomorphism_suite(G, wc, dc),
        o_annihilation_suite(G, wc, dc),
        graded_axiom_suite(G, wc, dc),
        filtration_suite(G, small, dc),
        sl2_operator_suite(G, small, dc),
        corner_suite(G, small, dc),
        irreducibility_probe(G, small, dc),
    ]
    return reports


def manifest(cfg: RunConfig, reports: list[Report]) -> dict:
    return {
        "version": __version__,
        "config": cfg.public(),
        "properties": sorted({r.property for r in reports}),
        "suites": [
            {"name": r.name, "property": r.property, "passed": r.passed, "informational": informational(r)}
            for r in reports
        ],
    }


def load_matrix(path: str) -> UMatrix:
    try:
        return UMatrix.from_json(json.loads(Path(path).read_text()))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{path} is not a serialized matrix: {exc}") from None


# -- output -----------------------------------------------------------------


def write(out: str | None, name: str, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out) / name
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


def emit_reports(cfg: RunConfig, out: str | None, reports: list[Report], with_manifest: bool = False) -> None:
    if cfg.format == "csv":
        write(out, "report.csv", reports_to_csv(reports))
    else:
        doc = {"config": cfg.public(), "reports": [r.to_json() for r in reports]}
        write(out, "report.json", dumps(doc))
    if with_manifest and out is not None:
        write(out, "manifest.json", dumps(manifest(cfg, reports)))


def emit_table(cfg: RunConfig, out: str | None, name: str, header: list[str], rows: list[list], extra: dict | None = None) -> None:
    if cfg.format == "csv":
        write(out, f"{name}.csv", table_to_csv(header, rows))
    else:
        doc = {"config": cfg.public(), "columns": header, "rows": rows}
        doc.update(extra or {})
        write(out, f"{name}.json", dumps(doc))


def dispatch(command: str, cfg: RunConfig, args: argparse.Namespace) -> int:
    out = args.out
    if command == "selftest":
        reports = run_selftest(cfg)
        emit_reports(cfg, out, reports)
        return gate(reports)
    if command == "verify-all":
        reports = verify_all(cfg)
        emit_reports(cfg, out, reports, with_manifest=True)
        for r in reports:
            print(r.summary() + (" (informational)" if informational(r) else ""), file=sys.stderr)
        return gate(reports)

    V = cfg.algebra_at(cfg.window)
    if command == "dims":
        table = quotient_dimension_table(V, cfg.N, cfg.weight_cutoff)
        c2 = cn_quotient_dimension(V, 2, cfg.weight_cutoff)
        rows = [["O", k, l, w, d] for ((k, l), w), d in sorted(table.items())]
        rows += [["C2", None, None, w, d] for w, d in sorted(c2.items())]
        emit_table(cfg, out, "dims", ["quotient", "k", "l", "weight", "dim"], rows)
        return EXIT_OK
    if command == "diamond":
        A, B = load_matrix(args.inputs[0]), load_matrix(args.inputs[1])
        write(out, "diamond.json", dumps({"product": diamond(V, A, B)}))
        return EXIT_OK
    if command == "reduce":
        A = load_matrix(args.inputs[0])
        write(out, "reduce.json", dumps({"input": A, "canonical": canonical_reduce(V, A, cache_dir=cfg.cache_dir)}))
        return EXIT_OK
    if command == "zhu":
        gens = [V.vacuum, V.generator, V.omega]
        rows = [[u.to_json(), v.to_json(), dlm_product(V, cfg.N, u, v).to_json()] for u in gens for v in gens]
        reports = [center_check(V, cfg.N, cfg.weight_cutoff)]
        if V.kind == HEISENBERG:
            reports.append(polynomial_algebra_probe(V, min(cfg.weight_cutoff + 1, V.W)))
        emit_table(cfg, out, "zhu", ["u", "v", "product"], rows, {"reports": [r.to_json() for r in reports]})
        return gate(reports)
    if command == "act":
        G = build_gr(cfg.module(V), cfg.N, cfg.v_weight_cutoff)
        A = load_matrix(args.inputs[0])
        rows = [[grvec_to_json(g), grvec_to_json(theta_apply(G, A, g))] for g in G.all_basis(cfg.depth_cutoff)]
        emit_table(cfg, out, "act", ["g", "image"], rows, {"matrix": A.to_json()})
        return EXIT_OK
    raise UsageError(f"unknown command {command}")


# -- argument parsing ----------------------------------------------------------

ARITY = {"diamond": 2, "reduce": 1, "act": 1}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="higherzhu", description="Exact computations with higher level Zhu algebras.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("selftest", "diamond", "reduce", "dims", "zhu", "act", "verify-all"):
        p = sub.add_parser(name)
        p.add_argument("--algebra", choices=["heisenberg", "virasoro"], default="heisenberg")
        p.add_argument("--central-charge", type=rational)
        p.add_argument("--mu", type=rational, default="1")
        p.add_argument("--h", type=rational, default="0")
        p.add_argument("--N", type=nonneg, default=1)
        p.add_argument("--weight-cutoff", type=nonneg, default=4)
        p.add_argument("--depth-cutoff", type=nonneg, default=4)
        p.add_argument("--v-weight-cutoff", type=nonneg, default=2)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--cache-dir", default=os.environ.get("HIGHERZHU_CACHE"))
        p.add_argument("--out", help="directory for artifacts (default: stdout)")
        if name in ARITY:
            p.add_argument("inputs", nargs=ARITY[name], metavar="MATRIX.json")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(
            algebra=args.algebra,
            central_charge=args.central_charge,
            mu=args.mu,
            h=args.h,
            N=args.N,
            weight_cutoff=args.weight_cutoff,
            depth_cutoff=args.depth_cutoff,
            v_weight_cutoff=args.v_weight_cutoff,
            seed=args.seed,
            format=args.format,
            cache_dir=args.cache_dir,
        )
        return dispatch(args.command, cfg, args)
    except (UsageError, SizeMismatch, TruncationExceeded, UnstableFiltration, ValueError) as exc:
        print(f"higherzhu: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"higherzhu: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
