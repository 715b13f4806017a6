"""Command line interface.

Exit codes: 0 certificate valid (or sweep clean), 2 hypotheses not
satisfied (or sweep violations), 1 input or usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .certify import (
    GapWindow,
    canonical_counterexample,
    certify_aposteriori,
    certify_apriori,
    enclosure_check,
    exact_subspace,
)
from .ensemble import counterexample_instance, random_sweep_specs, run_sweep
from .errors import EmptySelectionError, TanThetaError
from .fileio import (
    build_report,
    dumps_report,
    read_matrix_market,
    write_matrix_market,
    write_report,
    write_sweep_csv,
)
from .linalg import as_frame, hermitian_spectrum, orthonormalize, principal_angles, validate_hermitian

log = logging.getLogger("tantheta")

EXIT_OK, EXIT_INPUT, EXIT_HYPOTHESIS = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _load_pair(args):
    a = validate_hermitian(read_matrix_market(args.matrix))
    q1 = orthonormalize(read_matrix_market(args.frame))
    return a, q1


def _apriori_oracle(a, q1, cert) -> dict:
    spec = hermitian_spectrum(a)
    oracle = {"eigenvalues": spec.values.tolist(), "exact_largest_angle": None, "exact_tan": None,
              "enclosure_ok": None}
    if cert.valid:
        oracle["enclosure_ok"] = enclosure_check(spec, cert)
        try:
            x1 = exact_subspace(a, cert.window, "exterior")
        except EmptySelectionError:
            x1 = None
        if x1 is not None and x1.k == q1.k:
            ang = principal_angles(q1, x1).largest
            oracle.update(exact_largest_angle=ang, exact_tan=math.tan(ang))
    return oracle


def _aposteriori_oracle(a, q1, cert) -> dict:
    spec = hermitian_spectrum(a)
    oracle = {"eigenvalues": spec.values.tolist(), "exact_largest_angle": None, "exact_tan": None}
    if cert.valid:
        win = GapWindow(cert.interior_lo, cert.interior_hi, cert.window.gap)
        x1 = exact_subspace(a, win, "exterior", threshold=cert.tol)
        ang = principal_angles(q1, x1).largest
        oracle.update(exact_largest_angle=ang, exact_tan=math.tan(ang))
    return oracle


def _emit(report, out):
    if out:
        write_report(report, out)
    else:
        sys.stdout.write(dumps_report(report))


def cmd_apriori(args) -> int:
    a, q1 = _load_pair(args)
    cert = certify_apriori(a, q1)
    oracle = _apriori_oracle(a, q1, cert) if args.oracle else None
    _emit(build_report(cert, a, q1, oracle), args.out)
    return EXIT_OK if cert.valid else EXIT_HYPOTHESIS


def cmd_aposteriori(args) -> int:
    a, q1 = _load_pair(args)
    cert = certify_aposteriori(a, q1, (args.interior_lo, args.interior_hi))
    oracle = _aposteriori_oracle(a, q1, cert) if args.oracle else None
    _emit(build_report(cert, a, q1, oracle), args.out)
    return EXIT_OK if cert.valid else EXIT_HYPOTHESIS


def cmd_angles(args) -> int:
    u = orthonormalize(read_matrix_market(args.frame_a))
    v = orthonormalize(read_matrix_market(args.frame_b))
    sys.stdout.write(dumps_report(principal_angles(u, v).to_dict()))
    return EXIT_OK


SWEEP_DEFAULTS = {
    "master_seed": 0,
    "instances": 1000,
    "n_min": 4,
    "n_max": 64,
    "eps_min": 1e-6,
    "eps_max": 0.3,
    "gap_target": 1.0,
    "workers": 1,
    "include_counterexample": False,
}


def cmd_sweep(args) -> int:
    try:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise TanThetaError(f"cannot load sweep config {args.config}: {exc}") from exc
    unknown = set(cfg) - set(SWEEP_DEFAULTS)
    if unknown:
        raise TanThetaError(f"unknown sweep config keys: {sorted(unknown)}")
    cfg = {**SWEEP_DEFAULTS, **cfg}
    specs = random_sweep_specs(
        int(cfg["instances"]),
        master_seed=int(cfg["master_seed"]),
        n_range=(int(cfg["n_min"]), int(cfg["n_max"])),
        eps_range=(float(cfg["eps_min"]), float(cfg["eps_max"])),
        gap_target=float(cfg["gap_target"]),
    )
    if cfg["include_counterexample"]:
        specs.append(counterexample_instance())
    res = run_sweep(specs, workers=int(cfg["workers"]))
    write_sweep_csv(res, args.out)
    summary = {k: v for k, v in vars(res).items() if k != "rows"}
    sys.stdout.write(dumps_report(summary))
    return EXIT_OK if res.violations == 0 else EXIT_HYPOTHESIS


def cmd_counterexample(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    a, q1 = canonical_counterexample()
    write_matrix_market(out / "A.mtx", a.entries, comment="||R|| = sqrt(2) d; no eigenvalue in (-1, 1)")
    write_matrix_market(out / "Q1.mtx", q1.columns)
    cert = certify_apriori(a, q1)
    write_report(build_report(cert, a, q1, _apriori_oracle(a, q1, cert)), out / "report.json")
    log.info("wrote counterexample to %s", out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tantheta", description="tan(theta) certificates for approximate spectral subspaces")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, fn in (("apriori", cmd_apriori), ("aposteriori", cmd_aposteriori)):
        sp = sub.add_parser(name, help=f"{name} certificate for a matrix/frame pair")
        sp.add_argument("--matrix", required=True, help="Hermitian matrix A (.mtx)")
        sp.add_argument("--frame", required=True, help="basis Q1 of the trial subspace (.mtx)")
        if name == "aposteriori":
            sp.add_argument("--interior-lo", type=float, required=True)
            sp.add_argument("--interior-hi", type=float, required=True)
        sp.add_argument("--oracle", action="store_true", help="add exact eigendecomposition check")
        sp.add_argument("--out", help="write JSON report here instead of stdout")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("angles", help="principal angles between two frames")
    sp.add_argument("--frame-a", required=True)
    sp.add_argument("--frame-b", required=True)
    sp.set_defaults(func=cmd_angles)

    sp = sub.add_parser("sweep", help="randomized soundness sweep")
    sp.add_argument("--config", required=True, help="JSON sweep configuration")
    sp.add_argument("--out", required=True, help="CSV output path")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("counterexample", help="write the 3x3 sqrt(2) d boundary instance")
    sp.add_argument("--out", default="counterexample")
    sp.set_defaults(func=cmd_counterexample)
    return p


def cli_dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except TanThetaError as exc:
        print(f"tantheta: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(cli_dispatch())
