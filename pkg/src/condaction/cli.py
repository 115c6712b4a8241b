"""Command-line driver: ``condaction {spectrum,erase,curves,verify,dilate}``.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import spinmodel as sm
from . import suites
from .dilation import roundtrip_distances, standard_dilation
from .entropy import von_neumann_entropy
from .hilbert import DomainError, dagger, max_abs
from .instruments import effects_of, total_operation
from .wire import WireFormatError, dilation_to_json, dump, load_instrument, matrix_to_json

log = logging.getLogger("condaction")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
FORMATS = ("csv", "json", "svg")
SPECTRUM_MAX_N = 7


@dataclass
class RunConfig:
    command: str
    spin: sm.SpinBathConfig = field(default_factory=sm.SpinBathConfig)
    grid: int = 101
    out: Path = Path("out")
    format: str = "csv"
    seed: int = 0
    trials: int = suites.DEFAULT_TRIALS
    tol: float | None = None
    input: Path | None = None
    bits: bool = False

    def __post_init__(self):
        if self.grid < 2:
            raise DomainError("grid resolution must be at least 2")
        if self.format not in FORMATS:
            raise DomainError(f"format must be one of {FORMATS}")


def _fmt_spin(s: Fraction) -> str:
    return str(int(s)) if s.denominator == 1 else str(float(s))


def _write_rows(path: Path, header: list[str], rows: list[list]) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return path


def _write_table(cfg: RunConfig, stem: str, header: list[str], rows: list[list]) -> Path:
    if cfg.format == "json":
        return dump([dict(zip(header, r)) for r in rows], cfg.out / f"{stem}.json")
    return _write_rows(cfg.out / f"{stem}.csv", header, rows)


def _prepare(cfg: RunConfig) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)


def cmd_spectrum(cfg: RunConfig) -> list[Path]:
    _prepare(cfg)
    max_n = max(SPECTRUM_MAX_N, cfg.spin.n_bath + 1)
    table = sm.degeneracy_table(max_n)
    deg_rows = [[n, _fmt_spin(s), d, table.dimension(n)] for n, s, d in table.rows()]
    spec_rows = []
    for n in (cfg.spin.n_bath, cfg.spin.n_bath + 1):
        spec = sm.numerical_spectrum(sm.heisenberg_hamiltonian(cfg.spin, n))
        spec_rows += [[n, e, mult] for e, mult in spec.items()]
    return [
        _write_table(cfg, "degeneracies", ["N", "S", "D", "sum_check"], deg_rows),
        _write_table(cfg, "spectrum", ["N", "energy", "multiplicity"], spec_rows),
    ]


def erase_payload(spin: sm.SpinBathConfig) -> dict:
    ins = sm.erasure_instrument(spin)
    bmap = sm.bloch_affine_map(total_operation(ins))
    marks = sm.ellipsoid_landmarks(bmap)
    minimal = sm.minimal_kraus(ins)
    return {
        "config": asdict(spin),
        "bloch_matrix": bmap.matrix.tolist(),
        "bloch_block_det": float(np.linalg.det(bmap.linear_part)),
        "landmarks": {
            "center": matrix_to_json(marks.center),
            "north_image": matrix_to_json(marks.north_image),
            "south_image": matrix_to_json(marks.south_image),
            "semi_axes": [float(x) for x in marks.semi_axes],
        },
        "minimal_kraus": {n: [matrix_to_json(k) for k in minimal[n].kraus] for n in minimal.outcomes},
        "kraus_counts": {"dilation": dict(zip(ins.outcomes, ins.kraus_counts())),
                         "minimal": dict(zip(minimal.outcomes, minimal.kraus_counts()))},
        "effects": {n: matrix_to_json(f) for n, f in zip(ins.outcomes, effects_of(ins).effects)},
        "bath_entropy": von_neumann_entropy(sm.erasure_dilation(spin).sigma),
    }


def cmd_erase(cfg: RunConfig) -> list[Path]:
    _prepare(cfg)
    return [dump(erase_payload(cfg.spin), cfg.out / "erasure.json")]


CURVE_COLUMNS = ["p", "S0", "S1", "S2", "H", "delta_S", "total_initial", "total_final"]


def _svg_plots(points: list[sm.CurvePoint], out: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    s0 = np.array([pt.S0 for pt in points])
    s1 = np.array([pt.S1 for pt in points])
    h = np.array([pt.H for pt in points])
    p = np.array([pt.p for pt in points])
    paths = []

    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(s0, s1, "g-", label="S1 along rho(p)")
    ax.plot(s0, s0 - h, "b--", label="S0 - H")
    ax.plot([0, math.log(2)], [0, math.log(2)], "r-", label="S1 = S0")
    ax.set_xlabel("S0")
    ax.set_ylabel("S1")
    ax.legend()
    paths.append(out / "entropy_s1_vs_s0.svg")
    fig.savefig(paths[-1], metadata={"Date": None})
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(p, [pt.total_initial for pt in points], "r-", label="S0 + S_bath")
    ax.plot(p, [pt.total_final for pt in points], "b-", label="S1 + S2")
    ax.set_xlabel("p")
    ax.set_ylabel("entropy")
    ax.legend()
    paths.append(out / "entropy_totals.svg")
    fig.savefig(paths[-1], metadata={"Date": None})
    plt.close(fig)
    return paths


def curves_summary(spin: sm.SpinBathConfig, points: list[sm.CurvePoint]) -> dict:
    last = sm.entropy_curve(spin, [1.0])[0]
    half = sm.entropy_curve(spin, [0.5])[0]
    try:
        p1 = sm.find_p1(spin)
    except DomainError:
        p1 = None
    return {
        "config": asdict(spin),
        "p1": p1,
        "S_half": half.S1,
        "S_f": last.S1 + last.S2,
        "bath_entropy": von_neumann_entropy(sm.erasure_dilation(spin).sigma),
        "grid_points": len(points),
        "balance_holds_everywhere": all(pt.total_initial <= pt.total_final + 1e-9 for pt in points),
    }


def cmd_curves(cfg: RunConfig) -> list[Path]:
    _prepare(cfg)
    points = sm.entropy_curve(cfg.spin, np.linspace(0.0, 1.0, cfg.grid))
    scale = 1 / math.log(2) if cfg.bits else 1.0
    rows = [[pt.p] + [getattr(pt, c) * scale for c in CURVE_COLUMNS[1:]] for pt in points]
    paths = [_write_table(cfg, "curves", CURVE_COLUMNS, rows)]
    paths.append(dump(curves_summary(cfg.spin, points), cfg.out / "summary.json"))
    if cfg.format == "svg":
        paths += _svg_plots(points, cfg.out)
    return paths


def verify_payload(seed: int, trials: int, tol: float | None) -> dict:
    results = suites.run_all(seed=seed, trials=trials, tol=tol)
    return {
        "seed": seed,
        "trials": trials,
        "tol_override": tol,
        "passed": all(r.passed for r in results),
        "failing": [r.name for r in results if not r.passed],
        "properties": [r.to_dict() for r in results],
    }


def cmd_verify(cfg: RunConfig) -> tuple[list[Path], bool]:
    _prepare(cfg)
    payload = verify_payload(cfg.seed, cfg.trials, cfg.tol)
    path = dump(payload, cfg.out / "verify.json")
    for prop in payload["properties"]:
        log.info("%-22s %s  trials=%d worst_margin=%.3g", prop["name"],
                 "PASS" if prop["passed"] else "FAIL", prop["trials"], prop["worst_margin"])
    return [path], payload["passed"]


def dilate_payload(ins) -> dict:
    d = standard_dilation(ins)
    da = d.aux_dim
    slice_cols = d.V[:, [b * da for b in range(d.sys_dim)]]
    payload = dilation_to_json(d)
    payload["outcomes"] = list(ins.outcomes)
    payload["slice_isometry_error"] = max_abs(dagger(slice_cols) @ slice_cols - np.eye(d.sys_dim))
    payload["roundtrip_choi_distance"] = roundtrip_distances(ins)
    return payload


def cmd_dilate(cfg: RunConfig) -> list[Path]:
    if cfg.input is None:
        raise WireFormatError("dilate needs an input instrument file")
    ins = load_instrument(cfg.input)
    _prepare(cfg)
    return [dump(dilate_payload(ins), cfg.out / "dilation.json")]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="condaction", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n-bath", type=int, default=6)
    common.add_argument("--coupling", type=float, default=1.0, help="Heisenberg coupling J")
    common.add_argument("--field", type=float, default=1.0, help="Zeeman field B")
    common.add_argument("--time", type=float, default=2 * math.pi, help="evolution time t")
    common.add_argument("--grid", type=int, default=101)
    common.add_argument("--out", type=Path, default=Path("out"))
    common.add_argument("--format", choices=FORMATS, default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="degeneracy table and bath spectra")
    sub.add_parser("erase", parents=[common], help="Bloch map, Kraus operators, effects")
    p = sub.add_parser("curves", parents=[common], help="entropy curves along rho(p)")
    p.add_argument("--bits", action="store_true", help="report entropies in bits")
    p = sub.add_parser("verify", parents=[common], help="randomized property suites")
    p.add_argument("--trials", type=int, default=suites.DEFAULT_TRIALS)
    p.add_argument("--tol", type=float, default=None, help="override every suite tolerance")
    p = sub.add_parser("dilate", parents=[common], help="standard dilation of an instrument file")
    p.add_argument("input", type=Path)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s")
    try:
        cfg = RunConfig(
            command=args.command,
            spin=sm.SpinBathConfig(args.n_bath, args.coupling, args.field, args.time),
            grid=args.grid, out=args.out, format=args.format, seed=args.seed,
            trials=getattr(args, "trials", suites.DEFAULT_TRIALS),
            tol=getattr(args, "tol", None), input=getattr(args, "input", None),
            bits=getattr(args, "bits", False),
        )
    except DomainError as exc:
        parser.print_usage(sys.stderr)
        print(f"condaction: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if cfg.command == "verify":
            paths, ok = cmd_verify(cfg)
            if not ok:
                failing = json.loads(paths[0].read_text())["failing"]
                print(f"verification failed: {', '.join(failing)}", file=sys.stderr)
                return EXIT_FAIL
        else:
            handler = {"spectrum": cmd_spectrum, "erase": cmd_erase,
                       "curves": cmd_curves, "dilate": cmd_dilate}[cfg.command]
            paths = handler(cfg)
    except WireFormatError as exc:
        print(f"condaction: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"condaction: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
