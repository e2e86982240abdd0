"""Command-line front end: classify, build, sweep, verify."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConelikeError, OutOfDomain
from .tetra import classify, make_params
from .verify import Tolerances, diagonal_points, grid_points, summarize, sweep, verify_film

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3
MESH_SUFFIXES = (".obj", ".ply")
log = logging.getLogger("conelike")


class BadInput(ValueError):
    pass


@dataclass
class RunConfig:
    s: float | None = None
    t: float | None = None
    resolution: int = 64
    tol_conformal: float = 1e-6
    tol_geom: float = 1e-4
    tol_F: float = 1e-10
    out: str | None = None
    report: str | None = None
    seed: int = 0
    n: int = 5

    def validate(self) -> "RunConfig":
        if self.out and Path(self.out).suffix and Path(self.out).suffix.lower() not in MESH_SUFFIXES:
            raise BadInput(f"unsupported mesh format {Path(self.out).suffix!r}; use .obj or .ply")
        if self.resolution < 8:
            raise BadInput("resolution must be at least 8")
        for name in ("tol_conformal", "tol_geom", "tol_F"):
            if not getattr(self, name) > 0:
                raise BadInput(f"{name} must be positive")
        return self

    def tolerances(self) -> Tolerances:
        return Tolerances(tol_conformal=self.tol_conformal, tol_geom=self.tol_geom, tol_F=self.tol_F)


def read_config(path) -> dict:
    """Plain key=value lines; '#' starts a comment."""
    types = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadInput(f"{path}:{lineno}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        if key not in types:
            raise BadInput(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(key: str, value):
    if value is None:
        return None
    kind = {f.name: f.type for f in fields(RunConfig)}[key]
    try:
        if "int" in str(kind):
            return int(value)
        if "float" in str(kind):
            return float(value)
    except ValueError as exc:
        raise BadInput(f"bad value for {key}: {value!r}") from exc
    return value


def make_config(args) -> RunConfig:
    values = read_config(args.config) if getattr(args, "config", None) else {}
    for key in ("s", "t", "resolution", "out", "report", "seed", "n"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if getattr(args, "tol", None) is not None:
        values["tol_conformal"] = args.tol
    cfg = RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
    return cfg.validate()


def _params(cfg: RunConfig):
    if cfg.s is None or cfg.t is None:
        raise BadInput("--s and --t are required")
    return make_params(cfg.s, cfg.t)


def _write_report(rep, path):
    if path:
        Path(path).write_text(rep.to_json(indent=2))


def cmd_classify(cfg: RunConfig) -> int:
    print(classify(_params(cfg), cfg.tol_F))
    return EXIT_OK


def _build_and_verify(cfg: RunConfig):
    from .assembly import build_film
    p = _params(cfg)
    film = build_film(p, cfg.resolution, cfg.tolerances())
    rep = verify_film(p, film, cfg.tolerances(), cfg.resolution)
    rep.solver["seed"] = cfg.seed
    return film, rep


def _solver_failure(cfg: RunConfig, exc: ConelikeError) -> int:
    from .verify import VerificationReport
    region = str(classify(make_params(cfg.s, cfg.t), cfg.tol_F))
    rep = VerificationReport(cfg.s, cfg.t, region, error=f"{type(exc).__name__}: {exc}")
    for attr in ("residual", "x"):
        if hasattr(exc, attr):
            rep.solver[attr] = getattr(exc, attr)
    _write_report(rep, cfg.report or _default_report(cfg))
    print(f"solver failure: {rep.error}", file=sys.stderr)
    return EXIT_SOLVER


def _default_report(cfg: RunConfig) -> str:
    if cfg.out:
        return str(Path(cfg.out).with_suffix(".json"))
    return f"report_{cfg.s:g}_{cfg.t:g}.json"


def cmd_build(cfg: RunConfig) -> int:
    from .meshio import write_mesh
    try:
        film, rep = _build_and_verify(cfg)
    except OutOfDomain:
        raise
    except ConelikeError as exc:
        return _solver_failure(cfg, exc)
    out = cfg.out or f"film_{cfg.s:g}_{cfg.t:g}.obj"
    write_mesh(film, out)
    report = cfg.report or _default_report(cfg)
    _write_report(rep, report)
    print(f"{rep.region}: {'pass' if rep.passed else 'FAIL'}; mesh {out}; report {report}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_verify(cfg: RunConfig) -> int:
    try:
        _, rep = _build_and_verify(cfg)
    except OutOfDomain:
        raise
    except ConelikeError as exc:
        return _solver_failure(cfg, exc)
    _write_report(rep, cfg.report)
    for c in rep.checks:
        print(f"{'pass' if c.passed else 'FAIL'}  {c.name}  value={c.value:.6g}  tol={c.tol:.3g}")
    print(f"{rep.region}: {'pass' if rep.passed else 'FAIL'}")
    return EXIT_OK if rep.passed else EXIT_FAIL


SUMMARY_FIELDS = ("s", "t", "region", "tpoint_angle_deg", "dihedral_min_deg", "pass", "error")


def cmd_sweep(cfg: RunConfig, diagonal: bool = False, classify_only: bool = False) -> int:
    grid = diagonal_points() if diagonal else grid_points(cfg.n)
    reports = sweep(grid, cfg.tolerances(), cfg.resolution, build=not classify_only)
    out = Path(cfg.out or "sweep")
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for rep in reports:
        (out / f"report_{rep.s:.6f}_{rep.t:.6f}.json").write_text(rep.to_json(indent=2))
        rows.append({"s": f"{rep.s:.6f}", "t": f"{rep.t:.6f}", "region": rep.region,
                     "tpoint_angle_deg": rep.solver.get("tpoint_angle_deg", ""),
                     "dihedral_min_deg": rep.solver.get("dihedral_min_deg", ""),
                     "pass": rep.passed, "error": rep.error or ""})
    with open(out / "summary.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, SUMMARY_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
    summ = summarize(reports)
    print(json.dumps(summ))
    return EXIT_OK if not summ["failed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conelike", description="Conelike soap films on tetrahedra")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, point=True):
        if point:
            p.add_argument("--s", type=float)
            p.add_argument("--t", type=float)
        p.add_argument("--resolution", type=int)
        p.add_argument("--tol", type=float, help="conformal solver tolerance")
        p.add_argument("--out")
        p.add_argument("--report")
        p.add_argument("--seed", type=int)
        p.add_argument("--config", help="key=value file; flags override it")

    p = sub.add_parser("classify", help="print the region label")
    p.add_argument("--s", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--config")
    common(sub.add_parser("build", help="build, verify and export a film"))
    common(sub.add_parser("verify", help="build and print the check table"))
    p = sub.add_parser("sweep", help="verify a grid of parameters")
    common(p, point=False)
    p.add_argument("--n", type=int)
    p.add_argument("--diagonal", action="store_true", help="use points on s = t instead of a grid")
    p.add_argument("--classify-only", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if not args.verbose:
        warnings.simplefilter("ignore")
    try:
        cfg = make_config(args)
        if args.command == "classify":
            return cmd_classify(cfg)
        if args.command == "build":
            return cmd_build(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        return cmd_sweep(cfg, args.diagonal, args.classify_only)
    except (BadInput, OutOfDomain, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
