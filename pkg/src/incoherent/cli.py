"""Command line entry point: ``incoherent <command> --config run.json``.

Exit codes: 0 success, 2 configuration error, 3 a computed state or map left
the physical set, 4 oracle disagreement beyond the configured tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, canonical_json, load_config
from .dynamics import affine_map_numeric, bell_affine_map, evolve_general
from .model import Eigenbasis, gamma_matrix
from .oracle import DimensionCapError, FockCutoffs, Oracle
from .reachability import (
    IncommensurateBathError,
    accessibility_check,
    design_alpha4,
    detA_sixth_derivative,
    reachable_ellipsoid,
    swap_times,
)
from .states import PHYSICAL_TOL, PhysicalityError, density_defects, density_to_bloch, purity

log = logging.getLogger("incoherent")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_ORACLE = 4

PAIRS = [(i, j) for i in range(4) for j in range(i + 1, 4)]
ELLIPSOID_SAMPLES = 256


class OracleMismatch(RuntimeError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _meta(cfg: RunConfig, command: str, seed: int) -> dict:
    return {"tool": "incoherent", "version": __version__, "command": command, "config_sha256": cfg.sha256, "seed": seed}


def write_table(cfg: RunConfig, out_dir: Path, stem: str, header: Sequence[str], rows: Iterable[Sequence], meta: dict) -> list[Path]:
    rows = [list(r) for r in rows]
    written = []
    if "csv" in cfg.formats:
        buf = io.StringIO()
        buf.write(f"# {meta['tool']} {meta['version']} command={meta['command']} config_sha256={meta['config_sha256']} seed={meta['seed']}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])
        path = out_dir / f"{stem}.csv"
        _atomic_write(path, buf.getvalue())
        written.append(path)
    if "json" in cfg.formats:
        records = [dict(zip(header, (float(x) if isinstance(x, np.floating) else x for x in r))) for r in rows]
        path = out_dir / f"{stem}.json"
        _atomic_write(path, canonical_json({"meta": meta, "columns": list(header), "rows": records}))
        written.append(path)
    return written


def write_report(out_dir: Path, name: str, meta: dict, body: dict) -> Path:
    path = out_dir / name
    _atomic_write(path, canonical_json({"meta": meta, **body}))
    return path


def _check_physical(rho, where: str) -> None:
    d = density_defects(rho)
    if d["trace_error"] > PHYSICAL_TOL or d["hermiticity_error"] > PHYSICAL_TOL or d["min_eigenvalue"] < -PHYSICAL_TOL:
        raise PhysicalityError(f"non-physical state at {where}: {d}")


def cmd_simulate(cfg: RunConfig, out_dir: Path, seed: int) -> dict:
    meta = _meta(cfg, "simulate", seed)
    rho_s = cfg.initial_s.density_matrix()
    header = ["probe", "t", "s_x", "s_y", "s_z"] + [f"abs_gamma_{i + 1}{j + 1}" for i, j in PAIRS] + ["purity"]
    rows = []
    for label, p in cfg.probes.items():
        rho_p = p.density_matrix()
        for t in cfg.times:
            rho = evolve_general(cfg.interaction, cfg.bath, rho_s, rho_p, float(t))
            _check_physical(rho, f"probe={label} t={t!r}")
            g = np.abs(gamma_matrix(cfg.interaction, cfg.bath, float(t)))
            rows.append([label, float(t), *density_to_bloch(rho), *(g[i, j] for i, j in PAIRS), purity(rho)])
    files = write_table(cfg, out_dir, "trajectory", header, rows, meta)
    return {"files": [str(f) for f in files], "rows": len(rows)}


def _affine(cfg: RunConfig, t: float):
    if cfg.interaction.eigenbasis is Eigenbasis.BELL:
        return bell_affine_map(cfg.interaction, cfg.bath, cfg.initial_s, t)
    return affine_map_numeric(cfg.interaction, cfg.bath, cfg.initial_s, t)


def cmd_reachable(cfg: RunConfig, out_dir: Path, seed: int) -> dict:
    meta = _meta(cfg, "reachable", seed)
    rng = np.random.default_rng(seed)
    header = ["t", "center_x", "center_y", "center_z", "semi_1", "semi_2", "semi_3"]
    header += [f"axis{k}_{c}" for k in (1, 2, 3) for c in "xyz"]
    rows = []
    worst_radius = 0.0
    for t in cfg.times:
        ell = reachable_ellipsoid(_affine(cfg, float(t)))
        radius = float(np.max(np.linalg.norm(ell.surface_points(ELLIPSOID_SAMPLES, rng), axis=1)))
        worst_radius = max(worst_radius, radius)
        if radius > 1 + PHYSICAL_TOL:
            raise PhysicalityError(f"reachable ellipsoid at t={t!r} leaves the Bloch ball (radius {radius!r})")
        rows.append([float(t), *ell.center, *ell.semi_axes, *ell.axes.T.reshape(-1)])
    files = write_table(cfg, out_dir, "ellipsoids", header, rows, meta)
    return {"files": [str(f) for f in files], "rows": len(rows), "max_sampled_radius": worst_radius}


def cmd_access(cfg: RunConfig, out_dir: Path, seed: int) -> dict:
    meta = _meta(cfg, "access", seed)
    inter = cfg.interaction
    certificate = None
    note = None
    if inter.eigenbasis is Eigenbasis.BELL:
        certificate = detA_sixth_derivative(inter, cfg.bath, cfg.initial_s)
    elif inter.eigenbasis is Eigenbasis.FACTORIZED:
        note = "product eigenvectors: states diagonal in the eigenbasis never move, the system is not accessible"
    else:
        note = "eigenvalue criterion and determinant certificate apply to the Bell eigenbasis only"
    verdict = accessibility_check(inter.alphas, certificate)
    body = {
        "alphas": list(inter.alphas),
        "eigenbasis": inter.eigenbasis.value,
        "conditions_hold": list(verdict.holds),
        "status": verdict.status.value,
        "det_A_sixth_derivative": certificate,
        "note": note,
    }
    path = write_report(out_dir, "access.json", meta, body)
    return {"files": [str(path)], **body}


def _search_alpha4(cfg: RunConfig) -> float:
    if cfg.alpha4 is not None:
        return cfg.alpha4
    a = cfg.interaction.alphas
    if any(x != 0 for x in a[:3]):
        raise ConfigError("interaction.alphas", "swap search needs alphas (0, 0, 0, alpha4) or an explicit search.alpha4")
    return a[3]


def cmd_control_search(cfg: RunConfig, out_dir: Path, seed: int) -> dict:
    meta = _meta(cfg, "control-search", seed)
    alpha4 = _search_alpha4(cfg)
    sols = swap_times(cfg.bath, alpha4, cfg.k1_max)
    header = ["t_hat", "k1", "k2", "alpha4"]
    rows = [[s.t_hat, s.k1, ";".join(str(k) for k in s.k2), s.alpha4] for s in sols]
    files = write_table(cfg, out_dir, "swaps", header, rows, meta)
    return {"files": [str(f) for f in files], "solutions": len(sols), "alpha4": alpha4}


def cmd_design(cfg: RunConfig, out_dir: Path, seed: int, k1: int | None = None, k2: list[int] | None = None) -> dict:
    meta = _meta(cfg, "design", seed)
    k1 = cfg.k1 if k1 is None else k1
    k2 = cfg.k2 if k2 is None else k2
    if k1 is None:
        raise ConfigError("search.k1", "is required for design (or pass --k1)")
    if k2 is None:
        raise ConfigError("search.k2", "is required for design (or pass --k2)")
    if len(k2) != len(cfg.bath):
        raise ConfigError("search.k2", f"must have {len(cfg.bath)} entries")
    try:
        alpha4 = design_alpha4(cfg.bath, k1, k2)
    except ValueError as exc:
        raise ConfigError("search.k2", str(exc)) from None
    t_hat = 2 * np.pi * k2[0] / cfg.bath.omegas[0]
    matches = [s for s in swap_times(cfg.bath, alpha4, max(k1, 0)) if s.k1 == k1 and np.isclose(s.t_hat, t_hat, rtol=1e-9)]
    body = {"k1": k1, "k2": list(k2), "alpha4": alpha4, "t_hat": float(t_hat), "verified_by_search": bool(matches)}
    path = write_report(out_dir, "design.json", meta, body)
    return {"files": [str(path)], **body}


def cmd_verify(cfg: RunConfig, out_dir: Path, seed: int) -> dict:
    meta = _meta(cfg, "verify", seed)
    alpha_max = max(abs(a) for a in cfg.interaction.alphas) or 1.0
    cutoffs = cfg.cutoffs or FockCutoffs.heuristic(cfg.bath, alpha_max)
    base = Oracle(cfg.interaction, cfg.bath, cutoffs, cfg.bath_state)
    try:
        fine = Oracle(cfg.interaction, cfg.bath, cutoffs.doubled(), cfg.bath_state)
    except DimensionCapError:
        fine = None
        log.warning("doubled cutoffs exceed the dimension cap; convergence column left empty")
    rho_s = cfg.initial_s.density_matrix()
    header = ["probe", "t", "max_abs_delta_rho", "delta_s_x", "delta_s_y", "delta_s_z", "max_abs_delta_rho_doubled"]
    rows = []
    worst = 0.0
    for label, p in cfg.probes.items():
        rho_p = p.density_matrix()
        refs = base.evolve_many(rho_s, rho_p, cfg.times)
        fines = fine.evolve_many(rho_s, rho_p, cfg.times) if fine is not None else [None] * len(refs)
        for t, ref, ref_fine in zip(cfg.times, refs, fines):
            exact = evolve_general(cfg.interaction, cfg.bath, rho_s, rho_p, float(t))
            delta = float(np.max(np.abs(exact - ref)))
            ds = np.abs(density_to_bloch(exact) - density_to_bloch(ref))
            doubled = "" if ref_fine is None else float(np.max(np.abs(exact - ref_fine)))
            worst = max(worst, delta)
            rows.append([label, float(t), delta, *ds, doubled])
    files = write_table(cfg, out_dir, "verify", header, rows, meta)
    body = {
        "cutoffs": list(cutoffs.dims),
        "bath_state": "vacuum" if cfg.bath_state.is_vacuum else "thermal",
        "max_abs_delta_rho": worst,
        "tolerance": cfg.oracle_tolerance,
        "passed": worst <= cfg.oracle_tolerance,
    }
    files.append(write_report(out_dir, "verify.json", meta, body))
    if not body["passed"]:
        raise OracleMismatch(f"oracle disagreement {worst!r} exceeds tolerance {cfg.oracle_tolerance!r}")
    return {"files": [str(f) for f in files], **body}


COMMANDS = {
    "simulate": (cmd_simulate, "Reduced system trajectory over the time grid."),
    "reachable": (cmd_reachable, "Reachable-set ellipsoid at each time."),
    "access": (cmd_access, "Accessibility verdict and determinant certificate."),
    "control-search": (cmd_control_search, "Exact-swap times for the configured bath."),
    "design": (cmd_design, "Coupling eigenvalue that realizes an exact swap."),
    "verify": (cmd_verify, "Compare the analytic dynamics with the Fock-space oracle."),
}


def _int_list(raw: str) -> list[int]:
    return [int(x) for x in raw.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="incoherent", description="Bath-mediated incoherent control of a qubit by a probe qubit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, metavar="PATH", help="JSON run configuration")
        p.add_argument("--out", default=None, metavar="DIR", help="output directory (overrides output.directory)")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized sampling checks")
        if name == "design":
            p.add_argument("--k1", type=int, default=None)
            p.add_argument("--k2", type=_int_list, default=None, metavar="K,K,...")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    func = COMMANDS[args.command][0]
    try:
        cfg = load_config(args.config)
        out_dir = Path(args.out) if args.out else cfg.out_dir
        extra = {"k1": args.k1, "k2": args.k2} if args.command == "design" else {}
        result = func(cfg, out_dir, args.seed, **extra)
    except (ConfigError, IncommensurateBathError, DimensionCapError) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except PhysicalityError as exc:
        log.error("physics invariant violated: %s", exc)
        return EXIT_PHYSICS
    except OracleMismatch as exc:
        log.error("%s", exc)
        return EXIT_ORACLE
    print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
