"""Run configuration: JSON document -> validated objects, and back."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .model import BathSpec, Eigenbasis, InteractionSpec, Mode, bose_occupation
from .oracle import BathState, FockCutoffs
from .states import AXIS_STATES, QubitState

TABLE_FORMATS = ("csv", "json")


class ConfigError(ValueError):
    def __init__(self, path: str, constraint: str):
        super().__init__(f"{path}: {constraint}")
        self.path = path
        self.constraint = constraint


def _get(d: dict, key: str, path: str, default: Any = ...):
    if not isinstance(d, dict):
        raise ConfigError(path, "must be an object")
    if key not in d:
        if default is ...:
            raise ConfigError(f"{path}.{key}" if path else key, "is required")
        return default
    return d[key]


def _number(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not np.isfinite(x):
        raise ConfigError(path, f"must be a finite number, got {x!r}")
    return float(x)


def _integer(x, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(path, f"must be an integer, got {x!r}")
    return x


def _vector3(x, path: str) -> QubitState:
    if not isinstance(x, list) or len(x) != 3:
        raise ConfigError(path, "must be a list of 3 numbers")
    v = [_number(c, f"{path}[{i}]") for i, c in enumerate(x)]
    try:
        return QubitState(tuple(v))
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def _parse_mode(m, path: str) -> Mode:
    if not isinstance(m, dict):
        raise ConfigError(path, "must be an object")
    omega = _number(_get(m, "omega", path), f"{path}.omega")
    g = _number(_get(m, "g", path), f"{path}.g")
    if omega <= 0:
        raise ConfigError(f"{path}.omega", "must be > 0")
    if "nbar" in m and "temperature" in m:
        raise ConfigError(path, "give either nbar or temperature, not both")
    if "temperature" in m:
        temp = _number(m["temperature"], f"{path}.temperature")
        if temp < 0:
            raise ConfigError(f"{path}.temperature", "must be >= 0")
        nbar = bose_occupation(omega, temp)
    else:
        nbar = _number(m.get("nbar", 0.0), f"{path}.nbar")
        if nbar < 0:
            raise ConfigError(f"{path}.nbar", "must be >= 0")
    return Mode(omega, g, nbar)


def _parse_unitary(u, path: str) -> np.ndarray:
    if not isinstance(u, dict) or set(u) != {"real", "imag"}:
        raise ConfigError(path, "must be an object with 4x4 'real' and 'imag' arrays")
    try:
        re = np.array(u["real"], dtype=float)
        im = np.array(u["imag"], dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(path, "entries must be numbers") from None
    if re.shape != (4, 4) or im.shape != (4, 4):
        raise ConfigError(path, "real and imag parts must both be 4x4")
    return re + 1j * im


@dataclass
class RunConfig:
    bath: BathSpec
    interaction: InteractionSpec
    initial_s: QubitState
    probes: dict[str, QubitState]
    times: np.ndarray
    cutoffs: FockCutoffs | None
    bath_state: BathState
    oracle_tolerance: float
    k1_max: int
    k1: int | None
    k2: list[int] | None
    alpha4: float | None
    out_dir: Path
    formats: tuple[str, ...]
    normalized: dict

    @property
    def sha256(self) -> str:
        return config_hash(self.normalized)

    def to_dict(self) -> dict:
        """Normalized document: every default spelled out, parse(to_dict()) is a fixed point."""
        return copy.deepcopy(self.normalized)


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def config_hash(raw: dict) -> str:
    return hashlib.sha256(canonical_json(raw).encode()).hexdigest()


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    known = {"bath", "interaction", "initial_s", "probe", "time_grid", "oracle", "search", "output"}
    extra = sorted(set(raw) - known)
    if extra:
        raise ConfigError(extra[0], "unknown section")

    bath_raw = _get(raw, "bath", "")
    modes_raw = _get(bath_raw, "modes", "bath")
    if not isinstance(modes_raw, list) or not modes_raw:
        raise ConfigError("bath.modes", "must be a non-empty list")
    bath = BathSpec(tuple(_parse_mode(m, f"bath.modes[{i}]") for i, m in enumerate(modes_raw)))

    inter_raw = _get(raw, "interaction", "")
    alphas = _get(inter_raw, "alphas", "interaction")
    if not isinstance(alphas, list) or len(alphas) != 4:
        raise ConfigError("interaction.alphas", "must be a list of 4 numbers")
    alphas = [_number(a, f"interaction.alphas[{i}]") for i, a in enumerate(alphas)]
    basis = _get(inter_raw, "eigenbasis", "interaction", "bell")
    try:
        basis = Eigenbasis(basis)
    except ValueError:
        raise ConfigError("interaction.eigenbasis", f"must be one of {[b.value for b in Eigenbasis]}") from None
    unitary = None
    if basis is Eigenbasis.GENERAL:
        unitary = _parse_unitary(_get(inter_raw, "unitary", "interaction"), "interaction.unitary")
    elif "unitary" in inter_raw:
        raise ConfigError("interaction.unitary", f"only allowed with eigenbasis 'general', not '{basis.value}'")
    try:
        interaction = InteractionSpec(tuple(alphas), basis, unitary)
    except ValueError as exc:
        raise ConfigError("interaction", str(exc)) from None

    initial_s = _vector3(_get(raw, "initial_s", ""), "initial_s")
    probe_raw = _get(raw, "probe", "", "sweep")
    if probe_raw == "sweep":
        probes = {k: QubitState(v) for k, v in AXIS_STATES.items()}
    else:
        probes = {"p": _vector3(probe_raw, "probe")}

    grid = _get(raw, "time_grid", "")
    start = _number(_get(grid, "start", "time_grid", 0.0), "time_grid.start")
    stop = _number(_get(grid, "stop", "time_grid"), "time_grid.stop")
    steps = _integer(_get(grid, "steps", "time_grid"), "time_grid.steps")
    if steps < 1:
        raise ConfigError("time_grid.steps", "must be >= 1")
    if stop < start:
        raise ConfigError("time_grid.stop", "must be >= start")
    times = np.linspace(start, stop, steps)

    orc = _get(raw, "oracle", "", {})
    cut_raw = _get(orc, "cutoffs", "oracle", None)
    cutoffs = None
    if cut_raw is not None:
        if not isinstance(cut_raw, list) or len(cut_raw) != len(bath):
            raise ConfigError("oracle.cutoffs", f"must be a list of {len(bath)} integers (one per mode)")
        dims = [_integer(d, f"oracle.cutoffs[{i}]") for i, d in enumerate(cut_raw)]
        if min(dims) < 2:
            raise ConfigError("oracle.cutoffs", "every cutoff must be >= 2")
        cutoffs = FockCutoffs(tuple(dims))
    state_raw = _get(orc, "bath_state", "oracle", "thermal")
    if state_raw == "vacuum":
        if np.any(bath.nbars > 0):
            raise ConfigError("oracle.bath_state", "vacuum requires nbar = 0 for every mode")
        bath_state = BathState.vacuum()
    elif state_raw == "thermal":
        bath_state = BathState.thermal(bath.nbars)
    else:
        raise ConfigError("oracle.bath_state", "must be 'vacuum' or 'thermal'")
    tol = _number(_get(orc, "tolerance", "oracle", 1e-6), "oracle.tolerance")
    if tol <= 0:
        raise ConfigError("oracle.tolerance", "must be > 0")

    search = _get(raw, "search", "", {})
    k1_max = _integer(_get(search, "k1_max", "search", 3), "search.k1_max")
    if k1_max < 0:
        raise ConfigError("search.k1_max", "must be >= 0")
    k1 = _get(search, "k1", "search", None)
    if k1 is not None:
        k1 = _integer(k1, "search.k1")
    k2 = _get(search, "k2", "search", None)
    if k2 is not None:
        if not isinstance(k2, list) or len(k2) != len(bath):
            raise ConfigError("search.k2", f"must be a list of {len(bath)} integers")
        k2 = [_integer(k, f"search.k2[{i}]") for i, k in enumerate(k2)]
    alpha4 = _get(search, "alpha4", "search", None)
    if alpha4 is not None:
        alpha4 = _number(alpha4, "search.alpha4")

    out = _get(raw, "output", "", {})
    out_dir = Path(_get(out, "directory", "output", "out"))
    formats = _get(out, "formats", "output", ["csv"])
    if not isinstance(formats, list) or not formats or any(f not in TABLE_FORMATS for f in formats):
        raise ConfigError("output.formats", f"must be a non-empty list drawn from {list(TABLE_FORMATS)}")

    modes_norm = []
    for m in modes_raw:
        entry = {"omega": float(m["omega"]), "g": float(m["g"])}
        if "temperature" in m:
            entry["temperature"] = float(m["temperature"])
        else:
            entry["nbar"] = float(m.get("nbar", 0.0))
        modes_norm.append(entry)
    inter_norm = {"alphas": alphas, "eigenbasis": basis.value}
    if unitary is not None:
        inter_norm["unitary"] = {"real": unitary.real.tolist(), "imag": unitary.imag.tolist()}
    normalized = {
        "bath": {"modes": modes_norm},
        "interaction": inter_norm,
        "initial_s": list(initial_s.bloch),
        "probe": "sweep" if probe_raw == "sweep" else list(probes["p"].bloch),
        "time_grid": {"start": start, "stop": stop, "steps": steps},
        "oracle": {
            "cutoffs": None if cutoffs is None else list(cutoffs.dims),
            "bath_state": state_raw,
            "tolerance": tol,
        },
        "search": {"k1_max": k1_max, "k1": k1, "k2": k2, "alpha4": alpha4},
        "output": {"directory": str(out_dir), "formats": list(formats)},
    }

    return RunConfig(
        bath=bath,
        interaction=interaction,
        initial_s=initial_s,
        probes=probes,
        times=times,
        cutoffs=cutoffs,
        bath_state=bath_state,
        oracle_tolerance=tol,
        k1_max=k1_max,
        k1=k1,
        k2=k2,
        alpha4=alpha4,
        out_dir=out_dir,
        formats=tuple(formats),
        normalized=normalized,
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(str(path), "file not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON ({exc})") from None
    return parse_config(raw)
