"""Experiment configuration, error measures and the convergence runner."""

from __future__ import annotations

import json
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import monte_carlo, scm, wce
from .exceptions import ConfigError, MeasureError
from .problems import DEFAULT_CONSTANTS, EXAMPLES, build_example
from .spatial import FourierGrid

METHODS = ("wce", "scm", "mc")
REFERENCE_MODES = ("fine", "self", "file")


@dataclass(frozen=True)
class ReferenceSpec:
    """Where the reference second moments come from.

    fine: one in-run Wiener chaos solve shared by every row.
    self: one in-run solve per truncation with the row's own method.
    file: a reference JSON written by a previous run.
    """

    mode: str = "fine"
    delta: float | None = None
    dt: float | None = None
    order: int | None = None  # chaos order of a fine reference
    grid_points: int | None = None
    modes: int | None = None
    path: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "ReferenceSpec":
        allowed = {"mode", "delta", "dt", "order", "grid_points", "modes", "path"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown reference keys: {sorted(unknown)}")
        spec = cls(**data)
        if spec.mode not in REFERENCE_MODES:
            raise ConfigError(f"reference mode must be one of {REFERENCE_MODES}")
        if spec.mode == "file" and not spec.path:
            raise ConfigError("reference mode 'file' needs a path")
        return spec


@dataclass(frozen=True)
class ExperimentConfig:
    """One convergence experiment: a method swept over a grid of deltas."""

    example: str
    method: str
    horizon: float
    grid_points: int
    deltas: tuple[float, ...]
    truncations: tuple[int, ...] = ()
    modes: int = 1
    dt_ratio: int = 10
    constants: dict = field(default_factory=dict)
    reference: ReferenceSpec = ReferenceSpec()
    seed: int = 0
    paths: int = 10000
    label: str = "run"

    _KEYS = {
        "example",
        "method",
        "T",
        "grid_points",
        "deltas",
        "truncations",
        "modes",
        "dt_ratio",
        "constants",
        "reference",
        "seed",
        "paths",
        "label",
        "noises",
    }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        unknown = set(data) - cls._KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            config = cls(
                example=data["example"],
                method=data["method"],
                horizon=float(data["T"]),
                grid_points=int(data["grid_points"]),
                deltas=tuple(float(d) for d in data["deltas"]),
                truncations=tuple(int(t) for t in data.get("truncations", ())),
                modes=int(data.get("modes", 1)),
                dt_ratio=int(data.get("dt_ratio", 10)),
                constants=dict(data.get("constants", {})),
                reference=ReferenceSpec.from_dict(dict(data.get("reference", {}))),
                seed=int(data.get("seed", 0)),
                paths=int(data.get("paths", 10000)),
                label=str(data.get("label", "run")),
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key: {exc.args[0]}") from exc
        config.validate()
        if "noises" in data:
            expected = 1 if data["example"] == "single" else 2
            if int(data["noises"]) != expected:
                raise ConfigError(
                    f"example {data['example']!r} has {expected} noises"
                )
        return config

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def validate(self) -> None:
        if self.example not in EXAMPLES:
            raise ConfigError(f"unknown example {self.example!r}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}")
        if self.horizon <= 0:
            raise ConfigError("T must be positive")
        if not self.deltas:
            raise ConfigError("need at least one delta")
        if self.dt_ratio < 1:
            raise ConfigError("dt_ratio must be a positive integer")
        for delta in self.deltas:
            elements = round(self.horizon / delta)
            if elements < 1 or abs(elements * delta - self.horizon) > 1e-9 * self.horizon:
                raise ConfigError(f"T={self.horizon} is not a multiple of delta={delta}")
        if self.method in ("wce", "scm") and not self.truncations:
            raise ConfigError(f"method {self.method!r} needs truncations")
        if self.method == "scm" and any(t < 1 for t in self.truncations):
            raise ConfigError("sparse grid levels must be >= 1")
        if self.method == "wce" and any(t < 0 for t in self.truncations):
            raise ConfigError("chaos orders must be >= 0")
        if self.method == "mc" and self.paths < 2:
            raise ConfigError("mc needs at least two paths")
        unknown = set(self.constants) - set(DEFAULT_CONSTANTS[self.example])
        if unknown:
            raise ConfigError(f"unknown constants for {self.example!r}: {sorted(unknown)}")

    def dt_for(self, delta: float) -> float:
        return delta / self.dt_ratio

    def trunc_label(self, truncation: int | None) -> str:
        if self.method == "wce":
            return f"N={truncation}"
        if self.method == "scm":
            return f"L={truncation}"
        return f"paths={self.paths}"


@dataclass
class ErrorMeasures:
    rho2_abs: float
    rho2_rel: float
    rhoinf_abs: float
    rhoinf_rel: float


def measures_from_norms(
    ref_l2: float, ref_linf: float, num_l2: float, num_linf: float
) -> ErrorMeasures:
    """Difference-of-norms error measures; the fields may live on
    different grids as long as both norms approximate the same field."""
    if ref_l2 <= 0 or ref_linf <= 0:
        raise MeasureError("zero reference norm: relative measures undefined")
    rho2 = abs(ref_l2 - num_l2)
    rhoinf = abs(ref_linf - num_linf)
    return ErrorMeasures(rho2, rho2 / ref_l2, rhoinf, rhoinf / ref_linf)


def error_measures(reference: np.ndarray, numerical: np.ndarray) -> ErrorMeasures:
    """Error measures for two second-moment fields on the same grid."""
    reference = np.asarray(reference, dtype=float)
    numerical = np.asarray(numerical, dtype=float)
    if reference.shape != numerical.shape:
        raise MeasureError("fields must live on the same grid")
    grid_scale = 2.0 * math.pi / reference.size
    ref_l2 = math.sqrt(grid_scale * float(reference @ reference))
    num_l2 = math.sqrt(grid_scale * float(numerical @ numerical))
    return measures_from_norms(
        ref_l2,
        float(np.max(np.abs(reference))),
        num_l2,
        float(np.max(np.abs(numerical))),
    )


def convergence_orders(
    errors: list[float], deltas: list[float]
) -> list[float | None]:
    """Pairwise orders log(e_i/e_{i+1}) / log(d_i/d_{i+1}); None for row 0
    and wherever an error is not positive."""
    out: list[float | None] = [None]
    for i in range(1, len(errors)):
        if errors[i - 1] <= 0 or errors[i] <= 0:
            out.append(None)
            continue
        out.append(
            math.log(errors[i - 1] / errors[i]) / math.log(deltas[i - 1] / deltas[i])
        )
    return out


@dataclass
class ReportRow:
    delta: float
    dt: float
    trunc_label: str
    rho2_abs: float
    rho2_rel: float
    rhoinf_abs: float
    rhoinf_rel: float
    order_l2: float | None
    order_linf: float | None
    wall_seconds: float
    diagnostics: dict = field(default_factory=dict)


@dataclass
class ConvergenceReport:
    label: str
    rows: list[ReportRow]
    reference_info: dict
    config: dict


@dataclass
class _Reference:
    l2: float
    linf: float
    grid_points: int
    moments: np.ndarray
    info: dict


_REFERENCE_CACHE: dict[tuple, _Reference] = {}


def clear_reference_cache() -> None:
    _REFERENCE_CACHE.clear()


def _solve_norms(problem, method, truncation, modes, delta, dt, elements):
    if method == "wce":
        return wce.second_moments(problem, truncation, modes, delta, dt, elements)
    return scm.second_moments(problem, truncation, modes, delta, dt, elements)


def _fine_reference(config: ExperimentConfig) -> _Reference:
    spec = config.reference
    delta = spec.delta if spec.delta is not None else min(config.deltas) / 10.0
    dt = spec.dt if spec.dt is not None else delta / config.dt_ratio
    if spec.order is not None:
        order = spec.order
    elif config.method == "wce":
        order = max(config.truncations) + 2
    else:
        order = 4
    grid_points = spec.grid_points or max(30, config.grid_points)
    modes = spec.modes or config.modes
    key = (
        "fine",
        config.example,
        tuple(sorted(config.constants.items())),
        config.horizon,
        grid_points,
        order,
        modes,
        delta,
        dt,
    )
    if key not in _REFERENCE_CACHE:
        problem = build_example(config.example, grid_points, config.constants)
        elements = round(config.horizon / delta)
        result = wce.second_moments(problem, order, modes, delta, dt, elements)
        _REFERENCE_CACHE[key] = _Reference(
            l2=problem.grid.norm_l2(result.final_moments),
            linf=problem.grid.norm_linf(result.final_moments),
            grid_points=grid_points,
            moments=result.final_moments,
            info={
                "mode": "fine",
                "method": "wce",
                "order": order,
                "modes": modes,
                "delta": delta,
                "dt": dt,
                "grid_points": grid_points,
            },
        )
    return _REFERENCE_CACHE[key]


def _self_reference(config: ExperimentConfig, truncation: int) -> _Reference:
    spec = config.reference
    delta = spec.delta if spec.delta is not None else min(config.deltas) / 10.0
    dt = spec.dt if spec.dt is not None else delta / config.dt_ratio
    grid_points = spec.grid_points or config.grid_points
    modes = spec.modes or config.modes
    key = (
        "self",
        config.example,
        tuple(sorted(config.constants.items())),
        config.horizon,
        config.method,
        truncation,
        grid_points,
        modes,
        delta,
        dt,
    )
    if key not in _REFERENCE_CACHE:
        problem = build_example(config.example, grid_points, config.constants)
        elements = round(config.horizon / delta)
        result = _solve_norms(
            problem, config.method, truncation, modes, delta, dt, elements
        )
        _REFERENCE_CACHE[key] = _Reference(
            l2=problem.grid.norm_l2(result.final_moments),
            linf=problem.grid.norm_linf(result.final_moments),
            grid_points=grid_points,
            moments=result.final_moments,
            info={
                "mode": "self",
                "method": config.method,
                "truncation": truncation,
                "modes": modes,
                "delta": delta,
                "dt": dt,
                "grid_points": grid_points,
            },
        )
    return _REFERENCE_CACHE[key]


def _file_reference(path: str) -> _Reference:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        return _Reference(
            l2=float(data["norm_l2"]),
            linf=float(data["norm_linf"]),
            grid_points=int(data["grid_points"]),
            moments=np.asarray(data["moments"], dtype=float),
            info={"mode": "file", "path": str(path)},
        )
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read reference file {path}: {exc}") from exc


def resolve_reference(config: ExperimentConfig, truncation: int | None) -> _Reference:
    if config.reference.mode == "file":
        return _file_reference(config.reference.path)
    if config.reference.mode == "self" and config.method != "mc":
        return _self_reference(config, truncation)
    return _fine_reference(config)


def run(config: ExperimentConfig, parallel: bool = False) -> ConvergenceReport:
    """Execute the configured sweep and assemble the convergence report.

    Rows run sequentially by default so the reported timings are
    comparable; `parallel` opts into running the rows of each truncation
    group concurrently (each row's solver is single-threaded).
    """
    problem = build_example(config.example, config.grid_points, config.constants)
    coercive = problem.coercivity_margin()
    commutative, defect = problem.commutativity_defect()
    rows: list[ReportRow] = []
    truncations: tuple = config.truncations if config.method != "mc" else (None,)
    reference_infos = {}
    for truncation in truncations:
        reference = resolve_reference(config, truncation)
        reference_infos[config.trunc_label(truncation)] = {
            **reference.info,
            "norm_l2": reference.l2,
            "norm_linf": reference.linf,
            "grid_points": reference.grid_points,
            "moments": [float(v) for v in reference.moments],
        }

        def run_row(delta: float) -> ReportRow:
            dt = config.dt_for(delta)
            elements = round(config.horizon / delta)
            start = time.perf_counter()
            diagnostics: dict = {}
            if config.method == "mc":
                estimate = monte_carlo.second_moments(
                    problem, config.paths, config.horizon, dt, config.seed
                )
                final = estimate.moments
                num_l2 = estimate.norm_l2
                num_linf = problem.grid.norm_linf(estimate.moments)
                diagnostics["norm_l2_stderr"] = estimate.norm_l2_stderr
            else:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    result = _solve_norms(
                        problem, config.method, truncation, config.modes,
                        delta, dt, elements,
                    )
                final = result.final_moments
                num_l2 = problem.grid.norm_l2(final)
                num_linf = problem.grid.norm_linf(final)
                diagnostics["psd_defect"] = result.psd_defect
                diagnostics["psd_ok"] = result.psd_ok
                diagnostics["symmetry_defect"] = result.symmetry_defect
            diagnostics["moments"] = [float(v) for v in final]
            wall = time.perf_counter() - start
            m = measures_from_norms(reference.l2, reference.linf, num_l2, num_linf)
            return ReportRow(
                delta=delta,
                dt=dt,
                trunc_label=config.trunc_label(truncation),
                rho2_abs=m.rho2_abs,
                rho2_rel=m.rho2_rel,
                rhoinf_abs=m.rhoinf_abs,
                rhoinf_rel=m.rhoinf_rel,
                order_l2=None,
                order_linf=None,
                wall_seconds=wall,
                diagnostics={
                    "norm_l2": num_l2,
                    "norm_linf": num_linf,
                    **diagnostics,
                },
            )

        if parallel and len(config.deltas) > 1:
            with ThreadPoolExecutor(max_workers=len(config.deltas)) as pool:
                group = list(pool.map(run_row, config.deltas))
        else:
            group = [run_row(delta) for delta in config.deltas]
        for row, o2, oi in zip(
            group,
            convergence_orders([r.rho2_rel for r in group], list(config.deltas)),
            convergence_orders([r.rhoinf_rel for r in group], list(config.deltas)),
        ):
            row.order_l2, row.order_linf = o2, oi
        rows.extend(group)
    config_echo = {
        "example": config.example,
        "method": config.method,
        "T": config.horizon,
        "grid_points": config.grid_points,
        "modes": config.modes,
        "deltas": list(config.deltas),
        "truncations": list(config.truncations),
        "dt_ratio": config.dt_ratio,
        "constants": config.constants,
        "label": config.label,
    }
    if config.method == "mc":
        config_echo["seed"] = config.seed
        config_echo["paths"] = config.paths
    return ConvergenceReport(
        label=config.label,
        rows=rows,
        reference_info={
            "per_truncation": reference_infos,
            "coercivity_margin": coercive,
            "commutative": commutative,
            "commutativity_defect": defect,
        },
        config=config_echo,
    )


def preset(name: str) -> list[ExperimentConfig]:
    """Built-in configurations mirroring the benchmark tables."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}")
    return [ExperimentConfig.from_dict(d) for d in PRESETS[name]]


PRESETS: dict[str, list[dict]] = {
    "table1": [
        {
            "example": "single",
            "method": "wce",
            "T": 5.0,
            "grid_points": 20,
            "modes": 1,
            "deltas": [1e-1, 1e-2, 1e-3],
            "truncations": [1, 2],
            "reference": {
                "mode": "fine",
                "order": 4,
                "delta": 1e-4,
                "dt": 1e-5,
                "grid_points": 30,
            },
            "label": "table1",
        }
    ],
    "table2": [
        {
            "example": "single",
            "method": "scm",
            "T": 5.0,
            "grid_points": 20,
            "modes": 1,
            "deltas": [1e-1, 1e-2, 1e-3],
            "truncations": [2, 3],
            "reference": {
                "mode": "fine",
                "order": 4,
                "delta": 1e-4,
                "dt": 1e-5,
                "grid_points": 30,
            },
            "label": "table2",
        }
    ],
    "table3": [
        {
            "example": "commutative",
            "method": "wce",
            "T": 1.0,
            "grid_points": 30,
            "modes": 1,
            "deltas": [1e-1, 1e-2, 1e-3],
            "truncations": [1, 2],
            "reference": {"mode": "self", "delta": 1e-4, "dt": 1e-5},
            "label": "table3",
        }
    ],
    "table4": [
        {
            "example": "commutative",
            "method": "scm",
            "T": 1.0,
            "grid_points": 30,
            "modes": 1,
            "deltas": [1e-1, 1e-2, 1e-3],
            "truncations": [2, 3],
            "reference": {"mode": "self", "delta": 1e-4, "dt": 1e-5},
            "label": "table4",
        }
    ],
    "table5": [
        {
            "example": "noncommutative",
            "method": "wce",
            "T": 1.0,
            "grid_points": 20,
            "modes": 1,
            "deltas": [1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3],
            "truncations": [1, 2],
            "reference": {"mode": "self", "delta": 5e-4, "dt": 5e-5},
            "label": "table5_wce",
        },
        {
            "example": "noncommutative",
            "method": "scm",
            "T": 1.0,
            "grid_points": 20,
            "modes": 1,
            "deltas": [1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3],
            "truncations": [2, 3],
            "reference": {"mode": "self", "delta": 5e-4, "dt": 5e-5},
            "label": "table5_scm",
        },
    ],
}
