"""Parameter sweeps and deterministic CSV emission.

A scan is a grid over probe intensity (and optionally two-photon detuning)
at fixed atomic parameters. Grid points are independent, so they are mapped
over a thread pool; output ordering is fixed by (state, delta3, |omega_p|^2)
so the emitted CSV is byte-identical across runs and thread counts.

The figure presets reproduce the three standard result sweeps:
fig2 (normalized dispersive response vs intensity, four states),
fig3 (susceptibility vs two-photon detuning at fixed intensity),
fig4 (blockade scaling parameters vs intensity at three detunings).
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterable

import numpy as np

from .collisional import solve_interacting
from .noninteracting import (
    perturbative_coefficients,
    steady_state_three_level,
    steady_state_two_level,
)
from .observables import (
    nb_tilde_weak_probe,
    nb_weak_probe,
    observable_set,
)
from .params import (
    C6_PRESETS,
    AtomParams,
    InteractionParams,
    StatePreset,
    relaxation_constants,
)
from .perturbative import chi3_interacting, collisional_integral_V13_order3

__all__ = [
    "ConfigError",
    "ScanConfig",
    "ScanResultRow",
    "compute_row",
    "run_scan",
    "run_figure",
    "write_csv",
    "FIGURES",
]

_NAN = float("nan")


class ConfigError(ValueError):
    """Invalid or inconsistent scan configuration."""


@dataclass
class ScanConfig:
    """Flat scan configuration; every key maps to a CLI flag of the same name.

    ``state`` selects a principal-quantum-number preset (46, 50, 56, 61)
    that fixes c6 and omega_c unless those are given explicitly. The probe
    grid is linear in |omega_p|^2. A delta3 grid is optional (used for
    spectra); when absent the single ``delta3`` value is used.
    """

    state: int | None = None
    c6: float | None = None
    omega_c: float | None = None
    delta2: float = -25.0
    delta3: float = 1.0 / 3.0
    gamma13: float = 0.1
    gamma23: float | None = None
    gamma22: float | None = None
    gamma33: float = 0.0
    eta: float = 0.04
    omega_p2_start: float = 0.0
    omega_p2_stop: float = 0.5
    omega_p2_count: int = 26
    delta3_start: float | None = None
    delta3_stop: float | None = None
    delta3_count: int = 0
    tol: float = 1e-10
    threads: int = 1
    out: str | None = None

    def __post_init__(self):
        if self.state is not None and self.state not in C6_PRESETS:
            raise ConfigError(
                f"unknown state preset {self.state}; known: {sorted(C6_PRESETS)}"
            )
        if self.state is None and (self.c6 is None or self.omega_c is None):
            raise ConfigError("either a state preset or explicit c6 and omega_c")
        if self.omega_p2_count < 1:
            raise ConfigError("probe grid must be non-empty")
        if self.omega_p2_start < 0 or self.omega_p2_stop < self.omega_p2_start:
            raise ConfigError("probe grid must be non-negative and increasing")
        if self.delta3_count < 0:
            raise ConfigError("delta3_count must be >= 0")
        if self.delta3_count > 0 and (self.delta3_start is None or self.delta3_stop is None):
            raise ConfigError("delta3 grid needs delta3_start and delta3_stop")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "ScanConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        return asdict(self)

    def metadata_dict(self) -> dict:
        """Config as embedded in CSV metadata.

        Execution-only keys (threads, out) are dropped so the emitted file
        is byte-identical across thread counts while still reproducing the
        run when re-parsed.
        """
        d = asdict(self)
        d.pop("threads")
        d.pop("out")
        return d

    def resolved_c6(self) -> float:
        if self.c6 is not None:
            return self.c6
        return StatePreset(self.state).c6

    def resolved_omega_c(self) -> float:
        if self.omega_c is not None:
            return self.omega_c
        return StatePreset(self.state).omega_c

    def omega_p2_grid(self) -> np.ndarray:
        if self.omega_p2_count == 1:
            return np.array([self.omega_p2_start])
        return np.linspace(self.omega_p2_start, self.omega_p2_stop, self.omega_p2_count)

    def delta3_grid(self) -> np.ndarray:
        if self.delta3_count == 0:
            return np.array([self.delta3])
        if self.delta3_count == 1:
            return np.array([self.delta3_start])
        return np.linspace(self.delta3_start, self.delta3_stop, self.delta3_count)


@dataclass(frozen=True)
class ScanResultRow:
    """One solved grid point; field order is the CSV column order."""

    state: int
    c6: float
    omega_c: float
    delta2: float
    delta3: float
    gamma13: float
    gamma23: float
    gamma22: float
    gamma33: float
    eta: float
    omega_p2: float
    chi_re: float = _NAN
    chi_im: float = _NAN
    chi_3lev_re: float = _NAN
    chi_3lev_im: float = _NAN
    chi_2lev_re: float = _NAN
    chi_2lev_im: float = _NAN
    S: float = _NAN
    S_norm_re: float = _NAN
    S_norm_im: float = _NAN
    v13_re: float = _NAN
    v13_im: float = _NAN
    v31_re: float = _NAN
    v31_im: float = _NAN
    v23_re: float = _NAN
    v23_im: float = _NAN
    v32_re: float = _NAN
    v32_im: float = _NAN
    sigma22: float = _NAN
    sigma33: float = _NAN
    nb_re: float = _NAN
    nb_im: float = _NAN
    nb_tilde: float = _NAN
    iterations: int = 0
    residual: float = _NAN
    flag: str = ""

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class RowSpec:
    """Fully resolved inputs of one grid point."""

    state: int  # 0 when no preset was used
    c6: float
    omega_c: float
    delta2: float
    delta3: float
    gamma13: float
    gamma23: float | None
    gamma22: float | None
    gamma33: float
    eta: float
    omega_p2: float
    tol: float

    def params(self) -> AtomParams:
        return AtomParams(
            omega_p=math.sqrt(self.omega_p2),
            omega_c=self.omega_c,
            delta2=self.delta2,
            delta3=self.delta3,
            gamma13=self.gamma13,
            gamma23=self.gamma23,
            gamma22=self.gamma22,
            gamma33=self.gamma33,
        )

    def interaction(self) -> InteractionParams:
        return InteractionParams(c6=self.c6, eta=self.eta)


def _row_inputs(spec: RowSpec, params: AtomParams) -> dict:
    return dict(
        state=spec.state,
        c6=spec.c6,
        omega_c=spec.omega_c,
        delta2=spec.delta2,
        delta3=spec.delta3,
        gamma13=spec.gamma13,
        gamma23=params.gamma23,
        gamma22=params.gamma22,
        gamma33=spec.gamma33,
        eta=spec.eta,
        omega_p2=spec.omega_p2,
    )


def _weak_probe_row(spec: RowSpec, params: AtomParams) -> ScanResultRow:
    """Zero-probe row: interacting and non-interacting responses coincide;
    the blockade scalings are reported at their weak-probe limits."""
    pc = perturbative_coefficients(params)
    rc = relaxation_constants(params)
    chi2 = -1j / rc.Gamma12
    v13_3, _ = collisional_integral_V13_order3(params, spec.interaction())
    nb = nb_weak_probe(params, v13_3)
    nbt = nb_tilde_weak_probe(params, v13_3)
    return ScanResultRow(
        **_row_inputs(spec, params),
        chi_re=pc.s12_1.real, chi_im=pc.s12_1.imag,
        chi_3lev_re=pc.s12_1.real, chi_3lev_im=pc.s12_1.imag,
        chi_2lev_re=chi2.real, chi_2lev_im=chi2.imag,
        S=1.0, S_norm_re=1.0, S_norm_im=0.0,
        v13_re=0.0, v13_im=0.0, v31_re=0.0, v31_im=0.0,
        v23_re=0.0, v23_im=0.0, v32_re=0.0, v32_im=0.0,
        sigma22=0.0, sigma33=0.0,
        nb_re=nb.real, nb_im=nb.imag, nb_tilde=nbt,
        iterations=0, residual=0.0,
    )


def compute_row(spec: RowSpec) -> ScanResultRow:
    """Solve one grid point; failures are returned as flagged rows."""
    params = spec.params()
    try:
        if spec.omega_p2 == 0.0:
            return _weak_probe_row(spec, params)
        state, integrals = solve_interacting(
            params, spec.interaction(), tol=spec.tol
        )
        obs = observable_set(
            params,
            state,
            steady_state_three_level(params),
            steady_state_two_level(params),
        )
        return ScanResultRow(
            **_row_inputs(spec, params),
            chi_re=obs.chi.real, chi_im=obs.chi.imag,
            chi_3lev_re=obs.chi_3lev.real, chi_3lev_im=obs.chi_3lev.imag,
            chi_2lev_re=obs.chi_2lev.real, chi_2lev_im=obs.chi_2lev.imag,
            S=obs.S, S_norm_re=obs.S_norm.real, S_norm_im=obs.S_norm.imag,
            v13_re=integrals.v13.real, v13_im=integrals.v13.imag,
            v31_re=integrals.v31.real, v31_im=integrals.v31.imag,
            v23_re=integrals.v23.real, v23_im=integrals.v23.imag,
            v32_re=integrals.v32.real, v32_im=integrals.v32.imag,
            sigma22=state.sigma22.real, sigma33=state.sigma33.real,
            nb_re=obs.nb.real, nb_im=obs.nb.imag, nb_tilde=obs.nb_tilde,
            iterations=integrals.iterations, residual=integrals.residual,
        )
    except Exception as exc:  # noqa: BLE001 - flagged, run continues
        msg = f"{type(exc).__name__}: {exc}".replace("\n", " ")[:200]
        return ScanResultRow(**_row_inputs(spec, params), flag=msg)


def _specs_for(config: ScanConfig) -> list[RowSpec]:
    state = config.state if config.state is not None else 0
    specs = []
    for d3 in config.delta3_grid():
        for wp2 in config.omega_p2_grid():
            specs.append(RowSpec(
                state=state,
                c6=config.resolved_c6(),
                omega_c=config.resolved_omega_c(),
                delta2=config.delta2,
                delta3=float(d3),
                gamma13=config.gamma13,
                gamma23=config.gamma23,
                gamma22=config.gamma22,
                gamma33=config.gamma33,
                eta=config.eta,
                omega_p2=float(wp2),
                tol=config.tol,
            ))
    return specs


def _solve_specs(specs: list[RowSpec], threads: int) -> list[ScanResultRow]:
    order = sorted(range(len(specs)),
                   key=lambda i: (specs[i].state, specs[i].delta3, specs[i].omega_p2))
    ordered = [specs[i] for i in order]
    if threads == 1:
        return [compute_row(s) for s in ordered]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(compute_row, ordered))


def run_scan(config: ScanConfig) -> list[ScanResultRow]:
    """Solve the configured grid, ordered by (state, delta3, |omega_p|^2)."""
    return _solve_specs(_specs_for(config), config.threads)


def _fmt(x) -> str:
    if isinstance(x, str):
        return x.replace(",", ";")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.12g" % float(x)


def write_csv(rows: Iterable[ScanResultRow], config_dict: dict, stream,
              extra: dict[str, list[float]] | None = None) -> None:
    """Emit rows with a JSON metadata comment header, 12 significant digits.

    ``extra`` maps additional column names to per-row value lists (used by
    the figure presets).
    """
    rows = list(rows)
    extra = extra or {}
    for name, vals in extra.items():
        if len(vals) != len(rows):
            raise ValueError(f"extra column {name} has {len(vals)} values "
                             f"for {len(rows)} rows")
    stream.write("# " + json.dumps(config_dict, sort_keys=True) + "\n")
    cols = ScanResultRow.columns() + list(extra)
    stream.write(",".join(cols) + "\n")
    for i, row in enumerate(rows):
        vals = [_fmt(getattr(row, c)) for c in ScanResultRow.columns()]
        vals += [_fmt(extra[name][i]) for name in extra]
        stream.write(",".join(vals) + "\n")


def _s_slope_third_order(params: AtomParams, interaction: InteractionParams) -> float:
    """Slope of the normalized dispersive response S at zero intensity.

    The two-level reference expansion cancels in the ratio, leaving
    d S / d |omega_p|^2 = Re[s12_3_collisional] / Re[s12_1 + i/Gamma12].
    """
    rc = relaxation_constants(params)
    chi3 = chi3_interacting(params, interaction)
    pc = perturbative_coefficients(params)
    return float(chi3.s12_3_collisional.real / (pc.s12_1 + 1j / rc.Gamma12).real)


def _figure2(threads: int, tol: float):
    configs = [
        ScanConfig(state=n, delta3=1.0 / 3.0,
                   omega_p2_start=0.0, omega_p2_stop=0.5, omega_p2_count=26,
                   tol=tol, threads=threads)
        for n in (46, 50, 56, 61)
    ]
    rows: list[ScanResultRow] = []
    slopes: list[float] = []
    for cfg in configs:
        preset = StatePreset(cfg.state)
        p0 = AtomParams(omega_p=0.0, omega_c=preset.omega_c, delta3=cfg.delta3)
        slope = _s_slope_third_order(p0, InteractionParams(c6=preset.c6, eta=cfg.eta))
        new_rows = run_scan(cfg)
        rows.extend(new_rows)
        slopes.extend(1.0 + slope * r.omega_p2 for r in new_rows)
    meta = {"figure": "fig2", "configs": [c.metadata_dict() for c in configs]}
    return rows, meta, {"s_third_order": slopes}


def _figure3(threads: int, tol: float):
    cfg = ScanConfig(state=61,
                     omega_p2_start=0.5, omega_p2_stop=0.5, omega_p2_count=1,
                     delta3_start=-2.0, delta3_stop=2.0, delta3_count=81,
                     tol=tol, threads=threads)
    rows = run_scan(cfg)
    trunc_re, trunc_im = [], []
    for r in rows:
        p0 = AtomParams(omega_p=0.0, omega_c=r.omega_c, delta2=r.delta2,
                        delta3=r.delta3, gamma13=r.gamma13)
        pc = perturbative_coefficients(p0)
        chi_t = pc.s12_1 + r.omega_p2 * pc.s12_3
        trunc_re.append(chi_t.real)
        trunc_im.append(chi_t.imag)
    meta = {"figure": "fig3", "configs": [cfg.metadata_dict()]}
    return rows, meta, {"chi_trunc_re": trunc_re, "chi_trunc_im": trunc_im}


def _figure4(threads: int, tol: float):
    rows: list[ScanResultRow] = []
    configs = []
    for d3 in (1.0 / 3.0, 1.0, 2.0):
        cfg = ScanConfig(state=50, delta3=d3,
                         omega_p2_start=0.001, omega_p2_stop=0.5,
                         omega_p2_count=25, tol=tol, threads=threads)
        configs.append(cfg)
        rows.extend(run_scan(cfg))
    meta = {"figure": "fig4", "configs": [c.metadata_dict() for c in configs]}
    return rows, meta, {}


FIGURES = {"fig2": _figure2, "fig3": _figure3, "fig4": _figure4}


def run_figure(name: str, stream, threads: int = 1, tol: float = 1e-10) -> bool:
    """Write a figure-preset CSV; returns True if any row is flagged."""
    if name not in FIGURES:
        raise ConfigError(f"unknown figure {name!r}; known: {sorted(FIGURES)}")
    rows, meta, extra = FIGURES[name](threads, tol)
    write_csv(rows, meta, stream, extra=extra)
    return any(r.flag for r in rows)
