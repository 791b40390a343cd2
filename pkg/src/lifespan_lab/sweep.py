"""Life-span sweeps over the data size, with CSV records and scaling fits."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .bounds import lifespan_bound
from .grids import Grid1D, fourier_transform, scaled_grid, spectral_radius
from .profile import (
    AnalyticProfile,
    ModelParams,
    physical_time,
    resolve_profile,
)
from .solver import LifespanEstimate, SolverConfig, estimate_lifespan, initial_field

SCHEMA_VERSION = 1

CSV_COLUMNS = (
    "eps",
    "T_num",
    "scaled",
    "bound_const",
    "ratio",
    "termination",
    "L",
    "N",
    "dt_floor",
    "K_b",
    "B_over_A",
    "schema_version",
)


@dataclass(frozen=True)
class LifespanRecord:
    """One sweep row: measurement, theory, and enough metadata to re-run it."""

    eps: float
    t_num: float
    scaled: float
    bound_const: float
    ratio: float
    termination: str
    grid_half_width: float
    grid_n: int
    dt_floor: float
    amp_blowup_factor: float
    horizon_fraction: float

    def csv_row(self) -> list:
        return [
            repr(self.eps),
            repr(self.t_num),
            repr(self.scaled),
            repr(self.bound_const),
            repr(self.ratio),
            self.termination,
            repr(self.grid_half_width),
            str(self.grid_n),
            repr(self.dt_floor),
            repr(self.amp_blowup_factor),
            repr(self.horizon_fraction),
            str(SCHEMA_VERSION),
        ]


def _sup_transform(params: ModelParams, grid: Grid1D) -> float:
    prof = resolve_profile(params.profile)
    if isinstance(prof, AnalyticProfile):
        return prof.sup_transform
    from .profile import _refined_sup, prepare_profile

    return _refined_sup(prepare_profile(params, grid).phat.values)


def grid_for_lifespan(params: ModelParams, dx: float = 0.03125) -> Grid1D:
    """Scale the domain with the expected blow-up time of this data size."""
    desk = Grid1D(32.0, 2048)
    phi = initial_field(replace(params, epsilon=1.0), desk)
    xi_eff = spectral_radius(fourier_transform(phi), 0.999)
    bound = lifespan_bound(params.p, params.lam, _sup_transform(params, desk))
    t_expected = float(physical_time(bound.s_blowup, params))
    if not np.isfinite(t_expected):
        t_expected = 0.0
    return scaled_grid(xi_eff, t_expected, dx=dx)


def measure_lifespan(params: ModelParams, solver_kwargs: dict | None = None) -> tuple[
    LifespanRecord, LifespanEstimate
]:
    """Run the estimator for one data size and assemble its record."""
    grid = grid_for_lifespan(params)
    kwargs = dict(solver_kwargs or {})
    cfg = SolverConfig(params=params, grid=grid, **kwargs)
    est = estimate_lifespan(cfg)

    bound = lifespan_bound(params.p, params.lam, _sup_transform(params, grid))
    exponent = bound.scaling_exponent
    scaled = params.epsilon**exponent * est.t_num if np.isfinite(est.t_num) else np.inf
    ratio = scaled / bound.liminf_const if np.isfinite(bound.liminf_const) else np.nan
    record = LifespanRecord(
        eps=params.epsilon,
        t_num=est.t_num,
        scaled=scaled,
        bound_const=bound.liminf_const,
        ratio=ratio,
        termination=est.criterion,
        grid_half_width=grid.half_width,
        grid_n=grid.n_points,
        dt_floor=cfg.dt_floor,
        amp_blowup_factor=cfg.amp_blowup_factor,
        horizon_fraction=params.horizon_fraction,
    )
    return record, est


@dataclass(frozen=True)
class SweepResult:
    records: tuple[LifespanRecord, ...]
    slope: float
    intercept: float
    expected_slope: float
    partial_reason: str | None = None

    @property
    def partial(self) -> bool:
        return self.partial_reason is not None

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.partial:
            buf.write(f"# PARTIAL: {self.partial_reason}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in self.records:
            writer.writerow(rec.csv_row())
        return buf.getvalue()


def _worker(args) -> LifespanRecord:
    params, solver_kwargs = args
    return measure_lifespan(params, solver_kwargs)[0]


def pool_size(n_jobs: int) -> int:
    cap = os.environ.get("LIFESPAN_LAB_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(n_jobs, limit))


def sweep_lifespan(
    base_params: ModelParams,
    eps_ladder,
    solver_kwargs: dict | None = None,
) -> SweepResult:
    """Measure the life span across the ladder and fit the scaling exponent.

    Runs are independent and execute in a worker pool (capped by the
    LIFESPAN_LAB_THREADS environment variable); records come back in ladder
    order regardless of scheduling, so output is deterministic.  A run whose
    diagnostics fail aborts the sweep; the result carries the records
    gathered so far and the reason, and its CSV is flagged PARTIAL.
    """
    if base_params.lam.imag <= 0:
        raise ValueError("sweep needs Im(lambda) > 0")
    ladder = [float(e) for e in eps_ladder]
    jobs = [(replace(base_params, epsilon=e), solver_kwargs) for e in ladder]

    workers = pool_size(len(jobs))
    records: list[LifespanRecord] = []
    partial_reason = None
    if workers == 1:
        for job in jobs:
            try:
                records.append(_worker(job))
            except Exception as exc:
                partial_reason = f"eps={job[0].epsilon}: {exc}"
                break
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_worker, job) for job in jobs]
            for fut, job in zip(futures, jobs):
                try:
                    records.append(fut.result())
                except Exception as exc:
                    partial_reason = f"eps={job[0].epsilon}: {exc}"
                    for other in futures:
                        other.cancel()
                    break

    finite = [(r.eps, r.t_num) for r in records if np.isfinite(r.t_num)]
    if len(finite) >= 2:
        log_eps = np.log([e for e, _ in finite])
        log_t = np.log([t for _, t in finite])
        slope, intercept = np.polyfit(log_eps, log_t, 1)
    else:
        slope, intercept = np.nan, np.nan

    p = base_params.p
    return SweepResult(
        records=tuple(records),
        slope=float(slope),
        intercept=float(intercept),
        expected_slope=-2.0 * (p - 1.0) / (3.0 - p),
        partial_reason=partial_reason,
    )
