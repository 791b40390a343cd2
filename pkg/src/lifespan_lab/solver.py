"""Time integration by Strang splitting with exact substeps.

Both substeps are exact flows: the kinetic half-steps are Fourier
multipliers, and the pointwise nonlinear step uses the same closed form as
the focusing profile, so the only discretisation error is the splitting
commutator.  Blow-up shows up as the nonlinear scale factor hitting its
floor inside a step; the stepper halves dt and retries until dt underflows,
and the life-span estimator brackets the first escape time by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HorizonExhaustedError, SubstepBlowupSignal
from .grids import ComplexField, Grid1D, field_norms, free_propagate, NormReport
from .profile import (
    ModelParams,
    SCALE_FLOOR,
    physical_time,
    profile_blowup_time,
    resolve_profile,
    AnalyticProfile,
)


@dataclass(frozen=True)
class SolverConfig:
    params: ModelParams
    grid: Grid1D
    dt_initial: float = 0.01
    dt_floor: float = 1e-8
    amp_blowup_factor: float = 50.0
    tau_scale: float = 0.1
    t_end: float | None = None
    record_times: tuple = ()
    check_boundary: bool = True

    def __post_init__(self):
        if not self.dt_floor < self.dt_initial:
            raise ValueError("dt_floor must be below dt_initial")
        if not self.amp_blowup_factor > 1.0:
            raise ValueError("amp_blowup_factor must exceed 1")


@dataclass(frozen=True)
class Termination:
    kind: str        # reached_t_end | blowup | dt_underflow | no_blowup
    t: float
    detail: str = ""


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    fields: list[ComplexField] = field(default_factory=list)
    reports: list[NormReport] = field(default_factory=list)
    termination: Termination | None = None

    def record(self, fld: ComplexField):
        self.times.append(fld.t)
        self.fields.append(fld)
        self.reports.append(field_norms(fld))


def initial_field(params: ModelParams, grid: Grid1D) -> ComplexField:
    """epsilon * phi sampled on the grid."""
    prof = resolve_profile(params.profile)
    if isinstance(prof, AnalyticProfile):
        vals = prof.sample(grid.x)
    else:
        vals = prof
    return ComplexField(params.epsilon * np.asarray(vals, dtype=np.complex128), grid, 0.0)


def nonlinear_substep(fld: ComplexField, dt: float, params: ModelParams) -> ComplexField:
    """Exact pointwise flow of i u_t = lam*|u|^(p-1)*u over dt.

    With a = |u|^(p-1) frozen per point the amplitude obeys
    u -> u * w^(-1/(p-1)) * exp(i*theta), w = 1 - (p-1)*Im(lam)*a*dt.
    A scale factor at or below the floor raises the blow-up signal with the
    offending location; the caller decides how to react.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    p, lam = params.p, params.lam
    a = np.abs(fld.values) ** (p - 1.0)
    if lam.imag != 0.0:
        w = 1.0 - (p - 1.0) * lam.imag * a * dt
        wmin = float(np.min(w))
        if wmin <= SCALE_FLOOR:
            k = int(np.argmin(w))
            raise SubstepBlowupSignal(float(fld.grid.x[k]), wmin)
        theta = lam.real / ((p - 1.0) * lam.imag) * np.log(w)
        out = fld.values * w ** (-1.0 / (p - 1.0)) * np.exp(1j * theta)
    else:
        out = fld.values * np.exp(-1j * lam.real * a * dt)
    return fld.with_values(out)


def strang_step(fld: ComplexField, dt: float, params: ModelParams) -> ComplexField:
    """Kinetic half, full nonlinear step, kinetic half; second-order accurate.

    The kinetic halves sit outside so the nonlinear step carries the blow-up
    signal at full dt; with lam = 0 the composition is exactly the free flow.
    """
    half = free_propagate(fld, 0.5 * dt)
    mid = nonlinear_substep(half, dt, params)
    return free_propagate(mid, 0.5 * dt)


def _adaptive_dt(fld: ComplexField, cfg: SolverConfig) -> float:
    # nonlinear frequency |lam|*||u||_inf^(p-1) as the stiffness proxy
    amp = float(np.max(np.abs(fld.values)))
    freq = abs(cfg.params.lam) * amp ** (cfg.params.p - 1.0)
    return cfg.dt_initial / (1.0 + freq * cfg.tau_scale)


def _advance(
    fld: ComplexField,
    target: float,
    cfg: SolverConfig,
    amp_ceiling: float | None = None,
    dt_cap: float | None = None,
):
    """March from fld.t to target; stop early on blow-up criteria.

    Returns (last_good_field, event) where event is None on reaching the
    target, or a Termination whose t is the first time the criterion fired.
    The returned field is always strictly below the amplitude ceiling.
    """
    u = fld
    tol = 1e-12 * max(1.0, abs(target))
    while target - u.t > tol:
        dt_bound = _adaptive_dt(u, cfg)
        if dt_bound < cfg.dt_floor:
            return u, Termination(
                "dt_underflow", u.t, f"adaptive step {dt_bound:.3e} below floor"
            )
        dt = min(dt_bound, target - u.t)
        if dt_cap is not None:
            dt = min(dt, dt_cap)
        while True:
            try:
                u_new = strang_step(u, dt, cfg.params)
                break
            except SubstepBlowupSignal as sig:
                dt *= 0.5
                if dt < cfg.dt_floor:
                    return u, Termination(
                        "dt_underflow", u.t, f"dt {dt:.3e} < floor near x={sig.x:.4g}"
                    )
        if amp_ceiling is not None:
            if float(np.max(np.abs(u_new.values))) >= amp_ceiling:
                return u, Termination("blowup", u_new.t, "amplitude threshold")
        u = u_new
    return u.with_values(u.values, t=target), None


def evolve(cfg: SolverConfig) -> Trajectory:
    """Integrate the initial-value problem, recording norms at the requested times."""
    if cfg.t_end is None and not cfg.record_times:
        raise ValueError("evolve needs t_end or record_times")
    t_end = cfg.t_end if cfg.t_end is not None else max(cfg.record_times)
    marks = sorted({float(t) for t in cfg.record_times if 0.0 < t <= t_end})
    if t_end not in marks:
        marks.append(t_end)

    ceiling = None
    u = initial_field(cfg.params, cfg.grid)
    if cfg.params.lam.imag > 0:
        ceiling = cfg.amp_blowup_factor * float(np.max(np.abs(u.values)))

    traj = Trajectory()
    traj.record(u)
    for mark in marks:
        u, event = _advance(u, mark, cfg, amp_ceiling=ceiling)
        if event is not None:
            traj.record(u)
            traj.termination = event
            return traj
        if cfg.check_boundary:
            from .grids import require_contained

            require_contained(u)
        traj.record(u)
    traj.termination = Termination("reached_t_end", t_end)
    return traj


@dataclass(frozen=True)
class LifespanEstimate:
    """Operational life span: first time the blow-up criterion fires.

    The criterion (amplitude escape past amp_blowup_factor times the initial
    peak, or step-size underflow) is a stand-in for norm escape; t_num is the
    midpoint of the final bisection bracket [t_low, t_high].
    """

    t_num: float
    t_low: float
    t_high: float
    criterion: str
    horizon: float
    amp_ceiling: float | None

    @property
    def blew_up(self) -> bool:
        return self.criterion in ("amplitude", "dt_underflow")


def estimate_lifespan(
    cfg: SolverConfig, rel_width: float = 1e-3, horizon_factor: float = 3.0
) -> LifespanEstimate:
    """Bracket the first firing of the blow-up criterion by bisection.

    For Im(lam) <= 0 the problem is globally well-posed and the sentinel
    "no_blowup" is returned without simulating.  Otherwise the search runs to
    horizon_factor times the heuristic blow-up time and raises if nothing
    fires, rather than returning a silent answer.
    """
    params = cfg.params
    if params.lam.imag <= 0:
        horizon = cfg.t_end if cfg.t_end is not None else np.inf
        return LifespanEstimate(np.inf, np.inf, np.inf, "no_blowup", horizon, None)

    s_star = profile_blowup_time(params, None if isinstance(
        resolve_profile(params.profile), AnalyticProfile) else cfg.grid)
    heuristic = float(physical_time(s_star, params))
    horizon = cfg.t_end if cfg.t_end is not None else horizon_factor * heuristic

    u = initial_field(params, cfg.grid)
    ceiling = cfg.amp_blowup_factor * float(np.max(np.abs(u.values)))

    u, event = _advance(u, horizon, cfg, amp_ceiling=ceiling)
    if event is None:
        raise HorizonExhaustedError(
            f"criterion silent up to t={horizon:.6g} "
            f"(heuristic blow-up {heuristic:.6g}; grid L={cfg.grid.half_width}, "
            f"N={cfg.grid.n_points}); enlarge the horizon or the domain"
        )
    if event.kind == "dt_underflow":
        return LifespanEstimate(event.t, event.t, event.t, "dt_underflow", horizon, ceiling)

    t_lo, t_hi = u.t, event.t
    while (t_hi - t_lo) > rel_width * t_hi:
        t_mid = 0.5 * (t_lo + t_hi)
        cap = max((t_hi - t_lo) / 8.0, 2.0 * cfg.dt_floor)
        u_mid, ev = _advance(u, t_mid, cfg, amp_ceiling=ceiling, dt_cap=cap)
        if ev is None:
            u, t_lo = u_mid, t_mid
        else:
            u = u_mid
            t_lo = u_mid.t
            t_hi = ev.t
            if ev.kind == "dt_underflow":
                return LifespanEstimate(ev.t, t_lo, ev.t, "dt_underflow", horizon, ceiling)
    return LifespanEstimate(
        0.5 * (t_lo + t_hi), t_lo, t_hi, "amplitude", horizon, ceiling
    )
