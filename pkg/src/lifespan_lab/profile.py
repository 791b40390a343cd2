"""Closed-form focusing profile on the frequency grid and its oracles.

The pointwise model ODE  i dV/ds = lam*|V|^(p-1)*V  with data
exp(-i*pi/4)*phat(xi) has the explicit solution

    V(s, xi) = w(s, xi)^(-1/(p-1)) * exp(i*g(s, xi)) * phat(xi),
    w = 1 - (p-1)*Im(lam)*a(xi)*s,
    g = -Re(lam)*a(xi) * integral_0^s w(sigma)^-1 dsigma - pi/4,

where a = |phat|^(p-1), optionally smoothed by the compact kernel.  For
Im(lam) > 0 the peak of w reaches zero at the profile time

    s_blowup = 1 / ((p-1) * Im(lam) * sup_xi a(xi)),

which converts through the time change s(t) into the life-span constants.
Everything here is closed-form except the RK4 oracle, which integrates the
ODE numerically and independently.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import FieldError, GridResolutionError, ProfileBlowupError, ProfileHorizonError
from .grids import ComplexField, Grid1D, fourier_transform, spectral_derivative, spectral_tail_fraction
from .mollify import Kernel, bump_kernel, mollify, power_law

#: Smallest admissible value of the scale factor w before blow-up is declared.
SCALE_FLOOR = 1e-9

#: Keep 3 - p away from zero: the exponents 2/(3-p) overflow otherwise.
P_MARGIN = 1e-6


@dataclass(frozen=True)
class ModelParams:
    """Equation and data parameters: exponent, coupling, data size, smoothing width.

    delta defaults to epsilon**0.25.  The profile horizon B is either given
    explicitly or derived as horizon_fraction * s_blowup once the data are
    attached to a grid.
    """

    p: float
    lam: complex
    epsilon: float
    delta: float | None = None
    horizon_fraction: float = 0.9
    horizon: float | None = None
    profile: object = "gaussian"

    def __post_init__(self):
        if not (2.0 <= self.p < 3.0):
            raise ValueError(f"exponent p={self.p} outside [2, 3)")
        if 3.0 - self.p < P_MARGIN:
            raise ValueError(f"p={self.p} too close to 3: need 3 - p >= {P_MARGIN}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.delta is not None and self.delta <= 0:
            raise ValueError("delta must be positive")
        if not (0.0 < self.horizon_fraction < 1.0):
            raise ValueError("horizon_fraction must lie in (0, 1)")

    @property
    def smoothing_width(self) -> float:
        return self.delta if self.delta is not None else self.epsilon**0.25


@dataclass(frozen=True)
class AnalyticProfile:
    """Named initial shape with known transform and exact peak size."""

    name: str
    amplitude: float = 1.0
    carrier: float = 0.0  # frequency shift exp(i*carrier*x)

    def sample(self, x: np.ndarray) -> np.ndarray:
        base = np.exp(-(x**2) / 2.0)
        return self.amplitude * np.exp(1j * self.carrier * x) * base

    def transform(self, xi: np.ndarray) -> np.ndarray:
        return self.amplitude * np.exp(-((xi - self.carrier) ** 2) / 2.0)

    @property
    def sup_transform(self) -> float:
        return self.amplitude


def resolve_profile(descriptor) -> AnalyticProfile | np.ndarray:
    """Accept a name, a {"name": ...} mapping, or raw complex samples."""
    if isinstance(descriptor, AnalyticProfile):
        return descriptor
    if isinstance(descriptor, str):
        if descriptor != "gaussian":
            raise ValueError(f"unknown profile {descriptor!r}")
        return AnalyticProfile("gaussian")
    if isinstance(descriptor, dict):
        spec = dict(descriptor)
        name = spec.pop("name", "gaussian")
        if name != "gaussian":
            raise ValueError(f"unknown profile {name!r}")
        prof = AnalyticProfile(
            "gaussian",
            amplitude=float(spec.pop("amplitude", 1.0)),
            carrier=float(spec.pop("carrier", 0.0)),
        )
        if spec:
            raise ValueError(f"unknown profile keys {sorted(spec)}")
        return prof
    return np.asarray(descriptor, dtype=np.complex128)


@dataclass(frozen=True)
class ProfileData:
    """Initial data attached to a grid, with everything derived from the transform."""

    params: ModelParams
    grid: Grid1D
    phi: ComplexField            # unit-size shape on the spatial grid (epsilon NOT included)
    phat: ComplexField           # transform on the ascending frequency grid
    dphat: np.ndarray            # d(phat)/dxi on the same grid
    amp: np.ndarray              # |phat|^(p-1)
    amp_smooth: np.ndarray       # kernel * |phat|^(p-1)
    sup_amp: float               # sup of amp (analytic when available)
    kernel: Kernel = field(repr=False, default=None)

    @property
    def s_blowup(self) -> float:
        """Profile time at which the unsmoothed peak scale factor hits zero."""
        im = self.params.lam.imag
        if im <= 0 or self.sup_amp == 0.0:
            return np.inf
        return 1.0 / ((self.params.p - 1.0) * im * self.sup_amp)

    @property
    def horizon(self) -> float:
        """The configured horizon B < s_blowup for profile evaluation."""
        if self.params.horizon is not None:
            return self.params.horizon
        s_star = self.s_blowup
        if not np.isfinite(s_star):
            return np.inf
        return self.params.horizon_fraction * s_star

    def validate_horizon(self) -> None:
        if self.params.lam.imag > 0 and not self.horizon < self.s_blowup:
            raise ValueError(
                f"horizon {self.horizon} must stay below the blow-up time {self.s_blowup}"
            )

    @cached_property
    def initial_fft(self) -> np.ndarray:
        """FFT (unshifted) of the size-epsilon initial data, for the free flow."""
        return np.fft.fft(self.params.epsilon * self.phi.values)


def _refined_sup(values: np.ndarray) -> float:
    """Discrete sup with one parabolic refinement around the peak sample."""
    mags = np.abs(values)
    k = int(np.argmax(mags))
    if k == 0 or k == len(mags) - 1:
        return float(mags[k])
    y0, y1, y2 = mags[k - 1], mags[k], mags[k + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0:
        return float(y1)
    shift = 0.5 * (y0 - y2) / denom
    return float(y1 - 0.25 * (y0 - y2) * shift)


def prepare_profile(
    params: ModelParams, grid: Grid1D, tail_tol: float = 1e-8
) -> ProfileData:
    """Sample the data on the grid, transform, smooth, and fix the horizon.

    Rejects data whose spectrum is not resolved (top-octave energy above
    tail_tol) because the peak of the transform would be untrustworthy.
    """
    prof = resolve_profile(params.profile)
    if isinstance(prof, AnalyticProfile):
        phi = ComplexField(prof.sample(grid.x), grid, 0.0)
        sup_amp = prof.sup_transform ** (params.p - 1.0)
    else:
        if prof.shape != (grid.n_points,):
            raise FieldError("sampled profile does not match the grid")
        phi = ComplexField(prof, grid, 0.0)
        sup_amp = None

    tail = spectral_tail_fraction(phi)
    if tail > tail_tol:
        raise GridResolutionError(
            f"initial data unresolved: top-octave energy fraction {tail:.3e} > {tail_tol:.1e}"
        )

    phat = fourier_transform(phi)
    dphat = spectral_derivative(phat).values
    if sup_amp is None:
        sup_amp = _refined_sup(phat.values) ** (params.p - 1.0)

    amp = power_law(phat.values, params.p)
    kernel = bump_kernel(params.smoothing_width, phat.grid.dx)
    amp_smooth = mollify(amp, kernel)

    data = ProfileData(
        params=params,
        grid=grid,
        phi=phi,
        phat=phat,
        dphat=dphat,
        amp=amp,
        amp_smooth=amp_smooth,
        sup_amp=sup_amp,
        kernel=kernel,
    )
    data.validate_horizon()
    return data


def profile_blowup_time(params: ModelParams, grid: Grid1D | None = None) -> float:
    """Blow-up threshold in profile time; +inf when Im(lam) <= 0 or the data vanish."""
    if grid is None:
        prof = resolve_profile(params.profile)
        if not isinstance(prof, AnalyticProfile):
            raise ValueError("sampled profiles need an explicit grid")
        im = params.lam.imag
        sup_amp = prof.sup_transform ** (params.p - 1.0)
        if im <= 0 or sup_amp == 0.0:
            return np.inf
        return 1.0 / ((params.p - 1.0) * im * sup_amp)
    return prepare_profile(params, grid).s_blowup


def profile_time(t, params: ModelParams):
    """s(t) = 2*eps^(p-1)*t^((3-p)/2)/(3-p), the accumulated nonlinear clock."""
    p, eps = params.p, params.epsilon
    return 2.0 * eps ** (p - 1.0) * np.asarray(t, dtype=float) ** ((3.0 - p) / 2.0) / (3.0 - p)


def physical_time(s, params: ModelParams):
    """Inverse of profile_time on [0, inf)."""
    p, eps = params.p, params.epsilon
    return ((3.0 - p) * np.asarray(s, dtype=float) / (2.0 * eps ** (p - 1.0))) ** (2.0 / (3.0 - p))


def matching_horizon(data: ProfileData) -> float:
    """Physical time at which the profile clock reaches the horizon B."""
    return float(physical_time(data.horizon, data.params))


@dataclass(frozen=True)
class ProfileEval:
    """Profile state at one s: scale, phase, values, and their derivatives."""

    s: float
    xi: np.ndarray
    scale: np.ndarray       # w(s, xi)
    phase: np.ndarray       # g(s, xi)
    values: np.ndarray      # V(s, xi)
    d_xi: np.ndarray        # dV/dxi (4th-order differences)
    d2_xi: np.ndarray       # d2V/dxi2
    d_s: np.ndarray         # dV/ds (closed form)


def _phase_integral(coef: np.ndarray, s: float) -> np.ndarray:
    """integral_0^s (1 - coef*sigma)^-1 dsigma, elementwise; equals s where coef == 0."""
    out = np.full_like(coef, s, dtype=float)
    nz = coef != 0.0
    out[nz] = -np.log1p(-coef[nz] * s) / coef[nz]
    return out


def _diff4(values: np.ndarray, h: float, order: int) -> np.ndarray:
    """4th-order centred differences; ends wrap, which is harmless for decayed tails."""
    vp1, vm1 = np.roll(values, -1), np.roll(values, 1)
    vp2, vm2 = np.roll(values, -2), np.roll(values, 2)
    if order == 1:
        return (-vp2 + 8.0 * vp1 - 8.0 * vm1 + vm2) / (12.0 * h)
    if order == 2:
        return (-vp2 + 16.0 * vp1 - 30.0 * values + 16.0 * vm1 - vm2) / (12.0 * h**2)
    raise ValueError("order must be 1 or 2")


def _scale_phase(data: ProfileData, s: float, mollified: bool, check: bool = True):
    params = data.params
    amp = data.amp_smooth if mollified else data.amp
    coef = (params.p - 1.0) * params.lam.imag * amp
    scale = 1.0 - coef * s
    if check and np.any(scale <= SCALE_FLOOR):
        k = int(np.argmin(scale))
        raise ProfileBlowupError(s, float(data.phat.grid.x[k]), float(scale[k]))
    phase = -params.lam.real * amp * _phase_integral(coef, s) - np.pi / 4.0
    return amp, scale, phase


def profile_envelope(
    data: ProfileData, s: float, exponent: float, mollified: bool = True
) -> np.ndarray:
    """w^exponent * exp(i*g) on the frequency grid, the smooth factor of the profile."""
    _, scale, phase = _scale_phase(data, s, mollified)
    return scale**exponent * np.exp(1j * phase)


def eval_profile(s: float, data: ProfileData, mollified: bool = True) -> ProfileEval:
    """Closed-form profile state at profile time s in [0, B]."""
    params = data.params
    if s < 0:
        raise ValueError("profile time must be non-negative")
    if s > data.horizon * (1.0 + 1e-12):
        raise ProfileHorizonError(f"s={s} beyond horizon B={data.horizon}")

    amp, scale, phase = _scale_phase(data, s, mollified)
    values = scale ** (-1.0 / (params.p - 1.0)) * np.exp(1j * phase) * data.phat.values
    h = data.phat.grid.dx
    d_s = -1j * params.lam * amp / scale * values
    return ProfileEval(
        s=s,
        xi=data.phat.grid.x,
        scale=scale,
        phase=phase,
        values=values,
        d_xi=_diff4(values, h, 1),
        d2_xi=_diff4(values, h, 2),
        d_s=d_s,
    )


def rk4_integrate(
    v0: np.ndarray,
    s_end: float,
    lam: complex,
    p: float,
    tol: float = 1e-10,
    n_start: int = 64,
    n_max: int = 1 << 21,
) -> np.ndarray:
    """Classical RK4 for i dV/ds = lam*|V|^(p-1)*V, doubling steps until stable.

    Stops when doubling the step count moves the result by less than tol in
    the sup norm; raises near blow-up when the budget n_max is exhausted.
    """

    def rhs(v):
        return -1j * lam * np.abs(v) ** (p - 1.0) * v

    def run(n):
        v = v0.astype(np.complex128)
        h = s_end / n
        for _ in range(n):
            k1 = rhs(v)
            k2 = rhs(v + 0.5 * h * k1)
            k3 = rhs(v + 0.5 * h * k2)
            k4 = rhs(v + h * k3)
            v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(v.view(np.float64))):
                raise ProfileBlowupError(s_end, np.nan, np.nan)
        return v

    if s_end == 0.0:
        return v0.astype(np.complex128)
    prev = run(n_start)
    n = n_start
    while True:
        n *= 2
        if n > n_max:
            raise ProfileBlowupError(s_end, np.nan, float(n))
        cur = run(n)
        if float(np.max(np.abs(cur - prev))) < tol:
            return cur
        prev = cur


def rk4_profile_oracle(s_end: float, data: ProfileData, tol: float = 1e-10) -> np.ndarray:
    """Integrate the raw (unsmoothed) profile ODE from its standard data.

    Independent of the closed form; requires s_end safely below the blow-up
    time of the unsmoothed amplitude.
    """
    if not s_end < data.s_blowup * (1.0 - 1e-3):
        raise ValueError(
            f"oracle needs s_end < {data.s_blowup * (1 - 1e-3):.6g}, got {s_end}"
        )
    v0 = np.exp(-1j * np.pi / 4.0) * data.phat.values
    return rk4_integrate(v0, s_end, data.params.lam, data.params.p, tol=tol)


@dataclass(frozen=True)
class ResidualIdentity:
    """Both sides of the smoothed-profile defect identity at one s."""

    s: float
    lhs: np.ndarray   # i*dV/ds - lam*|V|^(p-1)*V with dV/ds by centred differences
    rhs: np.ndarray   # closed form: lam * w^(-p/(p-1)) e^(i g) phat * (amp_smooth - amp)
    step: float


def profile_residual(
    s: float, data: ProfileData, step: float = 1e-3, mollified: bool = True
) -> ResidualIdentity:
    """Defect of the smoothed profile against the raw ODE, two independent ways.

    The left side differentiates eval_profile in s with a centred difference
    of the given step, so lhs - rhs vanishes at second order in step.
    """
    params = data.params
    h = min(step, 0.49 * min(s if s > 0 else step, data.horizon - s + 1e-300))
    if h <= 0:
        raise ValueError("no room for the centred difference inside [0, B]")
    v_plus = eval_profile(s + h, data, mollified).values
    v_minus = eval_profile(s - h, data, mollified).values
    v_mid = eval_profile(s, data, mollified).values
    d_s = (v_plus - v_minus) / (2.0 * h)
    lhs = 1j * d_s - params.lam * np.abs(v_mid) ** (params.p - 1.0) * v_mid

    amp_used = data.amp_smooth if mollified else data.amp
    envelope = profile_envelope(data, s, -params.p / (params.p - 1.0), mollified)
    rhs = params.lam * envelope * data.phat.values * (amp_used - data.amp)
    return ResidualIdentity(s=s, lhs=lhs, rhs=rhs, step=h)


def with_delta(data: ProfileData, delta: float) -> ProfileData:
    """Re-smooth the same data with a different kernel width."""
    kernel = bump_kernel(delta, data.phat.grid.dx)
    return replace(
        data,
        params=replace(data.params, delta=delta),
        amp_smooth=mollify(data.amp, kernel),
        kernel=kernel,
    )
