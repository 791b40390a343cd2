"""Compact smoothing kernel and the H1 mollification-error diagnostics.

The kernel is the standard bump exp(-1/(1-y^2)) on (-1, 1), rescaled to
width delta and renormalised on the working grid so that the discrete
quadrature of the kernel is exactly one.  Convolution is direct summation
over the (narrow) support window, never a DFT, so nothing wraps around.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.ndimage import convolve1d

from .errors import GridResolutionError
from .grids import ComplexField, l2_norm, spectral_derivative


def _bump(y: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y, dtype=float)
    inside = np.abs(y) < 1.0
    yi = y[inside]
    out[inside] = np.exp(-1.0 / (1.0 - yi * yi))
    return out


@lru_cache(maxsize=1)
def bump_mass() -> float:
    """Continuum normaliser of the unit bump, integral of exp(-1/(1-y^2)) over (-1,1)."""
    val, _ = quad(lambda y: np.exp(-1.0 / (1.0 - y * y)), -1.0, 1.0)
    return val


@dataclass(frozen=True)
class Kernel:
    """Sampled smoothing kernel of width delta on a grid of the given spacing.

    weights holds the kernel at offsets m*spacing for m = -reach..reach,
    normalised so that spacing * sum(weights) == 1 exactly.
    """

    delta: float
    spacing: float
    weights: np.ndarray

    @property
    def reach(self) -> int:
        return (len(self.weights) - 1) // 2

    @property
    def offsets(self) -> np.ndarray:
        return self.spacing * (np.arange(len(self.weights)) - self.reach)


def bump_kernel(delta: float, spacing: float) -> Kernel:
    """Build the width-delta kernel sampled at the grid spacing.

    Requires delta >= 3*spacing so the bump is seen by at least a handful of
    samples; below that the discrete kernel degenerates.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if delta < 3.0 * spacing:
        raise GridResolutionError(
            f"kernel width {delta:.4g} under-resolved: need spacing <= {delta / 3.0:.4g}"
            f" (grid has {spacing:.4g})"
        )
    reach = int(np.ceil(delta / spacing))
    offsets = spacing * np.arange(-reach, reach + 1)
    raw = _bump(offsets / delta) / delta
    weights = raw / (spacing * raw.sum())
    return Kernel(delta=delta, spacing=spacing, weights=weights)


def mollify(values: np.ndarray, kernel: Kernel) -> np.ndarray:
    """Convolve samples with the kernel; constants are exact fixed points.

    Edges are extended with their end values, which keeps constants constant
    and never wraps mass around the domain.
    """
    vals = np.asarray(values)
    w = kernel.spacing * kernel.weights
    if np.iscomplexobj(vals):
        return convolve1d(vals.real, w, mode="nearest") + 1j * convolve1d(
            vals.imag, w, mode="nearest"
        )
    return convolve1d(vals, w, mode="nearest")


def power_law(phat: np.ndarray, p: float) -> np.ndarray:
    """|phat|^(p-1), the amplitude envelope driving the focusing dynamics."""
    return np.abs(phat) ** (p - 1.0)


def power_law_derivative(
    phat: np.ndarray, dphat: np.ndarray, p: float, floor: float = 1e-300
) -> np.ndarray:
    """d/dxi of |phat|^(p-1) in a form stable near zeros of phat.

    Writing phat = r*exp(i*theta), the derivative is
    (p-1) * r^(p-2) * Re(exp(-i*theta) * dphat); the modulus power is split
    off so no negative power of r is ever formed.  Points with r below the
    floor contribute zero.
    """
    r = np.abs(phat)
    safe = r > floor
    out = np.zeros_like(r)
    unit = np.zeros_like(phat)
    unit[safe] = np.conj(phat[safe]) / r[safe]
    radial = np.real(unit * dphat)
    out[safe] = (p - 1.0) * r[safe] ** (p - 2.0) * radial[safe]
    return out


def mollification_error(
    phat_field: ComplexField,
    p: float,
    delta: float,
    dphat: np.ndarray | None = None,
) -> float:
    """H1 distance between the smoothed and raw amplitude envelopes.

    phat_field lives on the frequency grid (ascending order).  The envelope
    derivative uses the stable power-law form; the smoothed side commutes the
    kernel with the derivative, which is exact for the discrete convolution.
    """
    grid = phat_field.grid
    if dphat is None:
        dphat = spectral_derivative(phat_field).values
    kernel = bump_kernel(delta, grid.dx)
    g = power_law(phat_field.values, p)
    dg = power_law_derivative(phat_field.values, np.asarray(dphat), p)
    diff = mollify(g, kernel) - g
    ddiff = mollify(dg, kernel) - dg
    return float(np.hypot(l2_norm(diff, grid.dx), l2_norm(ddiff, grid.dx)))


def mollification_error_envelope(
    phat_field: ComplexField,
    p: float,
    deltas: np.ndarray,
    dphat: np.ndarray | None = None,
) -> dict[float, float]:
    """Monotone error envelope over a delta ladder.

    The envelope at delta is the running sup of the raw error over all
    sampled widths <= delta, capped at twice the H1 size of the envelope
    itself, so it is non-decreasing in delta by construction.
    """
    grid = phat_field.grid
    if dphat is None:
        dphat = spectral_derivative(phat_field).values
    g = power_law(phat_field.values, p)
    dg = power_law_derivative(phat_field.values, np.asarray(dphat), p)
    cap = 2.0 * float(np.hypot(l2_norm(g, grid.dx), l2_norm(dg, grid.dx)))

    ladder = sorted(float(d) for d in deltas)
    out: dict[float, float] = {}
    running = 0.0
    for d in ladder:
        raw = mollification_error(phat_field, p, d, dphat=dphat)
        running = max(running, raw)
        out[d] = min(cap, running)
    return out
