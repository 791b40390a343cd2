"""Closed-form life-span bounds from the model parameters and data peak."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BoundReport:
    """Life-span constants for given exponent, coupling and transform peak.

    scaling_exponent is the power of eps multiplying the life span; the
    scaled life span eps**(-scaling_exponent) * T is bounded below (in the
    small-data limit) by liminf_const.  At p = 3 the scaling is logarithmic
    and log_bound replaces liminf_const.
    """

    p: float
    im_lambda: float
    sup_transform: float
    s_blowup: float              # +inf when Im(lambda) <= 0 or the data vanish
    liminf_const: float | None   # ((3-p)*s_blowup/2)**(2/(3-p)) for p < 3
    scaling_exponent: float | None
    log_bound: float | None      # 1/(2*Im(lambda)*sup^2) at p = 3
    t_matching: float | None     # horizon T_B when eps and B were supplied


def lifespan_bound(
    p: float,
    lam: complex,
    sup_transform: float,
    epsilon: float | None = None,
    horizon: float | None = None,
) -> BoundReport:
    """Evaluate the life-span constants; 1/0 is honoured as +inf.

    sup_transform is sup over frequencies of |phat|.  For 2 <= p < 3 the
    bound constant is ((3-p)*s_blowup/2)**(2/(3-p)); p = 3 routes to the
    logarithmic bound instead.  Supplying epsilon and horizon B also returns
    the matching horizon T_B = ((3-p)*B/(2*eps**(p-1)))**(2/(3-p)).
    """
    if not (2.0 <= p <= 3.0):
        raise ValueError(f"exponent p={p} outside [2, 3]")
    if sup_transform < 0:
        raise ValueError("sup_transform must be non-negative")
    im = lam.imag

    if im <= 0 or sup_transform == 0.0:
        s_blowup = np.inf
    else:
        s_blowup = 1.0 / ((p - 1.0) * im * sup_transform ** (p - 1.0))

    if p == 3.0:
        log_bound = np.inf if not np.isfinite(s_blowup) else 0.5 / (im * sup_transform**2)
        return BoundReport(
            p=p,
            im_lambda=im,
            sup_transform=sup_transform,
            s_blowup=s_blowup,
            liminf_const=None,
            scaling_exponent=None,
            log_bound=log_bound,
            t_matching=None,
        )

    exponent = 2.0 * (p - 1.0) / (3.0 - p)
    if np.isfinite(s_blowup):
        liminf_const = ((3.0 - p) * s_blowup / 2.0) ** (2.0 / (3.0 - p))
    else:
        liminf_const = np.inf

    t_matching = None
    if epsilon is not None and horizon is not None and np.isfinite(horizon):
        t_matching = ((3.0 - p) * horizon / (2.0 * epsilon ** (p - 1.0))) ** (
            2.0 / (3.0 - p)
        )
    return BoundReport(
        p=p,
        im_lambda=im,
        sup_transform=sup_transform,
        s_blowup=s_blowup,
        liminf_const=liminf_const,
        scaling_exponent=exponent,
        log_bound=None,
        t_matching=t_matching,
    )
