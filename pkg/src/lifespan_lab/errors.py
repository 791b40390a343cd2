"""Exception types shared across the package."""


class FieldError(ValueError):
    """Invalid field data: non-finite samples or grid mismatch."""


class GridResolutionError(ValueError):
    """Grid cannot resolve the requested object (kernel, spectrum, boundary)."""


class ProfileHorizonError(ValueError):
    """Profile time s exceeds the configured horizon B."""


class ProfileBlowupError(ArithmeticError):
    """Amplitude scale factor hit its floor: the profile blew up."""

    def __init__(self, s: float, xi: float, value: float):
        self.s = s
        self.xi = xi
        self.value = value
        super().__init__(
            f"profile scale factor {value:.3e} at floor (s={s:.6g}, xi={xi:.6g})"
        )


class SubstepBlowupSignal(ArithmeticError):
    """Nonlinear substep detected blow-up within the step (consumed by the stepper)."""

    def __init__(self, x: float, value: float):
        self.x = x
        self.value = value
        super().__init__(f"substep scale factor {value:.3e} at floor near x={x:.6g}")


class HorizonExhaustedError(RuntimeError):
    """Life-span search ran out of time budget without meeting its criterion."""


class QuadratureError(RuntimeError):
    """Residual-budget quadrature failed its refinement-stability check."""
