"""Gaussian cavity-mode coupling along a straight atomic trajectory.

Positions are measured from the cavity axis. With the atom moving at a
constant speed, time and position are interchangeable (``dt = dr / v``),
which makes the pulse area a plain error-function difference.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from fockgen.errors import InfeasibleTargetError, QuadratureError

TWO_PI = 2.0 * math.pi

# Bisection on erf(u) = c, u = a / waist.
_BISECT_MAX_ITER = 200
_BRACKET_MAX_DOUBLINGS = 64


@dataclass(frozen=True)
class CavityParams:
    """Physical constants of the atom-cavity setup, strict SI units.

    The defaults are the microwave Fabry-Perot figures: vacuum Rabi
    frequency 2*pi*47 kHz at the centre, 6 mm waist, 500 m/s atoms, 123 ms
    cavity damping time, 1 us Stark switching and a 10 us slot per atom.
    """

    omega0: float = TWO_PI * 47e3
    waist: float = 6e-3
    velocity: float = 500.0
    t_cav: float = 123e-3
    t_switch: float = 1e-6
    tau_bar: float = 10e-6

    def __post_init__(self):
        for name in ("omega0", "waist", "velocity", "t_cav", "t_switch", "tau_bar"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        for name in ("omega0", "waist", "velocity", "t_cav", "tau_bar"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.t_switch < 0:
            raise ValueError(f"t_switch must be non-negative, got {self.t_switch!r}")

    @property
    def full_transit_area(self) -> float:
        """Pulse area of a complete pass through the mode, ``omega0 sqrt(pi) w / v``."""
        return self.omega0 * math.sqrt(math.pi) * self.waist / self.velocity


@dataclass(frozen=True)
class PulseWindow:
    """One resonant interval of one atom, stored as positions on its path."""

    atom_index: int
    r_start: float
    r_end: float
    duration: float
    target_area: float

    def __post_init__(self):
        if self.atom_index < 1:
            raise ValueError(f"atom_index must be >= 1, got {self.atom_index}")
        if not self.r_end > self.r_start:
            raise ValueError("window must satisfy r_end > r_start")

    @property
    def half_width(self) -> float:
        return 0.5 * (self.r_end - self.r_start)


def coupling_at(params: CavityParams, r: float) -> float:
    """Local coupling ``omega0 * exp(-r**2 / w**2)`` at distance ``r`` from the axis."""
    return params.omega0 * math.exp(-((r / params.waist) ** 2))


def pulse_area_closed(params: CavityParams, r_start: float, r_end: float) -> float:
    """Pulse area accumulated between two positions, via the error function.

    Either bound may be infinite. The prefactor is half the full-transit
    area, so ``(-inf, inf)`` returns ``params.full_transit_area``.
    """
    if r_end < r_start:
        raise ValueError(f"r_end ({r_end}) must be >= r_start ({r_start})")
    if r_end == r_start:
        return 0.0
    a, b = r_start / params.waist, r_end / params.waist
    # erfc differences avoid cancellation when both ends sit in the same tail.
    if a >= 0:
        diff = math.erfc(a) - math.erfc(b)
    elif b <= 0:
        diff = math.erfc(-b) - math.erfc(-a)
    else:
        diff = math.erf(b) - math.erf(a)
    return 0.5 * params.full_transit_area * diff


def pulse_area_numeric(
    params: CavityParams,
    r_start: float,
    r_end: float,
    abs_tol: float = 1e-13,
    limit: int = 200,
) -> float:
    """Pulse area by adaptive quadrature of the coupling along the path.

    Serves as an oracle for :func:`pulse_area_closed`; nothing here
    touches the error function.

    Raises:
        QuadratureError: if the integrator reports non-convergence or an
            error estimate above ``abs_tol``.
    """
    if r_end < r_start:
        raise ValueError(f"r_end ({r_end}) must be >= r_start ({r_start})")
    if abs_tol <= 0:
        raise ValueError("abs_tol must be positive")
    if r_end == r_start:
        return 0.0

    def integrand(r):
        return coupling_at(params, r) / params.velocity

    # Breakpoints at the axis and +-w keep QUADPACK from stepping over the peak.
    points = None
    if math.isfinite(r_start) and math.isfinite(r_end):
        inner = [p for p in (-params.waist, 0.0, params.waist) if r_start < p < r_end]
        points = inner or None

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            integrand,
            r_start,
            r_end,
            epsabs=abs_tol,
            epsrel=1e-13,
            limit=limit,
            points=points,
            full_output=True,
        )
    value, abserr, info = out[0], out[1], out[2]
    if len(out) > 3:
        raise QuadratureError(f"pulse-area quadrature failed: {out[3]}")
    if abserr > abs_tol and abserr > 1e-13 * abs(value):
        raise QuadratureError(
            f"pulse-area quadrature error estimate {abserr:.3e} exceeds tolerance {abs_tol:.3e} "
            f"after {info['neval']} evaluations"
        )
    return value


def _erf_bisect(c: float) -> float:
    """Solve ``erf(u) = c`` for ``u > 0`` with ``0 < c < 1`` by bisection."""
    lo, hi = 0.0, 1.0
    for _ in range(_BRACKET_MAX_DOUBLINGS):
        if math.erf(hi) > c:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise InfeasibleTargetError(f"erf(u) = {c!r} has no representable solution")

    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if math.erf(mid) < c:
            lo = mid
        else:
            hi = mid
    # Pick whichever bracket end lands closer in area space.
    return lo if abs(math.erf(lo) - c) <= abs(math.erf(hi) - c) else hi


def solve_symmetric_window(params: CavityParams, atom_index: int, theta_target: float) -> PulseWindow:
    """Find the window ``[-a, a]`` centred on the axis that delivers ``theta_target``.

    Raises:
        ValueError: ``theta_target`` is not positive.
        InfeasibleTargetError: ``theta_target`` is at or above the full-transit
            area; the atom cannot collect that much coupling at this speed.
    """
    if not theta_target > 0:
        raise ValueError(f"theta_target must be positive, got {theta_target!r}")
    full = params.full_transit_area
    if theta_target >= full:
        raise InfeasibleTargetError(
            f"atom {atom_index}: pulse area {theta_target:.6g} rad is not reachable; "
            f"a full transit gives only {full:.6g} rad",
            atom_index=atom_index,
        )
    try:
        u = _erf_bisect(theta_target / full)
    except InfeasibleTargetError as exc:
        raise InfeasibleTargetError(
            f"atom {atom_index}: pulse area {theta_target:.6g} rad is too close to the "
            f"full-transit limit {full:.6g} rad",
            atom_index=atom_index,
        ) from exc
    a = u * params.waist
    return PulseWindow(
        atom_index=atom_index,
        r_start=-a,
        r_end=a,
        duration=2.0 * a / params.velocity,
        target_area=theta_target,
    )
