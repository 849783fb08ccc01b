"""Adaptive quadrature helpers for the exponent calculus.

Finite intervals go through QUADPACK's adaptive Gauss-Kronrod rules
(``scipy.integrate.quad``) at relative tolerance 1e-10 with an absolute
floor of 1e-14.  Integrals over unbounded tails, and integrals whose
convergence at an endpoint is itself in question, are evaluated on a
growing (or shrinking) sequence of cutoffs so that non-convergence is
detected and reported instead of silently trusted.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import QuadratureError

REL_TOL = 1e-10
ABS_TOL = 1e-14

# QUADPACK returns an explanation string as a 4th element when it is unhappy.
_MSG_SLOT = 3


def quad_real(
    f: Callable[[float], float],
    a: float,
    b: float,
    points: Optional[Sequence[float]] = None,
    rel_tol: float = REL_TOL,
    abs_tol: float = ABS_TOL,
) -> float:
    """Integrate a real-valued integrand, raising on non-convergence."""
    pts = None
    if points is not None and np.isfinite(a) and np.isfinite(b):
        pts = sorted(p for p in points if a < p < b)
        if not pts:
            pts = None
    out = integrate.quad(
        f, a, b, epsabs=abs_tol, epsrel=rel_tol, limit=300, points=pts, full_output=1
    )
    value, err = out[0], out[1]
    if len(out) > _MSG_SLOT:
        allowed = 10.0 * max(abs_tol, rel_tol * abs(value))
        if not np.isfinite(value) or err > allowed:
            raise QuadratureError(
                f"quadrature on ({a!r}, {b!r}) did not converge: "
                f"achieved abs error {err:.3e}, value {value:.6e}",
                achieved=err,
                requested=allowed,
            )
    return value


def quad_complex(
    f: Callable[[float], complex],
    a: float,
    b: float,
    points: Optional[Sequence[float]] = None,
    rel_tol: float = REL_TOL,
    abs_tol: float = ABS_TOL,
) -> complex:
    """Integrate a complex-valued integrand part by part.

    The integrand value is cached per node so the real and imaginary
    passes share evaluations wherever their subdivisions coincide.
    """
    cache: dict[float, complex] = {}

    def ev(t: float) -> complex:
        z = cache.get(t)
        if z is None:
            z = complex(f(t))
            cache[t] = z
        return z

    re = quad_real(lambda t: ev(t).real, a, b, points, rel_tol, abs_tol)
    im = quad_real(lambda t: ev(t).imag, a, b, points, rel_tol, abs_tol)
    return complex(re, im)


def tail_quad(
    f: Callable[[float], float],
    a: float,
    rel_tol: float = REL_TOL,
    abs_tol: float = ABS_TOL,
    growth: float = 4.0,
    max_stages: int = 40,
) -> tuple[float, bool]:
    """Integrate ``f`` over ``(a, inf)`` on a growing cutoff sequence.

    Returns ``(value, converged)``.  ``converged`` is False when the
    partial integrals fail to stabilize, which is how callers detect a
    (numerically) divergent tail without pretending to prove divergence.
    """
    b = max(2.0 * a, 10.0)
    try:
        total = quad_real(f, a, b, rel_tol=rel_tol, abs_tol=abs_tol)
    except QuadratureError:
        return np.nan, False
    small_streak = 0
    for _ in range(max_stages):
        try:
            inc = quad_real(f, b, growth * b, rel_tol=rel_tol, abs_tol=abs_tol)
        except QuadratureError:
            return total, False
        total += inc
        b *= growth
        if not np.isfinite(total) or abs(total) > 1e12:
            return total, False
        if abs(inc) <= max(10.0 * abs_tol, rel_tol * abs(total)):
            small_streak += 1
            if small_streak >= 2:
                return total, True
        else:
            small_streak = 0
    return total, False


def head_quad(
    f: Callable[[float], float],
    b: float,
    rel_tol: float = REL_TOL,
    abs_tol: float = ABS_TOL,
    shrink: float = 4.0,
    max_stages: int = 40,
) -> tuple[float, bool]:
    """Integrate ``f`` over ``(0, b]`` on a shrinking cutoff sequence.

    Same convergence contract as :func:`tail_quad`, used to probe
    integrability at the origin.
    """
    a = b / shrink
    try:
        total = quad_real(f, a, b, rel_tol=rel_tol, abs_tol=abs_tol)
    except QuadratureError:
        return np.nan, False
    small_streak = 0
    for _ in range(max_stages):
        try:
            inc = quad_real(f, a / shrink, a, rel_tol=rel_tol, abs_tol=abs_tol)
        except QuadratureError:
            return total, False
        total += inc
        a /= shrink
        if not np.isfinite(total) or abs(total) > 1e12:
            return total, False
        if abs(inc) <= max(10.0 * abs_tol, rel_tol * abs(total)):
            small_streak += 1
            if small_streak >= 2:
                return total, True
        else:
            small_streak = 0
    return total, False
