"""Random-integral mappings as exponent and triplet transforms.

The two basic mappings act on an infinitely divisible law ``nu`` through
its Levy process ``Y_nu``:

* ``j_beta``: law of the integral of ``t**(1/beta)`` against ``dY_nu(t)``
  over (0, 1]; on exponents, ``phi_out(y)`` is the integral over t in
  (0, 1) of ``phi(t**(1/beta) y)``.
* ``i_map``: law of the integral of ``exp(-s)`` against ``dY_nu(s)`` over
  (0, inf); on exponents, the integral over u in (0, 1] of ``phi(u y)/u``.

``i_of_j_beta`` is the one-shot composition with weight
``u**-1 - u**(beta-1)``, equivalently the integral of ``phi(exp(-s) y)``
against the inner clock ``sigma_beta``; agreeing with
``i_map(j_beta(...))`` is one of the package's central cross-checks.

When the input carries a triplet, ``j_beta`` also produces the
closed-form transformed triplet (shift contraction ``beta/(beta+1)``,
covariance contraction ``beta/(beta+2)``, radially smeared spectral
measure); the exponent evaluator of the result is always the quadrature
transform, and triplet/quadrature agreement is a tested invariant.
"""

from __future__ import annotations

import math

import numpy as np

from .core import (
    DensitySegment,
    IdMeasure,
    LevyTriplet,
    RadialComponent,
    SpectralMeasure,
    callable_segment,
    log_moment,
    power_segment,
)
from .errors import DomainError, ValidationError
from .quadrature import quad_complex, quad_real

__all__ = [
    "check_beta",
    "sigma_clock",
    "sigma_clock_deriv",
    "j_beta",
    "j_beta_inverse",
    "i_map",
    "i_of_j_beta",
    "corollary1a_kernel",
    "smear_spectral",
    "smear_triplet",
]

# lower split point for the weighted integrals of i_map / i_of_j_beta;
# below it the exponent is replaced by its two-term expansion at 0
SMALL_U_SPLIT = 1e-6


def check_beta(beta: float) -> float:
    beta = float(beta)
    if not (math.isfinite(beta) and beta > 0):
        raise ValidationError(f"beta must be finite and > 0, got {beta}")
    return beta


# ---------------------------------------------------------------------------
# inner clock
# ---------------------------------------------------------------------------


def sigma_clock(beta: float, s):
    """Deterministic inner clock ``s + exp(-beta*s)/beta - 1/beta``.

    Vanishes at 0, is nondecreasing, and approaches ``s - 1/beta`` from
    above as s grows.
    """
    b = check_beta(beta)
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValidationError("clock argument must be >= 0")
    # expm1 keeps accuracy where s + (exp(-b s) - 1)/b nearly cancels
    out = s + np.expm1(-b * s) / b
    return out if out.ndim else float(out)


def sigma_clock_deriv(beta: float, s):
    """Derivative ``1 - exp(-beta*s)`` of the inner clock."""
    b = check_beta(beta)
    s = np.asarray(s, dtype=float)
    out = -np.expm1(-b * s)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# spectral smearing (closed-form triplet route)
# ---------------------------------------------------------------------------


def _smear_power_segment(seg: DensitySegment, beta: float) -> DensitySegment:
    """Closed-form smear of a power density ``c r^p`` on (lo, hi)."""
    c, p, lo, hi = seg.coef, seg.exponent, seg.lo, seg.hi
    q = p - beta + 1.0

    def inner(a: float, b: float) -> float:
        if b <= a:
            return 0.0
        if q == 0.0:
            return math.log(b / a)
        return (b**q - a**q) / q

    def g_out(rho: float) -> float:
        if rho <= 0 or rho >= hi:
            return 0.0
        return beta * rho ** (beta - 1.0) * c * inner(max(rho, lo), hi)

    small = beta - 1.0 if lo > 0 else min(p, beta - 1.0)
    return callable_segment(
        g_out,
        lo=0.0,
        hi=hi,
        small_r_power=small,
        tail_mass_finite=True if seg.tail_mass_finite else seg.tail_mass_finite,
    )


def _smear_generic_segment(seg: DensitySegment, beta: float) -> DensitySegment:
    """Quadrature smear: one inner integral per evaluated radius."""
    lo, hi = seg.lo, seg.hi
    g = seg.fn

    def g_out(rho: float) -> float:
        if rho <= 0 or rho >= hi:
            return 0.0
        a = max(rho, lo)
        w = lambda s: s**-beta * g(s)
        if math.isinf(hi):
            val = quad_real(w, a, np.inf, rel_tol=1e-9)
        else:
            val = quad_real(w, a, hi, rel_tol=1e-9)
        return beta * rho ** (beta - 1.0) * val

    if lo > 0:
        small = beta - 1.0
    elif seg.small_r_power is not None:
        small = min(seg.small_r_power, beta - 1.0)
    else:
        small = None
    return callable_segment(
        g_out,
        lo=0.0,
        hi=hi,
        small_r_power=small,
        # the smear never increases mass outside a neighborhood of zero
        tail_mass_finite=True if seg.tail_mass_finite else seg.tail_mass_finite,
    )


def smear_spectral(M: SpectralMeasure, beta: float) -> SpectralMeasure:
    """Spectral measure of the mapped law: ``A -> integral over t in (0,1)
    of M(t^{-1/beta} A)``, acting radius by radius.

    An atom ``(r0, w)`` becomes the radial density
    ``w beta r^{beta-1} / r0^beta`` on (0, r0]; a density ``g`` becomes
    ``beta rho^{beta-1}`` times the integral of ``s^{-beta} g(s)`` over
    ``s > rho`` within the support.
    """
    b = check_beta(beta)
    rays = []
    for ray in M.rays:
        segs = []
        for at in ray.atoms:
            segs.append(power_segment(at.w * b / at.r**b, b - 1.0, 0.0, at.r))
        for seg in ray.densities:
            if seg.kind == "power":
                segs.append(_smear_power_segment(seg, b))
            else:
                segs.append(_smear_generic_segment(seg, b))
        rays.append(RadialComponent(ray.direction, atoms=(), densities=tuple(segs)))
    return SpectralMeasure(tuple(rays))


def smear_triplet(triplet: LevyTriplet, beta: float) -> LevyTriplet:
    """Closed-form triplet of the mapped law."""
    b = check_beta(beta)
    a_out = (b / (b + 1.0)) * (triplet.a + triplet.M.tail_power_vector(b))
    S_out = (b / (b + 2.0)) * triplet.S
    M_out = smear_spectral(triplet.M, b)
    return LevyTriplet(a_out, S_out, M_out)


# ---------------------------------------------------------------------------
# the mappings on exponents
# ---------------------------------------------------------------------------


def j_beta(mu: IdMeasure, beta: float) -> IdMeasure:
    """Generalized shrinking mapping at index ``beta``.

    Exponent route: adaptive quadrature of ``phi(t**(1/beta) y)`` over
    t in (0, 1), substituting ``u = t**(1/beta)`` when beta > 1 so the
    integrand stays smooth at the left endpoint (for beta <= 1 the
    unsubstituted kernel is already C^1 there, and the substituted
    weight u**(beta-1) would introduce the singularity instead).
    Triplet route (when available): closed-form transform.
    """
    b = check_beta(beta)
    src = mu.exponent

    if b > 1.0:

        def phi(y, b=b, src=src):
            return quad_complex(lambda u: b * u ** (b - 1.0) * src(u * y), 0.0, 1.0)

    else:
        inv = 1.0 / b

        def phi(y, inv=inv, src=src):
            return quad_complex(lambda t: src(t**inv * y), 0.0, 1.0)

    triplet = smear_triplet(mu.triplet, b) if mu.triplet is not None else None
    return IdMeasure(
        dim=mu.dim,
        exponent=phi,
        triplet=triplet,
        # finiteness of the log moment is preserved in both directions
        log_moment_known=mu.log_moment_known,
        label=f"jbeta[{b:g}]({mu.label})",
    )


def j_beta_inverse(mu: IdMeasure, beta: float, step: float = 1e-5) -> IdMeasure:
    """Inverse of :func:`j_beta` on exponents.

    Recovers ``phi_nu(y)`` as the derivative at s = 1 of
    ``s * phi_mu(s**(1/beta) y)``, by central differences with one
    Richardson extrapolation level.  No triplet is produced.
    """
    b = check_beta(beta)
    if not (0 < step < 0.5):
        raise ValidationError(f"finite-difference step out of range: {step}")
    src = mu.exponent
    inv = 1.0 / b

    def phi(y, src=src, inv=inv, h=step):
        def g(s: float) -> complex:
            return s * src(s**inv * y)

        d1 = (g(1.0 + h) - g(1.0 - h)) / (2.0 * h)
        d2 = (g(1.0 + 0.5 * h) - g(1.0 - 0.5 * h)) / h
        return (4.0 * d2 - d1) / 3.0

    return IdMeasure(
        dim=mu.dim,
        exponent=phi,
        label=f"jbeta-inv[{b:g}]({mu.label})",
    )


def _require_log_moment(mu: IdMeasure, assume_id_log: bool, what: str) -> None:
    if assume_id_log or mu.log_moment_known is True:
        return
    if mu.log_moment_known is False:
        raise DomainError(f"{what} requires a finite log moment; {mu.label} lacks one")
    if mu.triplet is None:
        raise DomainError(
            f"{what} requires a finite log moment; unknown for {mu.label} "
            "(pass assume_id_log=True to override)"
        )
    lm = log_moment(mu.triplet.M)
    if not lm.is_finite:
        raise DomainError(
            f"{what} requires a finite log moment; check on {mu.label} "
            f"returned {lm.status!r} (pass assume_id_log=True to override)"
        )


def _expansion_coeffs(src, y, delta: float) -> tuple[complex, complex, complex]:
    """Two-term fit phi(u y) ~ C1 u + C2 u^2 from values at delta, delta/2.

    Returns (C1*delta, C2*delta^2, phi(delta/2 * y)).
    """
    A = src(delta * y)
    B = src(0.5 * delta * y)
    return 4.0 * B - A, 2.0 * A - 4.0 * B, B


def i_map(
    mu: IdMeasure, assume_id_log: bool = False, delta: float = SMALL_U_SPLIT
) -> IdMeasure:
    """Selfdecomposability mapping: exponential kernel over (0, inf).

    Exponent: integral over u in (0, 1] of ``phi(u y)/u``, split at
    ``delta``; below the split the integrand is integrated through the
    two-term expansion of ``phi`` at the origin (exact remainder
    ``2 phi(delta/2 y)`` for the fitted model).

    Requires a finite log moment unless overridden.
    """
    _require_log_moment(mu, assume_id_log, "i_map")
    src = mu.exponent

    def phi(y, src=src, d=delta):
        c1d, c2d2, _ = _expansion_coeffs(src, y, d)
        remainder = c1d + 0.5 * c2d2
        main = quad_complex(lambda u: src(u * y) / u, d, 1.0)
        return main + remainder

    return IdMeasure(
        dim=mu.dim,
        exponent=phi,
        label=f"imap({mu.label})",
    )


def i_of_j_beta(
    mu: IdMeasure,
    beta: float,
    assume_id_log: bool = False,
    delta: float = SMALL_U_SPLIT,
) -> IdMeasure:
    """Composition of ``i_map`` after ``j_beta`` in a single quadrature.

    Exponent: integral over u in (0, 1) of
    ``phi(u y) (u**-1 - u**(beta-1))``, the inner-clock form; used to
    cross-validate the two-stage composition.
    """
    b = check_beta(beta)
    _require_log_moment(mu, assume_id_log, "i_of_j_beta")
    src = mu.exponent

    def phi(y, src=src, b=b, d=delta):
        c1d, c2d2, _ = _expansion_coeffs(src, y, d)
        remainder = (
            c1d
            + 0.5 * c2d2
            - c1d * d**b / (b + 1.0)
            - c2d2 * d**b / (b + 2.0)
        )
        main = quad_complex(
            lambda u: src(u * y) * (1.0 / u - u ** (b - 1.0)), d, 1.0
        )
        return main + remainder

    return IdMeasure(
        dim=mu.dim,
        exponent=phi,
        label=f"i-of-jbeta[{b:g}]({mu.label})",
    )


def corollary1a_kernel(mu: IdMeasure, beta: float) -> IdMeasure:
    """Law of the integral of ``(1 - sqrt(t))**(1/beta)`` against ``dY(t)``.

    Exponent: integral over t in (0, 1); after v = 1 - sqrt(t) this is
    ``2 (1 - v) phi(v**(1/beta) y)`` over v in (0, 1), substituted once
    more when beta > 1 (same endpoint-smoothness rule as the basic
    map).  Equals the twice-applied shrinking map at indices beta then
    2*beta, which is a tested identity.
    """
    b = check_beta(beta)
    src = mu.exponent

    if b > 1.0:

        def phi(y, b=b, src=src):
            return quad_complex(
                lambda u: 2.0 * b * u ** (b - 1.0) * (1.0 - u**b) * src(u * y),
                0.0,
                1.0,
            )

    else:
        inv = 1.0 / b

        def phi(y, inv=inv, src=src):
            return quad_complex(lambda v: 2.0 * (1.0 - v) * src(v**inv * y), 0.0, 1.0)

    return IdMeasure(
        dim=mu.dim,
        exponent=phi,
        log_moment_known=mu.log_moment_known,
        label=f"cor1a-kernel[{b:g}]({mu.label})",
    )
