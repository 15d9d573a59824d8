"""Time-dependent angular power spectrum of the spherical diffusion field.

The degree-l spectrum couples the spectral measure to the transfer kernel:

    C_l(t, t') = 2 pi^2 * integral of  J_{l+1/2}(mu)^2 / mu
                 * transfer(mu, t) * transfer(mu, t') over G(d mu),

with atoms summed exactly and power-law segments integrated by adaptive
Gauss-Kronrod panels split at the cut-off wave number, where the integrand's
time derivative changes character. Tail sums over degrees admit a closed form
through the Lommel identity

    sum_{l>=L} (2l+1) J_{l+1/2}(mu)^2
        = mu^2 (J_{L-1/2} J'_{L+1/2} - J_{L+1/2} J'_{L-1/2})(mu),

which this module exposes both as a brute-force accumulation and as the
closed form, plus a Gamma-function upper bound for bounded-support measures.

Direct tail accumulation stops once the degree has passed the upper end of
the measure's support and three consecutive increments fall below the
relative threshold (Bessel oscillation in l makes a single small increment
an unreliable stopping signal). A hard degree cap guards non-convergence.

All computations are pure; evaluations for distinct degrees are independent
and summation order is fixed, so results do not depend on scheduling.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._quad import integrate_vector
from .kernel import transfer
from .measure import DiffusionParams, SpectralMeasure
from .special import bessel_half_all, log_gamma

_TWO_PI_SQ = 2.0 * math.pi ** 2
DEFAULT_DEGREE_CAP = 4096
_CONSECUTIVE_BELOW = 3


@dataclass(frozen=True)
class AngularSpectrum:
    """C_l(t, t') for l = 0..len(values)-1 at a fixed pair of times."""

    params: DiffusionParams
    measure: SpectralMeasure
    t: float
    t_prime: float
    values: np.ndarray


@dataclass(frozen=True)
class TailSum:
    """Accumulated sum of (2l+1) C_l(t, t) from degree L upward."""

    value: float
    stopped_at: int
    converged: bool


@dataclass(frozen=True)
class FiniteVarianceReport:
    """Weighted spectrum sum sum_l (2l+1)^(1+2*alpha) C_l and its status."""

    alpha: float
    weighted_sum: float
    stopped_at: int
    converged: bool
    exp_moment: float
    exp_moment_finite: bool


def _atom_arrays(measure: SpectralMeasure):
    mus = np.array([mu for mu, _ in measure.atoms])
    masses = np.array([mass for _, mass in measure.atoms])
    return mus, masses


def _cl_block(l_lo: int, l_hi: int, t: float, t_prime: float,
              measure: SpectralMeasure, params: DiffusionParams,
              rtol: float = 1e-9) -> np.ndarray:
    """C_l values for l in [l_lo, l_hi)."""
    out = np.zeros(l_hi - l_lo)
    if measure.atoms:
        mus, masses = _atom_arrays(measure)
        jmat = bessel_half_all(l_hi - 1, mus)[l_lo:]
        weights = (
            transfer(mus, t, params) * transfer(mus, t_prime, params) * masses / mus
        )
        out += _TWO_PI_SQ * (jmat ** 2) @ weights
    for seg in measure.segments:
        def integrand(mu, seg=seg):
            jcol = bessel_half_all(l_hi - 1, float(mu))[l_lo:]
            dens = seg.amplitude * mu ** seg.exponent
            return (
                jcol ** 2 / mu
                * transfer(mu, t, params) * transfer(mu, t_prime, params) * dens
            )
        out += _TWO_PI_SQ * integrate_vector(
            integrand, seg.lo, seg.hi, rtol=rtol, breakpoints=(params.cutoff,)
        )
    return out


def angular_spectrum(l_count: int, t: float, t_prime: float,
                     measure: SpectralMeasure, params: DiffusionParams,
                     rtol: float = 1e-9) -> AngularSpectrum:
    """Spectrum C_l(t, t') for l = 0..l_count-1."""
    if l_count < 1:
        raise ValueError(f"need at least one degree, got {l_count}")
    if t < 0 or t_prime < 0:
        raise ValueError("times must be >= 0")
    values = _cl_block(0, l_count, t, t_prime, measure, params, rtol)
    return AngularSpectrum(params=params, measure=measure, t=t,
                           t_prime=t_prime, values=values)


def c_l(l: int, t: float, t_prime: float, measure: SpectralMeasure,
        params: DiffusionParams, rtol: float = 1e-9) -> float:
    """Single angular power spectrum coefficient C_l(t, t')."""
    if l < 0:
        raise ValueError(f"degree must be >= 0, got {l}")
    return float(_cl_block(l, l + 1, t, t_prime, measure, params, rtol)[0])


def tail_sum_direct(l_start: int, measure: SpectralMeasure,
                    params: DiffusionParams, t: float,
                    rel_tol: float = 1e-12,
                    degree_cap: int = DEFAULT_DEGREE_CAP,
                    block: int = 64) -> TailSum:
    """Brute-force sum of (2l+1) C_l(t, t) for l >= l_start.

    Issues a warning and returns converged=False when the degree cap is
    reached first.
    """
    if l_start < 0:
        raise ValueError(f"degree must be >= 0, got {l_start}")
    if measure.is_empty:
        return TailSum(value=0.0, stopped_at=l_start, converged=True)
    floor_l = int(math.ceil(measure.support_upper_bound()))
    total = 0.0
    below = 0
    l = l_start
    while l < degree_cap:
        hi = min(l + block, degree_cap)
        cls = _cl_block(l, hi, t, t, measure, params)
        for off in range(hi - l):
            deg = l + off
            inc = (2 * deg + 1) * cls[off]
            total += inc
            if deg >= floor_l and inc <= rel_tol * total:
                below += 1
                if below >= _CONSECUTIVE_BELOW:
                    return TailSum(value=total, stopped_at=deg, converged=True)
            else:
                below = 0
        l = hi
    warnings.warn(
        f"tail sum from degree {l_start} hit the cap {degree_cap} before "
        f"converging; returning the partial value",
        stacklevel=2,
    )
    return TailSum(value=total, stopped_at=degree_cap - 1, converged=False)


def _lommel_weight(l_start: int, mu):
    """mu^2-free factor J_{L-1/2} J'_{L+1/2} - J_{L+1/2} J'_{L-1/2} at mu."""
    mu_arr = np.atleast_1d(np.asarray(mu, dtype=float))
    jmat = bessel_half_all(l_start + 1, mu_arr)
    j_lm1 = jmat[l_start - 1]
    j_l = jmat[l_start]
    j_lp1 = jmat[l_start + 1]
    if l_start >= 2:
        j_lm2 = jmat[l_start - 2]
    else:
        j_lm2 = np.sqrt(2.0 / (math.pi * mu_arr)) * np.cos(mu_arr)
    dj_upper = 0.5 * (j_lm1 - j_lp1)
    dj_lower = 0.5 * (j_lm2 - j_l)
    return j_lm1 * dj_upper - j_l * dj_lower


def tail_sum_lommel(l_start: int, measure: SpectralMeasure,
                    params: DiffusionParams, rtol: float = 1e-9) -> float:
    """Closed form for sum_{l>=L} (2l+1) C_l at time zero, L >= 1.

    Evaluates 2 pi^2 * integral of mu * lommel_weight(L, mu) over G(d mu).
    """
    if l_start < 1:
        raise ValueError("closed-form tail needs degree >= 1; "
                         "use tail_sum_direct for L = 0")
    total = 0.0
    if measure.atoms:
        mus, masses = _atom_arrays(measure)
        total += float(np.sum(mus * _lommel_weight(l_start, mus) * masses))
    for seg in measure.segments:
        def integrand(mu, seg=seg):
            dens = seg.amplitude * mu ** seg.exponent
            return np.atleast_1d(mu * _lommel_weight(l_start, float(mu))[0] * dens)
        total += float(integrate_vector(
            integrand, seg.lo, seg.hi, rtol=rtol, breakpoints=(params.cutoff,)
        )[0])
    return _TWO_PI_SQ * total


def _power_integral(amplitude: float, exponent: float, lo: float, hi: float) -> float:
    if hi <= lo:
        return 0.0
    if exponent == -1.0:
        return amplitude * math.log(hi / lo)
    return amplitude * (hi ** (exponent + 1) - lo ** (exponent + 1)) / (exponent + 1)


def tail_bound_gamma(l_start: int, measure: SpectralMeasure,
                     params: DiffusionParams) -> float:
    """Certified upper bound on the time-zero tail for bounded-support measures.

    Evaluates (2 pi^2 / (2^(2L-3) Gamma(L-1/2)^2)) * integral of
    max(mu^(2L-2), mu^(2L+4)) over G(d mu) for L >= 2. The absolute constant
    in front is the spectrum prefactor 2 pi^2; with it the expression
    dominates the Poisson-integral product bounds term by term, hence
    dominates tail_sum_direct(L, ..., t=0).
    """
    if l_start < 2:
        raise ValueError(f"the Gamma-function bound needs degree >= 2, got {l_start}")
    if measure.is_empty:
        return 0.0
    if not math.isfinite(measure.support_upper_bound()):
        raise ValueError("the Gamma-function bound requires bounded support")
    log_pref = (
        math.log(_TWO_PI_SQ)
        - (2 * l_start - 3) * math.log(2.0)
        - 2.0 * log_gamma(l_start - 0.5)
    )
    low_exp = 2 * l_start - 2
    high_exp = 2 * l_start + 4
    total = 0.0
    for mu, mass in measure.atoms:
        exponent = log_pref + max(low_exp * math.log(mu), high_exp * math.log(mu))
        total += math.exp(exponent) * mass
    pref = math.exp(log_pref)
    for seg in measure.segments:
        total += pref * _power_integral(
            seg.amplitude, seg.exponent + low_exp, seg.lo, min(seg.hi, 1.0)
        )
        total += pref * _power_integral(
            seg.amplitude, seg.exponent + high_exp, max(seg.lo, 1.0), seg.hi
        )
    return total


def finite_variance_check(measure: SpectralMeasure, params: DiffusionParams,
                          alpha: float,
                          degree_cap: int = DEFAULT_DEGREE_CAP) -> FiniteVarianceReport:
    """Weighted sum sum_l (2l+1)^(1+2*alpha) C_l(0,0) plus the exp-moment test.

    The exponential moment integral of exp(mu^2/4) over G is structurally
    finite for the supported measure family (finitely many atoms, bounded
    segments); its reported value may still overflow to inf for far-out
    support.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    power = 1.0 + 2.0 * alpha

    exp_moment = 0.0
    with np.errstate(over="ignore"):
        if measure.atoms:
            mus, masses = _atom_arrays(measure)
            exp_moment += float(np.sum(np.exp(mus ** 2 / 4.0) * masses))
        for seg in measure.segments:
            def integrand(mu, seg=seg):
                return np.atleast_1d(
                    math.exp(mu * mu / 4.0) * seg.amplitude * mu ** seg.exponent
                )
            exp_moment += float(integrate_vector(
                integrand, seg.lo, seg.hi, rtol=1e-9
            )[0])

    if measure.is_empty:
        return FiniteVarianceReport(alpha=alpha, weighted_sum=0.0, stopped_at=0,
                                    converged=True, exp_moment=0.0,
                                    exp_moment_finite=True)

    floor_l = int(math.ceil(measure.support_upper_bound()))
    total = 0.0
    below = 0
    l = 0
    block = 64
    while l < degree_cap:
        hi = min(l + block, degree_cap)
        cls = _cl_block(l, hi, 0.0, 0.0, measure, params)
        for off in range(hi - l):
            deg = l + off
            inc = (2 * deg + 1) ** power * cls[off]
            total += inc
            if deg >= floor_l and inc <= 1e-12 * total:
                below += 1
                if below >= _CONSECUTIVE_BELOW:
                    return FiniteVarianceReport(
                        alpha=alpha, weighted_sum=total, stopped_at=deg,
                        converged=True, exp_moment=exp_moment,
                        exp_moment_finite=True,
                    )
            else:
                below = 0
        l = hi
    return FiniteVarianceReport(alpha=alpha, weighted_sum=total,
                                stopped_at=degree_cap - 1, converged=False,
                                exp_moment=exp_moment, exp_moment_finite=True)
