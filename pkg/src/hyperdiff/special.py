"""Special functions: half-integer Bessel, Legendre, spherical harmonics, log-gamma.

Half-integer Bessel functions J_{l+1/2} are computed through the spherical
Bessel functions j_l = sqrt(pi/(2x)) J_{l+1/2}. The three-term recurrence
j_{n+1} = ((2n+1)/x) j_n - j_{n-1} is stable upward only while n < x; for
n >= x the minimal solution j_n is swamped by the dominant one, so there a
Miller-type downward recurrence is used: recurse down from a starting order
well above max(l, x), rescale on overflow, and normalise against j_0 or j_1
(whichever is larger in magnitude, so zeros of sin(x)/x cannot poison the
anchor). Tiny arguments use the power series directly.

All functions are pure; safe for concurrent use.
"""

from __future__ import annotations

import math

import numpy as np

_MAX_ORDER = 10_000
_MAX_ARG = 1.0e5
_SERIES_X = 1.0e-3
_RESCALE_LIMIT = 1.0e250
_RESCALE_FACTOR = 1.0e-250


def _check_order_arg(l_max: int, x_max: float) -> None:
    if l_max < 0:
        raise ValueError(f"order must be >= 0, got {l_max}")
    if l_max > _MAX_ORDER:
        raise ValueError(f"order {l_max} exceeds supported range ({_MAX_ORDER})")
    if x_max > _MAX_ARG:
        raise ValueError(f"argument {x_max} exceeds supported range ({_MAX_ARG})")


def _sph_jn_series(n_max: int, x: np.ndarray) -> np.ndarray:
    """j_n(x) for 0 <= n <= n_max via the leading power-series terms (x << 1)."""
    out = np.zeros((n_max + 1, x.size))
    out[0, x == 0.0] = 1.0
    pos = x > 0.0
    if not np.any(pos):
        return out
    xp = x[pos]
    n = np.arange(n_max + 1, dtype=float)[:, None]
    # x^n / (2n+1)!! in log space; (2n+1)!! = 2^(n+1) Gamma(n+3/2) / sqrt(pi)
    log_x = np.log(xp)[None, :]
    log_dfact = (n + 1.0) * math.log(2.0) + _lgamma_arr(n + 1.5) - 0.5 * math.log(math.pi)
    pref = np.exp(n * log_x - log_dfact)
    y = 0.5 * xp * xp
    correction = 1.0 - y / (2 * n + 3) * (1.0 - y / (2.0 * (2 * n + 5)))
    out[:, pos] = pref * correction
    return out


def _sph_j_low(n: int, x: np.ndarray) -> np.ndarray:
    """Closed forms for j_0, j_1, j_2; stable at zeros of higher anchors."""
    sin_x, cos_x = np.sin(x), np.cos(x)
    if n == 0:
        return sin_x / x
    if n == 1:
        return sin_x / (x * x) - cos_x / x
    return (3.0 / (x * x * x) - 1.0 / x) * sin_x - 3.0 / (x * x) * cos_x


def _lgamma_arr(a: np.ndarray) -> np.ndarray:
    return np.vectorize(math.lgamma, otypes=[float])(a)


def _sph_jn_upward(n_max: int, x: np.ndarray) -> np.ndarray:
    out = np.empty((n_max + 1, x.size))
    j_prev = np.sin(x) / x
    out[0] = j_prev
    if n_max == 0:
        return out
    j_cur = j_prev / x - np.cos(x) / x
    out[1] = j_cur
    for n in range(1, n_max):
        j_prev, j_cur = j_cur, (2 * n + 1) / x * j_cur - j_prev
        out[n + 1] = j_cur
    return out


def _downward_margin(x_max: float) -> int:
    # Suppression of the dominant-solution contamination across the turning
    # point scales like exp(-(2*sqrt(2)/3) * margin^(3/2) / sqrt(x)).
    return 24 + int(math.ceil(12.0 * x_max ** (1.0 / 3.0)))


def _sph_jn_downward(n_max: int, x: np.ndarray) -> np.ndarray:
    m_start = n_max + _downward_margin(float(np.max(x)))
    out = np.empty((n_max + 1, x.size))
    v_up = np.zeros(x.size)
    v = np.full(x.size, 1.0e-30)
    for n in range(m_start, -1, -1):
        if n <= n_max:
            out[n] = v
        v_up, v = v, (2 * n + 1) / x * v - v_up
        big = np.abs(v) > _RESCALE_LIMIT
        if np.any(big):
            v[big] *= _RESCALE_FACTOR
            v_up[big] *= _RESCALE_FACTOR
            out[min(n, n_max):, big] *= _RESCALE_FACTOR
    # v_up now holds the carrier at n = 0 (same scale as the stored rows).
    j0 = _sph_j_low(0, x)
    j1 = _sph_j_low(1, x)
    anchor0 = np.abs(j0) >= np.abs(j1)
    if n_max == 0:
        anchor0 = np.full(x.shape, True)
    denom0 = np.where(v_up != 0.0, v_up, 1.0)
    denom1 = np.where(out[min(1, n_max)] != 0.0, out[min(1, n_max)], 1.0)
    scale = np.where(anchor0, j0, j1) / np.where(anchor0, denom0, denom1)
    out *= scale
    # Near zeros of the anchors (x >= 1) the lowest orders lose relative
    # accuracy; closed forms restore it. Below x = 1 the anchors are
    # well-conditioned and the closed form for j_2 would itself cancel.
    big = x >= 1.0
    if np.any(big):
        for n in range(min(2, n_max) + 1):
            out[n, big] = _sph_j_low(n, x[big])
    return out


def _sph_jn_scalar(n_max: int, x: float) -> np.ndarray:
    """Pure-float recurrences for a single argument (hot path in quadrature)."""
    if x <= _SERIES_X:
        return _sph_jn_series(n_max, np.array([x]))[:, 0]
    out = np.empty(n_max + 1)
    if x >= n_max + 2:
        j_prev = math.sin(x) / x
        out[0] = j_prev
        if n_max == 0:
            return out
        j_cur = j_prev / x - math.cos(x) / x
        out[1] = j_cur
        for n in range(1, n_max):
            j_prev, j_cur = j_cur, (2 * n + 1) / x * j_cur - j_prev
            out[n + 1] = j_cur
        return out
    m_start = n_max + _downward_margin(x)
    v_up, v = 0.0, 1.0e-30
    rescales_after = np.zeros(n_max + 1)
    n_rescales = 0
    for n in range(m_start, -1, -1):
        if n <= n_max:
            out[n] = v
            rescales_after[n] = n_rescales
        v_up, v = v, (2 * n + 1) / x * v - v_up
        if abs(v) > _RESCALE_LIMIT:
            v *= _RESCALE_FACTOR
            v_up *= _RESCALE_FACTOR
            n_rescales += 1
    if n_rescales:
        # bring every stored row onto the final carrier scale
        out *= _RESCALE_FACTOR ** (n_rescales - rescales_after)
    j0 = math.sin(x) / x
    j1 = j0 / x - math.cos(x) / x
    if n_max == 0 or abs(j0) >= abs(j1):
        scale = j0 / (v_up if v_up != 0.0 else 1.0)
    else:
        scale = j1 / (out[1] if out[1] != 0.0 else 1.0)
    out *= scale
    if x >= 1.0:
        for n in range(min(2, n_max) + 1):
            out[n] = float(_sph_j_low(n, np.array([x]))[0])
    return out


def spherical_jn_all(n_max: int, x) -> np.ndarray:
    """j_n(x) for n = 0..n_max; x scalar or 1D array, returns (n_max+1, ...) values."""
    scalar = np.isscalar(x) or np.asarray(x).ndim == 0
    if scalar:
        xf = float(x)
        if xf < 0:
            raise ValueError("argument must be >= 0")
        _check_order_arg(n_max, xf)
        if xf == 0.0:
            out = np.zeros(n_max + 1)
            out[0] = 1.0
            return out
        return _sph_jn_scalar(n_max, xf)
    x_arr = np.asarray(x, dtype=float)
    if x_arr.ndim != 1:
        raise ValueError("x must be scalar or one-dimensional")
    if np.any(x_arr < 0):
        raise ValueError("argument must be >= 0")
    _check_order_arg(n_max, float(np.max(x_arr)) if x_arr.size else 0.0)

    out = np.zeros((n_max + 1, x_arr.size))
    small = x_arr <= _SERIES_X
    up = (~small) & (x_arr >= n_max + 2)
    down = (~small) & (~up)
    if np.any(small):
        out[:, small] = _sph_jn_series(n_max, x_arr[small])
    if np.any(up):
        out[:, up] = _sph_jn_upward(n_max, x_arr[up])
    if np.any(down):
        out[:, down] = _sph_jn_downward(n_max, x_arr[down])
    return out


def bessel_half_all(l_max: int, x) -> np.ndarray:
    """J_{l+1/2}(x) for l = 0..l_max; x scalar or 1D array."""
    j = spherical_jn_all(l_max, x)
    factor = np.sqrt(2.0 * np.asarray(x, dtype=float) / math.pi)
    return j * factor


def bessel_half(l: int, x: float) -> float:
    """J_{l+1/2}(x) for a single order; exact 0 at x = 0 for every l >= 0."""
    if l < 0:
        raise ValueError(f"order must be >= 0, got {l}")
    if x == 0.0:
        _check_order_arg(l, 0.0)
        return 0.0
    return float(bessel_half_all(l, float(x))[l])


def _bessel_half_neg(x: float) -> float:
    """J_{-1/2}(x) = sqrt(2/(pi x)) cos(x)."""
    return math.sqrt(2.0 / (math.pi * x)) * math.cos(x)


def bessel_half_derivative(l: int, x: float) -> float:
    """d/dx J_{l+1/2}(x) = (J_{l-1/2}(x) - J_{l+3/2}(x)) / 2 for x > 0."""
    if l < 0:
        raise ValueError(f"order must be >= 0, got {l}")
    if not x > 0.0:
        raise ValueError(f"argument must be positive, got {x}")
    upper = bessel_half_all(l + 1, float(x))
    lower = _bessel_half_neg(x) if l == 0 else float(upper[l - 1])
    return 0.5 * (lower - float(upper[l + 1]))


def legendre_all(l_max: int, x) -> np.ndarray:
    """P_l(x) for l = 0..l_max by the three-term recurrence; |x| <= 1."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(np.abs(x_arr) > 1.0):
        raise ValueError("Legendre argument must lie in [-1, 1]")
    if l_max < 0:
        raise ValueError(f"degree must be >= 0, got {l_max}")
    out = np.empty((l_max + 1,) + x_arr.shape)
    out[0] = 1.0
    if l_max >= 1:
        out[1] = x_arr
    for l in range(1, l_max):
        out[l + 1] = ((2 * l + 1) * x_arr * out[l] - l * out[l - 1]) / (l + 1)
    return out


def legendre_p(l: int, x: float) -> float:
    """The degree-l Legendre polynomial at x in [-1, 1]."""
    return float(legendre_all(l, float(x))[l])


def norm_plm_blocks(l_count: int, cos_theta: np.ndarray):
    """Yield (m, block) of orthonormalised associated Legendre values.

    block[j, k] = Pbar_{m+j, m}(cos_theta[k]) for m+j < l_count, where
    Y_lm(theta, phi) = Pbar_lm(cos theta) * exp(i m phi) (Condon-Shortley
    phase included). The per-step renormalised recurrence keeps every value
    within float range up to high degree.
    """
    x = np.asarray(cos_theta, dtype=float)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    p_mm = np.full(x.shape, 1.0 / math.sqrt(4.0 * math.pi))
    for m in range(l_count):
        block = np.empty((l_count - m,) + x.shape)
        block[0] = p_mm
        if m + 1 < l_count:
            block[1] = math.sqrt(2 * m + 3.0) * x * p_mm
        for l in range(m + 2, l_count):
            a = math.sqrt((2 * l - 1.0) * (2 * l + 1.0) / ((l - m) * (l + m)))
            b = math.sqrt(
                (2 * l + 1.0) * (l - 1.0 - m) * (l - 1.0 + m)
                / ((2 * l - 3.0) * (l - m) * (l + m))
            )
            block[l - m] = a * x * block[l - m - 1] - b * block[l - m - 2]
        yield m, block
        p_mm = -math.sqrt((2 * m + 3.0) / (2 * m + 2.0)) * s * p_mm


def sph_harm(l: int, m: int, theta: float, phi: float) -> complex:
    """Complex spherical harmonic Y_lm(theta, phi), orthonormal on the sphere.

    Satisfies conj(Y_lm) = (-1)^m Y_{l,-m}.
    """
    if l < 0 or abs(m) > l:
        raise ValueError(f"invalid harmonic index (l={l}, m={m})")
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    if not 0.0 <= phi < 2.0 * math.pi:
        raise ValueError(f"phi must lie in [0, 2*pi), got {phi}")
    m_abs = abs(m)
    x = np.array([math.cos(theta)])
    pbar = None
    for m_cur, block in norm_plm_blocks(l + 1, x):
        if m_cur == m_abs:
            pbar = float(block[l - m_abs, 0])
            break
    value = pbar * complex(math.cos(m_abs * phi), math.sin(m_abs * phi))
    if m < 0:
        value = (-1) ** m_abs * value.conjugate()
    return value


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for x > 0."""
    if not x > 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)
