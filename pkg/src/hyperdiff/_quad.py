"""Adaptive quadrature over finite intervals with certified error reporting.

Thin wrapper around scipy's Gauss-Kronrod panel integrator (quad_vec) for
vector-valued integrands; error control targets the dominant component
(norm='max'). Failure to reach the tolerance raises AccuracyError carrying
the achieved estimate instead of silently returning it.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad_vec

from .exceptions import AccuracyError


def integrate_vector(f, lo: float, hi: float, *, rtol: float = 1e-9,
                     atol: float = 1e-15, breakpoints=(), limit: int = 2000):
    """Integrate a scalar-to-vector integrand over [lo, hi].

    breakpoints inside the interval (e.g. where a derivative jumps) seed the
    initial panel subdivision.
    """
    pts = sorted(p for p in breakpoints if lo < p < hi)
    res, err, info = quad_vec(
        f, lo, hi,
        epsabs=atol, epsrel=rtol, norm="max",
        points=pts or None, limit=limit, full_output=True,
    )
    scale = np.max(np.abs(np.atleast_1d(res)))
    if not info.success or err > max(atol, rtol * scale) * 10.0:
        raise AccuracyError(
            f"quadrature over [{lo}, {hi}] did not converge "
            f"(error estimate {err:.3e})",
            estimate=res, error=err,
        )
    return res
