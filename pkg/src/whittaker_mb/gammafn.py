"""Complex log-gamma via Stirling's series with upward recursion.

The principal branch of log Gamma is computed from the Bernoulli-number
asymptotic series (DLMF 5.11.1) after shifting the argument to
Re z >= 10 with the recursion log Gamma(z) = log Gamma(z+1) - log z.
For arguments off the real axis the recursion never crosses a branch
cut, so the result is the standard analytic continuation.  Both a
scalar entry point (with pole detection) and a vectorized numpy path
are provided; the vectorized path is what the contour quadratures use.
"""

from __future__ import annotations

import math

import numpy as np


class PoleHit(ArithmeticError):
    pass


_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_{2k} / (2k (2k-1)) for k = 1..7
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)

_SHIFT_RE = 10.0


def _stirling(z):
    """Asymptotic series; valid for Re z >= ~10."""
    out = (z - 0.5) * np.log(z) - z + _HALF_LOG_2PI
    zi = 1.0 / z
    z2 = zi * zi
    term = zi
    for c in _STIRLING:
        out = out + c * term
        term = term * z2
    return out


def log_gamma_array(z):
    """Principal-branch log Gamma on a complex numpy array."""
    z = np.asarray(z, dtype=complex)
    work = z.copy()
    acc = np.zeros_like(work)
    while True:
        mask = work.real < _SHIFT_RE
        if not mask.any():
            break
        acc[mask] -= np.log(work[mask])
        work[mask] += 1.0
    return _stirling(work) + acc


def log_gamma_complex(z) -> complex:
    """Principal-branch log Gamma of a single complex argument.

    Raises PoleHit at the poles (nonpositive integers).
    """
    zc = complex(z)
    if zc.imag == 0.0 and zc.real <= 0.0 and zc.real == int(zc.real):
        raise PoleHit(f"log Gamma pole at {zc}")
    return complex(log_gamma_array(np.array([zc]))[0])


def gamma_complex(z) -> complex:
    return complex(np.exp(log_gamma_complex(z)))


def abs_gamma_envelope(x: float, y: float) -> float:
    """Large-|y| envelope sqrt(2 pi) |y|^(x-1/2) exp(-pi |y| / 2).

    Governs per-axis truncation of Mellin-Barnes contours.
    """
    ay = abs(y)
    if ay == 0.0:
        raise ValueError("envelope needs y != 0")
    return math.sqrt(2.0 * math.pi) * ay ** (x - 0.5) * math.exp(-0.5 * math.pi * ay)
