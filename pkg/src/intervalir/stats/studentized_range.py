"""Distribution of the studentized range, by direct numerical integration.

For ``k`` normal means and an independent variance estimate on ``df``
degrees of freedom,

    P(Q <= q) = int_0^inf f_df(s) * k int phi(z) [Phi(z) - Phi(z - q s)]^(k-1) dz ds

where ``f_df`` is the density of ``chi_df / sqrt(df)``. Both integrals use
fixed Gauss-Legendre rules, so the CDF is vectorised over ``q``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import optimize, special, stats

from ..exceptions import ContractError, NumericalError

_Z_NODES, _Z_WEIGHTS = np.polynomial.legendre.leggauss(200)
_Z_LO, _Z_HI = -9.0, 9.0
_S_NODES, _S_WEIGHTS = np.polynomial.legendre.leggauss(160)


def _range_cdf_known_sigma(w: np.ndarray, k: int) -> np.ndarray:
    """P(range of k standard normals <= w), for each entry of ``w``."""
    half = (_Z_HI - _Z_LO) / 2
    z = _Z_LO + half * (_Z_NODES + 1)
    wz = half * _Z_WEIGHTS
    w = np.asarray(w, dtype=float)[..., None]
    inner = np.clip(special.ndtr(z) - special.ndtr(z - w), 0.0, 1.0) ** (k - 1)
    out = k * np.sum(wz * np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi) * inner, axis=-1)
    return np.clip(out, 0.0, 1.0)


@lru_cache(maxsize=256)
def _s_grid(df: float):
    """Nodes and weights for the outer integral, laid out in log(s)."""
    lo = math.log(math.sqrt(stats.chi2.ppf(1e-16, df) / df))
    hi = math.log(math.sqrt(stats.chi2.isf(1e-16, df) / df))
    half = (hi - lo) / 2
    u = lo + half * (_S_NODES + 1)
    s = np.exp(u)
    log_pdf = (0.5 * df * math.log(df) - special.gammaln(0.5 * df) - (0.5 * df - 1) * math.log(2)
               + df * u - 0.5 * df * s * s)  # includes the ds = s du Jacobian
    return s, half * _S_WEIGHTS * np.exp(log_pdf)


def studentized_range_cdf(q, k: int, df: float = math.inf) -> np.ndarray:
    """CDF of the studentized range with ``k`` groups and ``df`` error degrees of freedom."""
    if k < 2:
        raise ContractError(f"k must be >= 2, got {k}")
    if df <= 0:
        raise ContractError(f"df must be positive, got {df}")
    q = np.asarray(q, dtype=float)
    scalar = q.ndim == 0
    q = np.atleast_1d(np.maximum(q, 0.0))
    if math.isinf(df) or df > 1e5:
        out = _range_cdf_known_sigma(q, k)
    else:
        s, ws = _s_grid(float(df))
        out = np.clip(_range_cdf_known_sigma(q[:, None] * s[None, :], k) @ ws, 0.0, 1.0)
    return out[0] if scalar else out


def studentized_range_sf(q, k: int, df: float = math.inf):
    return 1.0 - studentized_range_cdf(q, k, df)


@lru_cache(maxsize=1024)
def studentized_range_quantile(alpha: float, k: int, df: float = math.inf) -> float:
    """Upper-``alpha`` critical value of the studentized range."""
    if not 0 < alpha < 1:
        raise ContractError(f"alpha must be in (0, 1), got {alpha}")
    if k < 2:
        raise ContractError(f"k must be >= 2, got {k}")
    if df < 1:
        raise ContractError(f"df must be >= 1, got {df}")
    target = 1.0 - alpha

    def f(q):
        return float(studentized_range_cdf(q, k, df)) - target

    hi = 10.0
    while f(hi) < 0:
        hi *= 2
        if hi > 1e4:
            raise NumericalError(f"studentized range quantile did not bracket (alpha={alpha}, k={k}, df={df})")
    try:
        return optimize.brentq(f, 1e-9, hi, xtol=1e-10)
    except (ValueError, RuntimeError) as err:
        raise NumericalError(str(err)) from err
