"""Scaled generalized Laguerre/Hermite function families.

Conventions (pinned by the orthogonality tests):

* GLF: ``glf(n, alpha; y) = exp(-y/2) * L_n^(alpha)(y)`` with
  ``int_0^inf glf_m glf_n y^alpha dy = gamma_n(alpha) delta_mn`` and
  ``gamma_n(alpha) = Gamma(n+alpha+1)/n!``.
* GHF: normalized so that ``int_R ghf_m ghf_n |y|^(2 mu) dy = delta_mn``.

A scale factor ``beta`` always enters through the argument: the working
family is ``basis_n(beta * x)``.  Under the scaled weight the norms pick
up ``beta^-(alpha+1)`` (GLF) resp. ``beta^-(2 mu + 1)`` (GHF).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln

from . import _kernels


class Family(Enum):
    GLF = "glf"
    GHF = "ghf"


@dataclass(frozen=True)
class BasisSpec:
    """Which family, its parameter, the scale factor, and truncation size.

    ``size = N`` means the expansion holds degrees ``0..N``.
    """

    family: Family
    param: float
    scale: float
    size: int

    def __post_init__(self):
        if self.family is Family.GLF and not self.param > -1.0:
            raise ValueError(f"GLF parameter must exceed -1, got {self.param}")
        if self.family is Family.GHF and not self.param > -0.5:
            raise ValueError(f"GHF parameter must exceed -1/2, got {self.param}")
        if not self.scale > 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if self.size < 0:
            raise ValueError(f"size must be >= 0, got {self.size}")

    def norms_squared(self) -> np.ndarray:
        """Weighted L2 norms squared of basis_n(scale*x) for n = 0..size."""
        if self.family is Family.GLF:
            g = np.array([glf_norm(self.param, n) for n in range(self.size + 1)])
            return g * self.scale ** -(self.param + 1.0)
        return np.full(self.size + 1, self.scale ** -(2.0 * self.param + 1.0))


def glf_norm(alpha: float, n: int) -> float:
    """gamma_n(alpha) = Gamma(n+alpha+1)/n!, via log-Gamma (safe to n ~ 1e4)."""
    if not alpha > -1.0:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    if n < 0:
        raise ValueError("n must be >= 0")
    return float(np.exp(gammaln(n + alpha + 1.0) - gammaln(n + 1.0)))


def _check_glf_args(alpha, beta):
    if not alpha > -1.0:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")


def _check_ghf_args(mu, beta):
    if not mu > -0.5:
        raise ValueError(f"mu must exceed -1/2, got {mu}")
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")


def glf_eval(alpha: float, beta: float, n_max: int, x) -> np.ndarray:
    """Scaled Laguerre functions glf_n(beta*x) for n = 0..n_max.

    ``x`` may be a scalar or an array; the result has shape
    ``(n_max+1,) + shape(x)``.  All values are finite: the envelope is
    carried inside the recurrence.
    """
    _check_glf_args(alpha, beta)
    x_arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(x_arr < 0):
        raise ValueError("x must be >= 0 on the half line")
    y = beta * x_arr.ravel()
    table = _kernels.glf_table(y, float(alpha), int(n_max))
    out = table.reshape((n_max + 1,) + x_arr.shape)
    return out if np.ndim(x) else out[:, 0]


def ghf_recurrence_coeffs(mu: float, n_top: int):
    """Arrays (a, c) of the normalized Hermite recurrence, valid at 1..n_top.

    theta_n = 0 for even n, 2*mu for odd n (and theta_n/(2 mu) -> 0 resp. 1,
    also in the mu -> 0 limit).
    """
    n = np.arange(n_top + 1, dtype=np.float64)
    odd = (np.arange(n_top + 1) % 2).astype(np.float64)
    theta = 2.0 * mu * odd
    a = np.sqrt(2.0 / (n + 1.0 + 2.0 * mu - theta))
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (n + theta) / np.sqrt((n + odd) * (n + 2.0 * mu + 1.0 - odd))
    c[0] = 0.0
    return a, c


def _ghf_seeds(mu: float):
    s0 = float(np.exp(-0.5 * gammaln(mu + 0.5)))
    s1 = float(np.exp(-0.5 * gammaln(mu + 1.5)))
    return s0, s1


def ghf_eval(mu: float, beta: float, n_max: int, x) -> np.ndarray:
    """Normalized Hermite-type functions ghf_n(beta*x) for n = 0..n_max."""
    _check_ghf_args(mu, beta)
    x_arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    y = beta * x_arr.ravel()
    a, c = ghf_recurrence_coeffs(mu, max(n_max, 1))
    s0, s1 = _ghf_seeds(mu)
    table = _kernels.ghf_table(y, a, c, s0, s1, int(n_max))
    out = table.reshape((n_max + 1,) + x_arr.shape)
    return out if np.ndim(x) else out[:, 0]


def ghf_at_zero_even(mu: float, n: int) -> float:
    """Value of the even function ghf_{2n} at the origin.

    Closed form: (-1)^n / Gamma(mu+1/2) * sqrt(Gamma(n+mu+1/2) / n!).
    """
    if not mu > -0.5:
        raise ValueError(f"mu must exceed -1/2, got {mu}")
    if n < 0:
        raise ValueError("n must be >= 0")
    sign = -1.0 if n % 2 else 1.0
    log_mag = 0.5 * (gammaln(n + mu + 0.5) - gammaln(n + 1.0)) - gammaln(mu + 0.5)
    return float(sign * np.exp(log_mag))


def ghp_via_glp(mu: float, n: int, x: float) -> float:
    """Hermite-type polynomial H_n^(mu)(x) computed through Laguerre
    polynomials of x^2 (cross-validation path).

    Even n: (-1)^(n/2) 2^n (n/2)! L_{n/2}^(mu-1/2)(x^2);
    odd n:  (-1)^((n-1)/2) 2^n ((n-1)/2)! x L_{(n-1)/2}^(mu+1/2)(x^2).
    """
    if not mu > -0.5:
        raise ValueError(f"mu must exceed -1/2, got {mu}")
    if n < 0:
        raise ValueError("n must be >= 0")
    y = float(x) * float(x)
    if n % 2 == 0:
        m, alpha, pre = n // 2, mu - 0.5, 1.0
    else:
        m, alpha, pre = (n - 1) // 2, mu + 0.5, float(x)
    lag = _laguerre_poly(alpha, m, y)
    scale = (-1.0) ** m * 2.0**n * float(np.exp(gammaln(m + 1.0)))
    return float(pre * scale * lag)


def ghp_direct(mu: float, n: int, x: float) -> float:
    """Hermite-type polynomial by its own three-term recurrence
    (H_0 = 1, H_1 = 2x, H_{k+1} = 2x H_k - 2(k+theta_k) H_{k-1})."""
    if n == 0:
        return 1.0
    p_prev, p = 1.0, 2.0 * x
    for k in range(1, n):
        theta = 2.0 * mu if k % 2 else 0.0
        p_prev, p = p, 2.0 * x * p - 2.0 * (k + theta) * p_prev
    return float(p)


def _laguerre_poly(alpha: float, m: int, y: float) -> float:
    if m == 0:
        return 1.0
    p_prev, p = 1.0, 1.0 + alpha - y
    for k in range(1, m):
        p_prev, p = p, ((2 * k + 1 + alpha - y) * p - (k + alpha) * p_prev) / (k + 1)
    return p


def diff_coeffs(mu: float, beta: float, c) -> np.ndarray:
    """Map coefficients of ``u = sum c_n ghf_n(beta x)`` to coefficients of
    the derivative du/dx (one degree longer).

    Even output degrees pick up a tail sum over all odd input degrees; the
    shared prefactor is factored out and the suffix sums are accumulated in
    a single descending pass (small terms first), so the whole map is O(N).
    For mu = 0 the tail vanishes and the map reduces to the classical
    Hermite-function ladder.
    """
    _check_ghf_args(mu, beta)
    c = np.asarray(c, dtype=np.float64)
    if c.ndim != 1 or c.size == 0:
        raise ValueError("coefficient vector must be 1-D and non-empty")
    if not np.all(np.isfinite(c)):
        raise ValueError("coefficients must be finite")
    N = c.size - 1
    d = np.zeros(N + 2)

    m = np.arange(N + 2, dtype=np.float64)
    cc = np.concatenate([c, [0.0, 0.0]])  # c_{m-1}, c_{m+1} lookups past the end
    odd_mask = (np.arange(N + 2) % 2) == 1
    # neighbour (ladder) part
    for i in range(N + 2):
        lo = cc[i - 1] if i >= 1 else 0.0
        hi = cc[i + 1]
        if odd_mask[i]:
            d[i] = -np.sqrt((m[i] + 2 * mu) / 2.0) * lo + np.sqrt((m[i] + 1) / 2.0) * hi
        else:
            d[i] = -np.sqrt(m[i] / 2.0) * lo + np.sqrt((m[i] + 1 + 2 * mu) / 2.0) * hi

    if mu != 0.0 and N >= 1:
        # tail term on even output degrees:
        #   2 mu (-1)^(m/2) sqrt(Gamma(m/2+mu+1/2)/(m/2)!)
        #     * sum_{k >= m/2} (-1)^(k-1) sqrt(k!/Gamma(k+mu+3/2)) c_{2k+1}
        k_top = (N - 1) // 2
        k = np.arange(k_top + 1, dtype=np.float64)
        inner = (
            (-1.0) ** (k + 1)
            * np.exp(0.5 * (gammaln(k + 1.0) - gammaln(k + mu + 1.5)))
            * c[1 : 2 * k_top + 2 : 2]
        )
        suffix = np.cumsum(inner[::-1])[::-1]  # suffix[j] = sum_{k >= j} inner[k]
        half = np.arange(k_top + 1, dtype=np.float64)
        pref = (
            2.0
            * mu
            * (-1.0) ** half
            * np.exp(0.5 * (gammaln(half + mu + 0.5) - gammaln(half + 1.0)))
        )
        d[0 : 2 * k_top + 1 : 2] += pref * suffix

    return beta * d
