"""Spatial/frequency truncation errors, bandwidths, optimal-scaling search.

The two error functionals, for a weight exponent mu (whole-line picture):

* spatial:   E_s(M) = || u * 1_{|x|>M} ||_{|x|^(2 mu)}
* frequency: E_f(B) = B^(-mu+1/2)
                      * || F[u](B xi) ||_{H^floor(mu) (R \\ [-1,1])}^(1/p)
                      * || F[u](B xi) ||_{H^ceil(mu)  (R \\ [-1,1])}^(1/q)

with floor(mu)/p + ceil(mu)/q = mu closed by Hoelder conjugacy
1/p + 1/q = 1 (for integer mu the product degenerates to the single
H^mu tail norm).  Fractional Sobolev norms are always realized through
this integer-norm interpolation; no true fractional machinery exists here.

Bandwidth conventions (``bandwidth_constant`` overrides the default
1/(2 sqrt(3)) resp. 1/sqrt(6) prefactor):

* whole line: M = c sqrt(N) / beta,  B = c sqrt(N) beta,   c = 1/(2 sqrt 3)
* half line:  M = c sqrt(N / beta),  B = c sqrt(N beta),   c = 1/sqrt(6)

(the half-line M, B live on the whole-line side of the x -> x^2
correspondence, with weight exponent mu = alpha + 1/2).

All tail integrals use the substitution x = M + tan(theta) with
Gauss-Legendre panels and doubling, which handles exponential and
algebraic tails alike without tuning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln

from .basis import Family

HERMITE_BANDWIDTH_CONSTANT = 1.0 / (2.0 * math.sqrt(3.0))
LAGUERRE_BANDWIDTH_CONSTANT = 1.0 / math.sqrt(6.0)


class TruncationError(RuntimeError):
    """Raised when an adaptive tail computation or a root search fails."""


@dataclass(frozen=True)
class Bandwidths:
    M: float
    B: float
    N: int
    beta: float
    family: Family


def bandwidths(
    N: int, beta: float, family: Family, constant: Optional[float] = None
) -> Bandwidths:
    """Spatial and frequency bandwidths resolvable by N+1 scaled basis
    functions.  M*B depends only on N: c^2 N (= N/12 whole line, N/6 half
    line at the default constants)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if not beta > 0:
        raise ValueError("beta must be positive")
    if family is Family.GHF:
        c = HERMITE_BANDWIDTH_CONSTANT if constant is None else constant
        return Bandwidths(c * math.sqrt(N) / beta, c * math.sqrt(N) * beta, N, beta, family)
    c = LAGUERRE_BANDWIDTH_CONSTANT if constant is None else constant
    return Bandwidths(
        c * math.sqrt(N / beta), c * math.sqrt(N * beta), N, beta, family
    )


# ---------------------------------------------------------------------------
# tail integration
# ---------------------------------------------------------------------------

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(n: int):
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = (x, w)
    return _GL_CACHE[n]


def tail_integral(
    f: Callable[[np.ndarray], np.ndarray],
    lower: float,
    upper: Optional[float] = None,
    rtol: float = 1e-9,
    max_nodes: int = 8192,
) -> tuple[float, bool]:
    """integral_lower^upper f(x) dx (upper defaults to +inf) via
    x = lower + tan(theta) and Gauss-Legendre doubling.
    Returns (value, converged)."""
    theta_hi = 0.5 * math.pi if upper is None else math.atan(upper - lower)
    prev = None
    n = 64
    while n <= max_nodes:
        t, w = _gl_nodes(n)
        theta = 0.5 * theta_hi * (t + 1.0)
        x = lower + np.tan(theta)
        vals = f(x) / np.cos(theta) ** 2
        est = 0.5 * theta_hi * float(np.sum(w * vals))
        if prev is not None and abs(est - prev) <= rtol * max(abs(est), 1e-300):
            return est, True
        prev = est
        n *= 2
    return prev, False


def spatial_truncation(
    u, M: float, mu: float, domain: str = "whole", rtol: float = 1e-9
) -> float:
    """E_s(M): weighted L2 mass of u outside |x| > M."""
    func = u.evaluator if hasattr(u, "evaluator") else u
    if not M >= 0:
        raise ValueError("M must be >= 0")

    def integrand(x):
        return func(x) ** 2 * np.abs(x) ** (2.0 * mu)

    total, ok1 = tail_integral(integrand, M, rtol=rtol)
    ok2 = True
    if domain == "whole":
        neg, ok2 = tail_integral(lambda x: integrand(-x), M, rtol=rtol)
        total += neg
    if not (ok1 and ok2):
        raise TruncationError(f"spatial tail at M={M} did not stabilize")
    return float(np.sqrt(total))


# ---------------------------------------------------------------------------
# transform providers
# ---------------------------------------------------------------------------


class TransformProvider:
    """Supplies |d^r/dxi^r F[u](xi)| for r = 0..r_max."""

    r_max: int = 0

    def deriv_abs(self, r: int, xi: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class ClosedFormTransform(TransformProvider):
    def __init__(self, fn: Callable[[int, np.ndarray], np.ndarray], r_max: int):
        self._fn = fn
        self.r_max = r_max

    def deriv_abs(self, r, xi):
        if r > self.r_max:
            raise TruncationError(
                f"transform derivative order {r} exceeds provider cap {self.r_max}"
            )
        return np.abs(self._fn(r, np.asarray(xi, dtype=np.float64)))


class NumericTransform(TransformProvider):
    """Trapezoid-on-uniform-grid transform of a smooth, decaying function;
    spectrally accurate.  d^r F = F[(-ix)^r u], so only u itself is sampled.

    Construction grows the half-width until |u| at +-L drops below 1e-14
    of its peak, fixes the sample spacing from the requested frequency
    band (``band_max``; a uniform-grid transform is only trustworthy below
    its Nyquist rate), then doubles the sample count until the probe-band
    values stabilize to 1e-8 relative.  ``trusted_band`` is exported so
    tail integrals can cap themselves inside the alias-free range.
    """

    def __init__(
        self,
        u,
        r_max: int = 1,
        band_max: float = 24.0,
        l_start: float = 8.0,
        max_samples: int = 1 << 18,
    ):
        if r_max > 3:
            raise ValueError("r_max > 3 not supported")
        func = u.evaluator if hasattr(u, "evaluator") else u
        self.r_max = r_max
        # values stay alias-free up to the Nyquist margin beyond the band
        # the provider was asked for; tail integrals may run up to there
        self.trusted_band = 1.3 * band_max
        L = l_start
        peak = 0.0
        for _ in range(60):
            probe = np.linspace(-L, L, 8193)
            vals = np.abs(func(probe))
            peak = max(peak, float(vals.max()))
            if max(vals[0], vals[-1]) <= 1e-14 * peak:
                break
            L *= 1.5
        else:
            raise TruncationError("could not find a decayed half-width")
        self.L = L

        h_cap = math.pi / (1.3 * band_max)
        n = 1 << max(8, math.ceil(math.log2(2.0 * L / h_cap)))
        if n > max_samples:
            raise TruncationError(
                f"band {band_max} with half-width {L:.3g} needs {n} samples "
                f"(cap {max_samples}); use a closed-form transform instead"
            )
        xi_probe = np.linspace(0.0, band_max, 33)
        prev = None
        while n <= max_samples:
            self._build(func, n)
            cur = np.concatenate(
                [self.deriv_abs(r, xi_probe) for r in range(r_max + 1)]
            )
            if prev is not None:
                scale = max(float(np.max(cur)), 1e-300)
                if float(np.max(np.abs(cur - prev))) <= 1e-8 * scale:
                    return
            prev = cur
            n *= 2
        raise TruncationError(
            "numeric transform failed to stabilize (first unstable quantity: "
            f"derivative orders 0..{r_max} on the probe band [0, {band_max}])"
        )

    def _build(self, func, n):
        x = np.linspace(-self.L, self.L, n, endpoint=False)
        self._x = x
        self._h = x[1] - x[0]
        u_vals = func(x)
        self._moments = [u_vals * x**r for r in range(self.r_max + 1)]

    def deriv_abs(self, r, xi):
        if r > self.r_max:
            raise TruncationError(
                f"transform derivative order {r} exceeds provider cap {self.r_max}"
            )
        xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
        out = np.empty(xi.size)
        g = self._moments[r]
        for start in range(0, xi.size, 32):
            blk = xi[start : start + 32, None]
            phase = blk * self._x[None, :]
            re = np.cos(phase) @ g
            im = np.sin(phase) @ g
            out[start : start + 32] = np.hypot(re, im)
        return out * self._h / math.sqrt(2.0 * math.pi)


def fourier_numeric(u, r_max: int = 1, **kwargs) -> NumericTransform:
    """Numeric transform provider for a smooth decaying target."""
    return NumericTransform(u, r_max=r_max, **kwargs)


def bessel_k(nu: float, x):
    """Modified Bessel function of the second kind via the integral
    representation K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt,
    with Gauss-Legendre doubling on the decayed range.

    Accurate to ~1e-10 relative for x in [0.1, 50], |nu| <= 5; accepts
    scalars or arrays (one shared node grid, sized by the smallest x).
    """
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if not np.all(xa > 0):
        raise ValueError("x must be positive")
    nu = abs(nu)  # K_nu = K_-nu
    T = math.acosh(1.0 + (720.0 + 12.0 * nu) / float(xa.min()))
    prev = None
    n = 64
    while n <= 8192:
        t, w = _gl_nodes(n)
        tt = 0.5 * T * (t + 1.0)
        # exp(-x cosh t) cosh(nu t), folded to avoid overflow of cosh(nu t)
        log_half = -np.outer(xa, np.cosh(tt)) + nu * tt
        vals = 0.5 * (np.exp(log_half) + np.exp(log_half - 2.0 * nu * tt))
        est = 0.5 * T * (vals @ w)
        if prev is not None:
            # per-entry relative, except entries so far below the peak that
            # their own exp() terms underflow (they stay noise forever)
            scale = np.maximum(np.abs(est), 1e-280 * float(np.max(np.abs(est))))
            if float(np.max(np.abs(est - prev) / scale)) <= 1e-11:
                break
        prev = est
        n *= 2
    else:
        est = prev
    return float(est[0]) if scalar else est


# ---------------------------------------------------------------------------
# frequency truncation
# ---------------------------------------------------------------------------


def interpolation_exponents(mu: float) -> tuple[float, float]:
    """(p, q) with floor(mu)/p + ceil(mu)/q = mu and 1/p + 1/q = 1.
    For integer mu any conjugate pair works and the product collapses;
    (2, 2) is reported."""
    if mu < 0:
        raise ValueError("mu must be >= 0 here")
    fl, ce = math.floor(mu), math.ceil(mu)
    if fl == ce:
        return 2.0, 2.0
    return 1.0 / (ce - mu), 1.0 / (mu - fl)


def _tail_moments(t: TransformProvider, B: float, s_top: int, rtol: float) -> list:
    """T_s(B) = int_{|eta|>B} |d^s F(eta)|^2 d eta for s = 0..s_top.

    Numeric providers are only alias-free inside their trusted band, so the
    integration is capped there and the discarded remainder is required to
    be negligible against the captured mass.
    """
    cut = getattr(t, "trusted_band", None)
    if cut is not None and B >= cut:
        raise TruncationError(
            f"frequency tail needs B={B:.4g} inside the provider's "
            f"trusted band (< {cut:.4g}); rebuild with a larger band_max"
        )
    out = []
    for s in range(s_top + 1):

        def integrand(eta, s=s):
            return t.deriv_abs(s, eta) ** 2

        pos, ok1 = tail_integral(integrand, B, upper=cut, rtol=rtol)
        neg, ok2 = tail_integral(
            lambda eta, s=s: integrand(-eta, s), B, upper=cut, rtol=rtol
        )
        if not (ok1 and ok2):
            raise TruncationError(f"frequency tail (order {s}) did not stabilize")
        if cut is not None:
            # remainder beyond the cap, from the local exponential decay rate
            f_cut = float(integrand(np.array([cut]))[0])
            f_in = float(integrand(np.array([0.95 * cut]))[0])
            if f_cut > 0:
                rate = math.log(max(f_in, 1e-300) / f_cut) / (0.05 * cut)
                remainder = f_cut * cut if rate <= 0 else f_cut / rate
                if remainder > 1e-3 * (pos + neg):
                    raise TruncationError(
                        f"frequency tail (order {s}) not negligible at the "
                        f"trusted band edge {cut:.4g}; rebuild the provider "
                        "with a larger band_max"
                    )
        out.append(pos + neg)
    return out


def frequency_truncation(
    t: TransformProvider, B: float, mu: float, rtol: float = 1e-8
) -> float:
    """E_f(B) from integer-order Sobolev tails of the transform, with the
    fractional order realized by interpolation between floor and ceil.

    H^r norm of xi -> F(B xi) outside [-1,1]: sum_{s<=r} B^(2s-1) T_s(B).
    """
    if not B > 0:
        raise ValueError("B must be positive")
    fl, ce = math.floor(mu), math.ceil(mu)
    if ce > t.r_max:
        raise TruncationError(
            f"provider supplies derivatives up to {t.r_max}, need {ce}"
        )
    pre = B ** (-mu + 0.5)
    T = _tail_moments(t, B, ce, rtol)
    norm_sq = lambda r: sum(B ** (2 * s - 1) * T[s] for s in range(r + 1))
    if fl == ce:
        return float(pre * math.sqrt(norm_sq(fl)))
    p, q = interpolation_exponents(mu)
    return float(
        pre * norm_sq(fl) ** (0.5 / p) * norm_sq(ce) ** (0.5 / q)
    )


@dataclass(frozen=True)
class TruncationReport:
    E_s: float
    E_f: float
    M: float
    B: float
    mu: float
    N: int
    beta: float
    p_interp: float
    q_interp: float


def truncation_report(
    u,
    t: TransformProvider,
    N: int,
    beta: float,
    mu: float,
    family: Family,
    constant: Optional[float] = None,
) -> TruncationReport:
    """E_s and E_f of a candidate (N, beta) in the whole-line picture.

    For the half-line family, ``mu`` is the half-line weight exponent
    (the Laguerre parameter); the whole-line picture then carries
    mu + 1/2, and ``u``/``t`` must describe u(x) = v(x^2).
    """
    bw = bandwidths(N, beta, family, constant)
    mu_eff = mu if family is Family.GHF else mu + 0.5
    p, q = interpolation_exponents(mu_eff)
    return TruncationReport(
        E_s=spatial_truncation(u, bw.M, mu_eff),
        E_f=frequency_truncation(t, bw.B, mu_eff),
        M=bw.M,
        B=bw.B,
        mu=mu_eff,
        N=N,
        beta=beta,
        p_interp=p,
        q_interp=q,
    )


# ---------------------------------------------------------------------------
# root searches
# ---------------------------------------------------------------------------


def _log_ratio_bisect(g, lo, hi, tol, max_iter, what):
    g_lo, g_hi = g(lo), g(hi)
    if not (np.isfinite(g_lo) and np.isfinite(g_hi)):
        raise TruncationError(f"{what}: endpoint diagnostics g({lo})={g_lo}, g({hi})={g_hi}")
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if np.sign(g_lo) == np.sign(g_hi):
        raise TruncationError(
            f"{what}: no sign change in bracket "
            f"[{lo:.6g}, {hi:.6g}] (log-ratios {g_lo:.3e}, {g_hi:.3e})"
        )
    mid, g_mid = lo, g_lo
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)  # bisect in log
        g_mid = g(mid)
        if abs(g_mid) <= tol:
            return mid
        if np.sign(g_mid) == np.sign(g_lo):
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    if abs(g_mid) <= 10 * tol:
        return mid
    raise TruncationError(f"{what}: bisection stalled at log-ratio {g_mid:.3e}")


def balance_scaling(
    u,
    t: TransformProvider,
    N: int,
    mu: float,
    family: Family,
    bracket: tuple[float, float],
    tol: float = 1e-3,
    max_iter: int = 60,
    constant: Optional[float] = None,
) -> float:
    """Scale factor beta* solving E_s(beta) = E_f(beta) (log-ratio
    bisection; the bracket must straddle the crossing)."""
    mu_eff = mu if family is Family.GHF else mu + 0.5

    def g(beta):
        bw = bandwidths(N, beta, family, constant)
        return math.log(spatial_truncation(u, bw.M, mu_eff)) - math.log(
            frequency_truncation(t, bw.B, mu_eff)
        )

    return _log_ratio_bisect(
        g, bracket[0], bracket[1], tol, max_iter, f"balance_scaling(N={N})"
    )


def transition_point(
    u,
    t: TransformProvider,
    mu: float,
    bracket: Optional[tuple[float, float]] = None,
    tol: float = 1e-3,
    max_iter: int = 60,
) -> float:
    """Common bandwidth p where E_s(p) = E_f(p) (the spot where an
    exponential-in-frequency, algebraic-in-space target switches from
    sub-geometric to algebraic convergence).

    Without a bracket, a log-spaced scan locates the sign change; targets
    whose two errors never cross raise :class:`TruncationError`.
    """

    def g(p):
        return math.log(spatial_truncation(u, p, mu)) - math.log(
            frequency_truncation(t, p, mu)
        )

    if bracket is None:
        # take the rightmost sign change: an exponentially-decaying E_f can
        # graze an algebraic E_s early on, but the regime switch is where
        # E_s stays dominant for good
        grid = np.geomspace(0.5, 120.0, 20)
        vals = []
        for p in grid:
            try:
                vals.append(g(p))
            except (TruncationError, ValueError):
                vals.append(np.nan)
        vals = np.array(vals)
        idx = None
        for i in range(len(grid) - 1):
            if np.isfinite(vals[i]) and np.isfinite(vals[i + 1]):
                if np.sign(vals[i]) != np.sign(vals[i + 1]):
                    idx = i
        if idx is None:
            raise TruncationError(
                "transition_point: no E_s = E_f crossing found on [0.5, 120]"
            )
        bracket = (float(grid[idx]), float(grid[idx + 1]))
    return _log_ratio_bisect(g, bracket[0], bracket[1], tol, max_iter, "transition_point")


# ---------------------------------------------------------------------------
# closed-form transform registry
# ---------------------------------------------------------------------------


def _runge_transform_parts(h: float, r: int, xi: np.ndarray) -> np.ndarray:
    """d^r/dxi^r of F[(1+x^2)^-h](xi) = 2^(1-h)/Gamma(h) |xi|^nu K_nu(|xi|),
    nu = h - 1/2, using d/dk [k^nu K_nu(k)] = -k^nu K_{nu-1}(k) and
    d/dk [k^nu K_{nu-1}(k)] = k^(nu-1) K_{nu-1}(k) - k^nu K_{nu-2}(k).
    Valid away from xi = 0 (tail norms never sample the origin)."""
    k = np.abs(np.asarray(xi, dtype=np.float64))
    nu = h - 0.5
    pre = 2.0 ** (1.0 - h) / math.gamma(h)
    if r == 0:
        return pre * k**nu * bessel_k(nu, k)
    if r == 1:
        return -np.sign(xi) * pre * k**nu * bessel_k(nu - 1.0, k)
    if r == 2:
        K1 = bessel_k(nu - 1.0, k)
        return pre * (k**nu * bessel_k(nu - 2.0, k) - k ** (nu - 1.0) * K1)
    raise TruncationError("runge transform derivatives available up to order 2")


_HERMITE_PROB = {0: [1.0], 1: [0.0, 1.0], 2: [-1.0, 0.0, 1.0], 3: [0.0, -3.0, 0.0, 1.0]}


def _gaussian_transform(r: int, xi: np.ndarray) -> np.ndarray:
    # d^r e^{-xi^2/2} = (-1)^r He_r(xi) e^{-xi^2/2}
    he = np.polynomial.polynomial.polyval(xi, _HERMITE_PROB[r])
    return (-1.0) ** r * he * np.exp(-0.5 * xi**2)


def closed_form_transform(transform_id: str, **params) -> ClosedFormTransform:
    """Registry of analytic transforms: "gaussian" (e^{-x^2/2},
    self-reciprocal), "runge" ((1+x^2)^-h, Bessel-K closed form) and
    "x2_runge" (x^2 (1+x^2)^-h = runge(h-1) - runge(h))."""
    if transform_id == "gaussian":
        return ClosedFormTransform(_gaussian_transform, r_max=3)
    if transform_id == "runge":
        h = params["h"]
        return ClosedFormTransform(
            lambda r, xi: _runge_transform_parts(h, r, xi), r_max=2
        )
    if transform_id == "x2_runge":
        h = params["h"]
        if not h > 1:
            raise ValueError("x2_runge requires h > 1")
        return ClosedFormTransform(
            lambda r, xi: _runge_transform_parts(h - 1.0, r, xi)
            - _runge_transform_parts(h, r, xi),
            r_max=2,
        )
    raise KeyError(f"unknown transform id {transform_id!r}")
