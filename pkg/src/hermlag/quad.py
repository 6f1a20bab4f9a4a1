"""Gauss and Gauss-Radau rules for the scaled Laguerre weights, plus
Hermite-type rules obtained through the half-line transfer.

Each rule carries two weight sets:

* ``weights_poly``: exact against the full weight ``x^alpha e^(-beta x)``
  (Laguerre) or ``|x|^(2 mu) e^(-beta^2 x^2)`` (Hermite) for polynomials up
  to the rule's exactness degree.
* ``weights_func``: ``exp(beta * node) * weights_poly`` (Laguerre) resp.
  ``exp(beta^2 node^2) * weights_poly`` (Hermite); these integrate
  envelope-carrying integrands (polynomial times the full exponential
  envelope) against the bare weight ``x^alpha`` / ``|x|^(2 mu)``.

Numerical route: nodes come from the Jacobi-matrix spectrum (eigenvalues
only).  Function-level weights are then recovered from the exact discrete
orthogonality identity

    weights_func_j = 1 / sum_k [basisfn_k(node_j)]^2 / norm_k^2,

whose terms are all O(1) because the basis functions carry their envelope.
The eigenvector formula (``golub_welsch``) computes the same weights but
loses the far-tail entries to underflow once rules grow past a few hundred
points; it is kept as the small-rule routine and as a cross-check.

Hermite rules are always built from a Laguerre rule at scale beta^2: odd
point counts from the Radau rule (node 0 becomes the center node), even
counts from the Gauss rule.  A direct Hermite Jacobi-matrix construction
exists only in the tests, as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import gammaln

from . import _kernels
from .basis import Family


class QuadratureError(RuntimeError):
    """Raised when a rule cannot be constructed (eigensolver failure or an
    invariant violation)."""


@dataclass(frozen=True)
class JacobiMatrix:
    """Symmetric tridiagonal recurrence matrix plus the weight's 0th moment."""

    diag: np.ndarray
    offdiag: np.ndarray
    zeroth_moment: float

    def __post_init__(self):
        if self.offdiag.size != self.diag.size - 1:
            raise ValueError("offdiag must be one shorter than diag")
        if self.offdiag.size and not np.all(self.offdiag > 0):
            raise ValueError("offdiag entries must be strictly positive")


@dataclass(frozen=True)
class QuadratureRule:
    family: Family
    param: float
    scale: float
    kind: str  # "gauss" or "radau"
    nodes: np.ndarray
    weights_poly: np.ndarray
    weights_func: np.ndarray

    @property
    def n_points(self) -> int:
        return self.nodes.size

    def __post_init__(self):
        if np.any(np.diff(self.nodes) <= 0):
            raise QuadratureError("nodes must be strictly increasing")
        if np.any(self.weights_poly < 0) or np.any(self.weights_func <= 0):
            raise QuadratureError("weights must be positive")


def laguerre_jacobi(alpha: float, n: int) -> JacobiMatrix:
    """Jacobi matrix of order n for the weight x^alpha e^(-x):
    diag 2k+1+alpha, offdiag sqrt(k(k+alpha)), 0th moment Gamma(alpha+1)."""
    if not alpha > -1.0:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(n, dtype=np.float64)
    diag = 2.0 * k + 1.0 + alpha
    kk = np.arange(1, n, dtype=np.float64)
    off = np.sqrt(kk * (kk + alpha))
    return JacobiMatrix(diag, off, float(np.exp(gammaln(alpha + 1.0))))


def golub_welsch(J: JacobiMatrix):
    """Nodes and polynomial-level weights from the Jacobi matrix spectrum:
    weight_j = zeroth_moment * (first eigenvector component)^2.

    Weights below roughly 1e-100 are underflow-limited; rule constructors
    use the discrete-orthogonality route instead for that regime.
    """
    if J.diag.size == 1:
        return J.diag.copy(), np.array([J.zeroth_moment])
    try:
        vals, vecs = scipy.linalg.eigh_tridiagonal(
            J.diag, J.offdiag, lapack_driver="stebz"
        )
    except Exception as exc:
        raise QuadratureError(f"tridiagonal eigensolver failed: {exc}") from exc
    order = np.argsort(vals)
    return vals[order], J.zeroth_moment * vecs[0, order] ** 2


def _jacobi_eigenvalues(J: JacobiMatrix) -> np.ndarray:
    if J.diag.size == 1:
        return J.diag.copy()
    try:
        vals = scipy.linalg.eigvalsh_tridiagonal(
            J.diag, J.offdiag, lapack_driver="stebz"
        )
    except Exception as exc:
        raise QuadratureError(f"tridiagonal eigensolver failed: {exc}") from exc
    return np.sort(vals)


def _glf_func_weights(alpha: float, nodes1: np.ndarray, n_basis: int) -> np.ndarray:
    """Function-level weights at scale 1 from discrete orthogonality:
    1 / sum_{k<n_basis} glf_k(node)^2 / gamma_k.

    Run in extended precision: beyond ~1420 the envelope exp(-node/2)
    underflows in float64 while the true function weight is still O(node),
    and x86 longdouble extends the usable node range to ~9800 (rules of a
    couple thousand points).
    """
    y = nodes1.astype(np.longdouble)
    k = np.arange(n_basis, dtype=np.float64)
    inv_gamma = np.exp(gammaln(k + 1.0) - gammaln(k + alpha + 1.0)).astype(
        np.longdouble
    )
    p_prev = np.exp(-0.5 * y)
    total = inv_gamma[0] * p_prev * p_prev
    if n_basis > 1:
        p = (1.0 + alpha - y) * p_prev
        total += inv_gamma[1] * p * p
        for n in range(1, n_basis - 1):
            p_prev, p = p, ((2 * n + 1 + alpha - y) * p - (n + alpha) * p_prev) / (
                n + 1
            )
            total += inv_gamma[n + 1] * p * p
    return (1.0 / total).astype(np.float64)


def gauss_laguerre(alpha: float, beta: float, n_points: int) -> QuadratureRule:
    """Gauss rule for x^alpha e^(-beta x): exact to polynomial degree
    2*n_points - 1 at the full-weight level.

    Scale covariance: nodes(beta) = nodes(1)/beta,
    weights(beta) = beta^-(alpha+1) weights(1).
    """
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    nodes1 = _jacobi_eigenvalues(laguerre_jacobi(alpha, n_points))
    wf1 = _glf_func_weights(alpha, nodes1, n_points)
    return _laguerre_rule(alpha, beta, "gauss", nodes1, wf1)


def gauss_radau_laguerre(alpha: float, beta: float, n_points: int) -> QuadratureRule:
    """Gauss-Radau rule with the first node fixed at 0: exact to polynomial
    degree 2*n_points - 2 at the full-weight level.

    Boundary weight (at scale 1) is the closed form
    (alpha+1) Gamma^2(alpha+1) Gamma(N+1) / Gamma(N+alpha+2), N = n_points-1;
    the interior nodes are the Gauss nodes of parameter alpha+1 and the
    interior weights are node^-1 times the corresponding Gauss weights.
    """
    if not alpha > -1.0:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    N = n_points - 1
    w0 = float(
        np.exp(
            np.log(alpha + 1.0)
            + 2.0 * gammaln(alpha + 1.0)
            + gammaln(N + 1.0)
            - gammaln(N + alpha + 2.0)
        )
    )
    if N == 0:
        return _laguerre_rule(alpha, beta, "radau", np.array([0.0]), np.array([w0]))
    g_nodes = _jacobi_eigenvalues(laguerre_jacobi(alpha + 1.0, N))
    g_wf = _glf_func_weights(alpha + 1.0, g_nodes, N)
    nodes1 = np.concatenate([[0.0], g_nodes])
    wf1 = np.concatenate([[w0], g_wf / g_nodes])
    return _laguerre_rule(alpha, beta, "radau", nodes1, wf1)


def _laguerre_rule(alpha, beta, kind, nodes1, wf1) -> QuadratureRule:
    nodes = nodes1 / beta
    weights_func = wf1 * beta ** -(alpha + 1.0)
    # compute in longdouble: the poly weights genuinely underflow to 0 at the
    # far nodes of very large rules, but must not become nan on the way
    weights_poly = (
        weights_func.astype(np.longdouble) * np.exp(-nodes1.astype(np.longdouble))
    ).astype(np.float64)
    return QuadratureRule(
        Family.GLF, alpha, beta, kind, nodes, weights_poly, weights_func
    )


def gauss_hermite_generalized(mu: float, beta: float, n_points: int) -> QuadratureRule:
    """Rule for |x|^(2 mu) e^(-beta^2 x^2) on the whole line, built from the
    half-line rule of parameter mu - 1/2 at scale beta^2.

    Odd count 2N+1: nodes {0} U {+-sqrt(xi_Radau)}, center function-weight
    equal to the Radau boundary weight, side weights half the interior
    Radau function-weights.  Even count 2N+2: nodes +-sqrt(xi_Gauss) with
    half the Gauss function-weights.  For mu = 0 this reproduces classical
    Gauss-Hermite.
    """
    if not mu > -0.5:
        raise ValueError(f"mu must exceed -1/2, got {mu}")
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    alpha = mu - 0.5
    if n_points % 2:
        half = gauss_radau_laguerre(alpha, beta * beta, (n_points + 1) // 2)
        pos = np.sqrt(half.nodes[1:])
        wf_pos = 0.5 * half.weights_func[1:]
        nodes = np.concatenate([-pos[::-1], [0.0], pos])
        wf = np.concatenate([wf_pos[::-1], [half.weights_func[0]], wf_pos])
    else:
        half = gauss_laguerre(alpha, beta * beta, n_points // 2)
        pos = np.sqrt(half.nodes)
        wf_pos = 0.5 * half.weights_func
        nodes = np.concatenate([-pos[::-1], pos])
        wf = np.concatenate([wf_pos[::-1], wf_pos])
    weights_poly = wf * np.exp(-((beta * nodes) ** 2))
    return QuadratureRule(Family.GHF, mu, beta, "gauss", nodes, weights_poly, wf)


def exactness_degree(rule: QuadratureRule) -> int:
    """Largest polynomial degree integrated exactly at the full-weight level
    (for Hermite rules with an odd point count: on the even part; the odd
    part is exact at any degree by symmetry)."""
    n = rule.n_points
    if rule.family is Family.GLF:
        return 2 * n - 1 if rule.kind == "gauss" else 2 * n - 2
    return 2 * n - 1 if n % 2 == 0 else 2 * n - 3


@dataclass(frozen=True)
class NodeBoundReport:
    satisfied: bool
    worst_index: int
    worst_margin: float
    max_node_ratio: float


def node_bound_check(rule: QuadratureRule) -> NodeBoundReport:
    """Check every node against the strict Szego-type upper bound on
    Laguerre zeros and report the largest-node ratio against
    sqrt(4N + 2 alpha + 6) (which it approaches from below).

    Hermite rules are checked through their underlying half-line rule
    (positive nodes squared, scale beta^2).
    """
    if rule.family is Family.GLF:
        if rule.kind == "gauss":
            alpha = rule.param
            xi = rule.nodes * rule.scale
            N = rule.n_points - 1
        else:
            alpha = rule.param + 1.0
            xi = rule.nodes[1:] * rule.scale
            N = rule.n_points - 2
    else:
        n = rule.n_points
        pos = rule.nodes[rule.nodes > 0]
        xi = pos**2 * rule.scale**2
        if n % 2:  # interior of the underlying Radau rule: Gauss of alpha+1
            alpha = rule.param + 0.5
            N = (n - 1) // 2 - 1
        else:
            alpha = rule.param - 0.5
            N = n // 2 - 1
    if xi.size == 0:
        return NodeBoundReport(True, -1, np.inf, 0.0)
    j = np.arange(xi.size, dtype=np.float64)
    t = 2.0 * j + alpha + 3.0
    bound = (j + (alpha + 3.0) / 2.0) * (
        (t + np.sqrt(t * t + 0.25 - alpha * alpha)) / (N + (alpha + 3.0) / 2.0)
    )
    margin = bound - xi
    worst = int(np.argmin(margin))
    ratio = float(np.sqrt(xi[-1] / (4.0 * N + 2.0 * alpha + 6.0)))
    if not np.all(margin > 0):
        raise QuadratureError(
            f"node bound violated at index {worst}: scaled node^2 {xi[worst]:.6g} "
            f">= bound {bound[worst]:.6g}"
        )
    return NodeBoundReport(True, worst, float(margin[worst]), ratio)
