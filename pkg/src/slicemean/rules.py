"""Quadrature node/weight construction.

The radial rule is the heart of the deterministic evaluator. After the
substitution r = a * sqrt(u), the slice weight times the volume element
becomes the Beta(k/2, exponent + 1) kernel u^(k/2-1) (1-u)^exponent on
(0, 1). A Gauss rule for that kernel is a Gauss-Jacobi rule with
parameters (alpha, beta) = (exponent, k/2 - 1) mapped from [-1, 1]; the
exponents in play grow like N/2, where library routines overflow because
they scale weights by the zeroth moment 2^(alpha+beta+1) B(alpha+1, beta+1).
Here the Jacobi matrix is assembled from the (bounded) three-term
recurrence coefficients and the zeroth moment is normalized to 1, so the
weights are the probabilities of the Beta distribution placed on the nodes
and sum to 1 for every exponent.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
from numpy.polynomial.legendre import leggauss


def beta_radial_rule(k: int, exponent: float, n_nodes: int):
    """Nodes u in (0, 1) and weights of the normalized Beta(k/2, exponent+1)
    Gauss rule; weights sum to 1.

    Exact for polynomial integrands of degree <= 2 n_nodes - 1 with respect
    to the Beta distribution.
    """
    if n_nodes < 1:
        raise ValueError("need at least one radial node")
    a = float(exponent)
    b = k / 2.0 - 1.0
    if a <= -1.0 or b <= -1.0:
        raise ValueError("Jacobi parameters must exceed -1")
    apb = a + b
    diag = np.empty(n_nodes)
    diag[0] = (b - a) / (apb + 2.0)
    if n_nodes > 1:
        i = np.arange(1, n_nodes, dtype=float)
        diag[1:] = (b * b - a * a) / ((2 * i + apb) * (2 * i + apb + 2.0))
        num = 4.0 * i * (i + a) * (i + b) * (i + apb)
        den = (2 * i + apb) ** 2 * (2 * i + apb + 1.0) * (2 * i + apb - 1.0)
        off = np.sqrt(num / den)
        nodes, vecs = scipy.linalg.eigh_tridiagonal(diag, off)
        weights = vecs[0] ** 2
    else:
        nodes = diag
        weights = np.ones(1)
    u = 0.5 * (1.0 + nodes)
    return u, weights / weights.sum()


def sphere_directions(k: int, angular_nodes) -> tuple[np.ndarray, np.ndarray]:
    """Unit directions on S^(k-1) with normalized weights (sum 1), k <= 3.

    k = 1: the two half-lines with weight 1/2 each.
    k = 2: ``angular_nodes`` equispaced points on the circle, exact for
           trigonometric polynomials of degree < angular_nodes.
    k = 3: Gauss-Legendre in the polar cosine times an equispaced azimuth;
           ``angular_nodes`` is either a total budget (split evenly) or an
           explicit (polar, azimuthal) pair.
    """
    if k == 1:
        return np.array([[1.0], [-1.0]]), np.array([0.5, 0.5])
    if k == 2:
        n = int(angular_nodes)
        theta = 2.0 * np.pi * np.arange(n) / n
        pts = np.column_stack([np.cos(theta), np.sin(theta)])
        return pts, np.full(n, 1.0 / n)
    if k == 3:
        if isinstance(angular_nodes, (tuple, list)):
            n_polar, n_az = int(angular_nodes[0]), int(angular_nodes[1])
        else:
            side = max(4, int(round(np.sqrt(int(angular_nodes)))))
            n_polar = n_az = side
        c, w_polar = leggauss(n_polar)
        phi = 2.0 * np.pi * np.arange(n_az) / n_az
        sin_polar = np.sqrt(1.0 - c**2)
        pts = np.empty((n_polar * n_az, 3))
        wts = np.empty(n_polar * n_az)
        for i in range(n_polar):
            sl = slice(i * n_az, (i + 1) * n_az)
            pts[sl, 0] = sin_polar[i] * np.cos(phi)
            pts[sl, 1] = sin_polar[i] * np.sin(phi)
            pts[sl, 2] = c[i]
            wts[sl] = 0.5 * w_polar[i] / n_az
        return pts, wts
    raise ValueError(f"no deterministic direction rule for k = {k}")


def gauss_legendre_panel(lo: float, hi: float, n_nodes: int):
    """Gauss-Legendre nodes/weights mapped to the interval [lo, hi]."""
    x, w = leggauss(n_nodes)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def gauss_hermite_prob(n_nodes: int):
    """Probabilists' Gauss-Hermite rule normalized to total weight 1.

    Integrates polynomials of degree <= 2 n_nodes - 1 exactly against the
    standard normal density.
    """
    x, w = np.polynomial.hermite_e.hermegauss(n_nodes)
    return x, w / w.sum()
