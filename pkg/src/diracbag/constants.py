"""Semiclassical prefactors for the positive eigenvalues.

The k-th positive eigenvalue behaves like C_k h^{1-k} e^{2 phi_min / h}
where C_k is a squared ratio of two projection distances: the boundary-norm
(Hardy) distance of (z - z_min)^{k-1} to the holomorphic functions vanishing
to order k at z_min, over the Gaussian-weighted (Segal-Bargmann) distance of
z^{k-1} to the lower-degree polynomials.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

__all__ = [
    "BargmannWeight",
    "BoundaryCurve",
    "CkResult",
    "TruncationError",
    "bargmann_distance",
    "hardy_distance",
    "ck_constant",
    "lambda_plus_prediction",
]

MAX_K = 12  # Gram matrices become numerically rank-deficient beyond this


class TruncationError(RuntimeError):
    """Polynomial truncation of the Hardy projection did not converge."""


@dataclass(frozen=True)
class BargmannWeight:
    """Anisotropic Gaussian weight exp(-Hess(y, y)) with a 2x2 SPD Hessian."""

    hess: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.hess, dtype=float)
        if h.shape != (2, 2):
            raise ValueError(f"expected 2x2 Hessian, got {h.shape}")
        h = 0.5 * (h + h.T)
        if np.any(np.linalg.eigvalsh(h) <= 0):
            raise ValueError("Hessian must be positive definite")
        object.__setattr__(self, "hess", h)

    @classmethod
    def isotropic(cls, b0: float) -> "BargmannWeight":
        """Weight of a radial field: Hessian scale B(0)/2 in each direction."""
        return cls(hess=np.eye(2) * (b0 / 2.0))


@dataclass
class BoundaryCurve:
    """Closed positively oriented boundary: sample points and arclength weights."""

    points: np.ndarray  # complex samples of the curve
    weights: np.ndarray  # arclength quadrature weights
    z_min: complex

    @classmethod
    def circle(cls, radius: float, z_min: complex = 0.0, n: int = 1024) -> "BoundaryCurve":
        theta = 2.0 * math.pi * np.arange(n) / n
        pts = radius * np.exp(1j * theta)
        w = np.full(n, 2.0 * math.pi * radius / n)  # trapezoid on a closed curve
        return cls(points=pts, weights=w, z_min=complex(z_min))


@dataclass(frozen=True)
class CkResult:
    k: int
    dist_H: float
    dist_B: float
    Ck: float


def _gaussian_1d_moments(c: float, pmax: int) -> np.ndarray:
    """int v^p e^{-c v^2} dv for p = 0..pmax (odd moments vanish)."""
    out = np.zeros(pmax + 1)
    out[0] = math.sqrt(math.pi / c)
    for p in range(2, pmax + 1, 2):
        out[p] = out[p - 2] * (p - 1) / (2.0 * c)
    return out


def _bargmann_gram(kdim: int, w: BargmannWeight) -> np.ndarray:
    """Gram matrix G[a, b] = <z^a, z^b> under the Gaussian weight.

    The Hessian is rotated to principal axes (z picks up a phase only), and
    each monomial moment reduces to products of 1D Gaussian moments.
    """
    evals, evecs = np.linalg.eigh(w.hess)
    if np.linalg.det(evecs) < 0:
        evecs = evecs[:, ::-1]
        evals = evals[::-1]
    phase = math.atan2(evecs[1, 0], evecs[0, 0])
    d1, d2 = float(evals[0]), float(evals[1])
    pmax = 2 * (kdim - 1)
    m1 = _gaussian_1d_moments(d1, pmax)
    m2 = _gaussian_1d_moments(d2, pmax)

    # I[a, b] = int (v1 + i v2)^a (v1 - i v2)^b e^{-d1 v1^2 - d2 v2^2} dv
    gram = np.zeros((kdim, kdim), dtype=complex)
    for a in range(kdim):
        for b in range(kdim):
            acc = 0.0 + 0.0j
            for p in range(a + 1):
                for q in range(b + 1):
                    # v1^{p+q} * (i v2)^{a-p} * (-i v2)^{b-q}
                    deg1 = p + q
                    deg2 = (a - p) + (b - q)
                    if deg1 % 2 or deg2 % 2:
                        continue
                    coef = (
                        math.comb(a, p)
                        * math.comb(b, q)
                        * (1j) ** (a - p)
                        * (-1j) ** (b - q)
                    )
                    acc += coef * m1[deg1] * m2[deg2]
            # inner product is conj-linear in the first slot: <z^a, z^b> = I[b, a]*
            gram[a, b] = acc * cmath.exp(1j * (b - a) * phase)
    return gram


def bargmann_distance(k: int, w: BargmannWeight) -> float:
    """Distance of z^{k-1} to the span of 1..z^{k-2} in the Gaussian norm."""
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    if k > MAX_K:
        raise ValueError(f"Gram matrix ill-conditioned for k={k} > {MAX_K}")
    gram = _bargmann_gram(k, w)
    head = gram[: k - 1, : k - 1]
    cross = gram[: k - 1, k - 1]
    norm2 = gram[k - 1, k - 1].real
    if k == 1:
        return math.sqrt(norm2)
    coeffs = np.linalg.solve(head, cross)
    resid2 = norm2 - float(np.real(np.vdot(cross, coeffs)))
    return math.sqrt(max(resid2, 0.0))


def _hardy_residual(k: int, curve: BoundaryCurve, n_basis: int) -> float:
    """Squared boundary-norm distance of (z - z_min)^{k-1} to the span of
    (z - z_min)^j, k <= j < n_basis (the admissible polynomial directions)."""
    zs = curve.points - curve.z_min
    scale = float(np.max(np.abs(zs)))
    zn = zs / scale  # keep powers O(1)
    w = curve.weights
    target = zn ** (k - 1)
    degs = np.arange(k, n_basis)
    basis = zn[:, None] ** degs[None, :]
    gram = (basis.conj().T * w) @ basis
    rhs = basis.conj().T @ (w * target)
    norm2 = float(np.sum(w * np.abs(target) ** 2))
    gram += 1e-13 * np.eye(degs.size) * np.trace(gram).real / degs.size
    coeffs = np.linalg.solve(gram, rhs)
    resid2 = norm2 - float(np.real(np.vdot(rhs, coeffs)))
    return max(resid2, 0.0) * scale ** (2 * (k - 1))


def hardy_distance(
    k: int,
    curve: BoundaryCurve,
    n_basis: int = 48,
    check: bool = True,
) -> float:
    """Boundary-norm distance of (z - z_min)^{k-1} to the order-k vanishing
    subspace, by constrained least squares over polynomial truncations.

    The vanishing constraints are eliminated by working in the monomial basis
    centered at z_min with degrees >= k.  With ``check`` the truncation is
    enlarged by 8 and the two values must agree to 1e-8 relative.
    """
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    if n_basis < k + 8:
        raise ValueError(f"need n_basis >= k + 8, got {n_basis}")
    d2 = _hardy_residual(k, curve, n_basis)
    if check:
        d2_fine = _hardy_residual(k, curve, n_basis + 8)
        if abs(d2_fine - d2) > 1e-8 * max(d2, 1e-300):
            raise TruncationError(
                f"Hardy distance not converged at n_basis={n_basis}: "
                f"{d2:.12e} vs {d2_fine:.12e}"
            )
    return math.sqrt(d2)


def ck_constant(k: int, w: BargmannWeight, curve: BoundaryCurve) -> CkResult:
    """C_k = (dist_H / dist_B)^2 for the given weight and boundary."""
    dist_h = hardy_distance(k, curve)
    dist_b = bargmann_distance(k, w)
    return CkResult(k=k, dist_H=dist_h, dist_B=dist_b, Ck=(dist_h / dist_b) ** 2)


def lambda_plus_prediction(ck: CkResult, phi_min: float, h: float) -> float:
    """Leading-order positive eigenvalue C_k h^{1-k} e^{2 phi_min / h}."""
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    return ck.Ck * h ** (1 - ck.k) * math.exp(2.0 * phi_min / h)
