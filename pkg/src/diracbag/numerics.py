"""Shared numerical kernels.

Symmetric tridiagonal eigensolves, bracketed bisection, golden-section
minimization and composite quadrature.  Everything here is a pure function
of its inputs; callers may fan out over parameter grids freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

__all__ = [
    "Grid1D",
    "TridiagSym",
    "Bracket",
    "EigenConvergenceError",
    "BracketError",
    "eig_sym_tridiag",
    "bisect",
    "golden_min",
    "integrate",
]

# Default tolerances; discretization error dominates far above these.
EIG_TOL = 1e-12
ROOT_TOL = 1e-10
GOLDEN_TOL = 1e-8

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi


class EigenConvergenceError(RuntimeError):
    """Raised when the tridiagonal eigensolver fails to converge."""

    def __init__(self, size: int, detail: str = ""):
        self.size = size
        super().__init__(f"tridiagonal eigensolve failed for size {size}: {detail}")


class BracketError(ValueError):
    """Raised when a root bracket does not enclose a sign change."""


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid with n nodes on [x0, x1]."""

    x0: float
    x1: float
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"Grid1D needs n >= 3, got {self.n}")
        if not self.x1 > self.x0:
            raise ValueError(f"Grid1D needs x1 > x0, got [{self.x0}, {self.x1}]")

    @property
    def step(self) -> float:
        return (self.x1 - self.x0) / (self.n - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.n)


@dataclass(frozen=True)
class TridiagSym:
    """Real symmetric tridiagonal matrix (diag length n, offdiag length n-1)."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        if e.shape != (max(d.shape[0] - 1, 0),):
            raise ValueError(
                f"offdiag length {e.shape} incompatible with diag length {d.shape}"
            )
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.shape[0]


@dataclass
class Bracket:
    """Sign-changing interval for the dichotomy method."""

    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if not self.f_lo * self.f_hi < 0.0:
            raise BracketError(
                f"no sign change on [{self.lo}, {self.hi}]: "
                f"f_lo={self.f_lo:.3e}, f_hi={self.f_hi:.3e}"
            )


def eig_sym_tridiag(
    m: TridiagSym,
    k: int,
    vectors: bool = False,
    weights: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """k smallest eigenvalues (ascending) of a symmetric tridiagonal matrix.

    Values are computed by Sturm-sequence bisection and, when requested,
    eigenvectors by inverse iteration (LAPACK stebz/stein via scipy).
    With ``weights`` given, eigenvectors are normalized so that
    sum(weights * v**2) == 1; otherwise they keep unit Euclidean norm.

    Returns (values, vectors_or_None); vectors are columns.
    """
    if k < 1 or k > m.n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={m.n}")
    try:
        if m.n == 1:
            vals = np.array([m.diag[0]])
            vecs = np.array([[1.0]]) if vectors else None
        else:
            out = scipy.linalg.eigh_tridiagonal(
                m.diag,
                m.offdiag,
                eigvals_only=not vectors,
                select="i",
                select_range=(0, k - 1),
            )
            if vectors:
                vals, vecs = out
            else:
                vals, vecs = out, None
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise EigenConvergenceError(m.n, str(exc)) from exc
    vals = np.asarray(vals, dtype=float)
    if vecs is not None and weights is not None:
        w = np.asarray(weights, dtype=float)
        norms = np.sqrt(np.einsum("i,ij->j", w, vecs**2))
        vecs = vecs / norms
    return vals, vecs


def bisect(f: Callable[[float], float], b: Bracket, tol: float = ROOT_TOL) -> float:
    """Root of f on a sign-changing bracket by plain dichotomy."""
    lo, hi = b.lo, b.hi
    f_lo = b.f_lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval at rounding limit
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if f_lo * f_mid < 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def golden_min(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = GOLDEN_TOL,
) -> Tuple[float, float]:
    """(argmin, min) of a unimodal function on [lo, hi] by golden section."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    a, b = lo, hi
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
    if f1 <= f2:
        return x1, f1
    return x2, f2


def integrate(
    samples: Sequence[float],
    grid: Grid1D,
    weight: Optional[Sequence[float]] = None,
) -> float:
    """Composite quadrature of samples on a uniform grid.

    Simpson's rule when the node count is odd (even interval count),
    composite trapezoid otherwise.  Summation is performed with an exact
    accumulator so repeated runs are bit-identical.
    """
    y = np.asarray(samples, dtype=float)
    if y.shape != (grid.n,):
        raise ValueError(f"samples length {y.shape} != grid n {grid.n}")
    if weight is not None:
        w = np.asarray(weight, dtype=float)
        if w.shape != y.shape:
            raise ValueError("weight length mismatch")
        y = y * w
    h = grid.step
    if grid.n % 2 == 1:
        coeff = np.ones(grid.n)
        coeff[1:-1:2] = 4.0
        coeff[2:-1:2] = 2.0
        return math.fsum((h / 3.0) * coeff * y)
    coeff = np.ones(grid.n)
    coeff[0] = coeff[-1] = 0.5
    return math.fsum(h * coeff * y)
