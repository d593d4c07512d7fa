"""Effective boundary operator for the negative-eigenvalue fine structure.

For a constant unit field the negative eigenvalues split on the h^{3/2}
scale according to the periodic boundary operator

    (D_s + t_h)^2 - kappa(s)^2 / 12,        t_h = |Omega|/(h |dOmega|)
                                                  - a0 / sqrt(h)
                                                  + pi / |dOmega|,

whose spectrum is a periodic function of t_h with period 2 pi / |dOmega|.
On a disk the eigenvalues are explicit through a greedy integer selection;
generally a Fourier-Galerkin matrix is exact up to the cutoff because the
magnetic part is diagonal in Fourier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from .dispersion import A0Result

__all__ = [
    "EffSpec",
    "EffSpectrum",
    "CutoffError",
    "flux_th",
    "qeff_disk",
    "qeff_general",
    "lambda_minus_prediction",
]


class CutoffError(RuntimeError):
    """Fourier cutoff too small for the requested eigenvalue count."""


@dataclass
class EffSpec:
    """Effective operator data: geometry, flux constant and curvature profile.

    ``kappa`` may be a constant, a callable of arclength, or uniform samples
    over one period (Fourier-interpolated).
    """

    L: float
    area: float
    h: float
    a0: float
    t_h: float
    kappa: Union[float, Callable[[np.ndarray], np.ndarray], np.ndarray]
    cutoff: int = 64

    @classmethod
    def disk(cls, R: float, h: float, a0: float, cutoff: int = 64) -> "EffSpec":
        L = 2.0 * math.pi * R
        area = math.pi * R * R
        return cls(
            L=L,
            area=area,
            h=h,
            a0=a0,
            t_h=flux_th(area, L, h, a0),
            kappa=1.0 / R,
            cutoff=cutoff,
        )


@dataclass
class EffSpectrum:
    """Ascending eigenvalues; ``m_sequence`` is filled by the disk route."""

    values: np.ndarray
    m_sequence: Optional[List[int]] = None


def flux_th(area: float, L: float, h: float, a0: float) -> float:
    """Flux constant t_h = area/(h L) - a0/sqrt(h) + pi/L."""
    if L <= 0 or h <= 0 or area < 0:
        raise ValueError("need L > 0, h > 0, area >= 0")
    return area / (h * L) - a0 / math.sqrt(h) + math.pi / L


def qeff_disk(t_h: float, R: float, count: int) -> EffSpectrum:
    """Disk spectrum |m_n / R + t_h|^2 - 1/(12 R^2) by greedy mode selection.

    m_n minimizes |m / R + t_h| over the integers not chosen before; ties
    (half-integer R t_h) are broken toward the smaller m, giving the exact
    multiplicity-2 pairs.  For R = 1 this is the closed form with integer
    momenta; for general R the momentum lattice is Z / R, matching the
    gauge period 2 pi / |dOmega| = 1/R.
    """
    if R <= 0:
        raise ValueError(f"R must be positive, got {R}")
    if count < 1:
        raise ValueError(f"need count >= 1, got {count}")
    center = int(round(-t_h * R))
    cands = sorted(
        range(center - count - 2, center + count + 3),
        key=lambda m: (abs(m / R + t_h), m),
    )
    ms = cands[:count]
    vals = np.array([(m / R + t_h) ** 2 - 1.0 / (12.0 * R * R) for m in ms])
    order = np.argsort(vals, kind="stable")
    return EffSpectrum(values=vals[order], m_sequence=[ms[i] for i in order])


def _kappa_coefficients(spec: EffSpec, n_modes: int, samples: int = 4096) -> np.ndarray:
    """Fourier coefficients c_p of kappa^2 / 12 for |p| <= n_modes."""
    if isinstance(spec.kappa, (int, float)):
        c = np.zeros(2 * n_modes + 1, dtype=complex)
        c[n_modes] = float(spec.kappa) ** 2 / 12.0
        return c
    if callable(spec.kappa):
        s = spec.L * np.arange(samples) / samples
        vals = np.asarray(spec.kappa(s), dtype=float)
    else:
        vals = np.asarray(spec.kappa, dtype=float)
        samples = vals.size
    spectrum = np.fft.fft(vals**2 / 12.0) / samples
    c = np.zeros(2 * n_modes + 1, dtype=complex)
    for p in range(-n_modes, n_modes + 1):
        c[p + n_modes] = spectrum[p % samples]
    return c


def qeff_general(spec: EffSpec, count: int, check: bool = True) -> EffSpectrum:
    """Fourier-Galerkin spectrum of (D_s + t_h)^2 - kappa^2 / 12.

    Momentum modes 2 pi m / L are exactly diagonal; only kappa^2/12 couples
    them, through its Toeplitz matrix of Fourier coefficients.
    """
    if count < 1:
        raise ValueError(f"need count >= 1, got {count}")
    if spec.cutoff < 4 * count + 16:
        raise ValueError(
            f"cutoff {spec.cutoff} too small; need >= {4 * count + 16} for count={count}"
        )

    def solve(cutoff: int) -> np.ndarray:
        modes = np.arange(-cutoff, cutoff + 1)
        diag = (2.0 * math.pi * modes / spec.L + spec.t_h) ** 2
        coeffs = _kappa_coefficients(spec, 2 * cutoff)
        mat = np.diag(diag).astype(complex)
        for i, mi in enumerate(modes):
            for j, mj in enumerate(modes):
                mat[i, j] -= coeffs[(mi - mj) + 2 * cutoff]
        vals = np.linalg.eigvalsh(mat)
        return vals[:count]

    vals = solve(spec.cutoff)
    if check:
        ref = solve(spec.cutoff + 8)
        err = float(np.max(np.abs(vals - ref)))
        if err > 1e-9 * max(1.0, float(np.max(np.abs(vals)))):
            raise CutoffError(
                f"eigenvalues changed by {err:.3e} under cutoff refinement; "
                f"increase cutoff beyond {spec.cutoff}"
            )
    return EffSpectrum(values=vals, m_sequence=None)


def lambda_minus_prediction(
    n: int, h: float, a0res: A0Result, eff: EffSpectrum
) -> float:
    """Fine-structure prediction a0 sqrt(h) + c0 h^{3/2} lambda_n."""
    if n < 1 or n > eff.values.size:
        raise ValueError(f"n={n} outside the computed spectrum (len {eff.values.size})")
    return a0res.a0 * math.sqrt(h) + a0res.c0 * h**1.5 * float(eff.values[n - 1])
