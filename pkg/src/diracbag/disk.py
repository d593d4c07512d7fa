"""Direct Dirac spectra on a disk with a radial magnetic field.

The MIT-bag Dirac operator on a disk separates into angular modes.  With the
Coulomb gauge potential A = grad(phi)^perp and the spinor ansatz
u = f(r) e^{i m theta}, v = g(r) e^{i (m+1) theta}, the off-diagonal blocks
act radially as

    d^x u = -i e^{i(m+1)theta} (h f' - (h m / r) f + phi' f)
    d   v = -i e^{i m theta}   (h g' + (h (m+1) / r) g - phi' g)

and the wall condition v = i n u becomes g(R) = i f(R); writing g = -i ghat
makes the radial system real with ghat(R) = -f(R).

Positive eigenvalues come per mode from the unique zero of the k-th
eigenvalue ell_k(lambda) of the quadratic form

    Q_lambda(f) = int |h f' - (h m / r) f +- phi' f|^2 r dr
                  + h lambda R |f(R)|^2 - lambda^2 int |f|^2 r dr,

negative ones from the same construction with the field flipped (charge
conjugation).  A staggered first-order discretization of the radial system
serves as an independent oracle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .numerics import Grid1D, TridiagSym, eig_sym_tridiag, integrate

__all__ = [
    "RadialField",
    "RadialGauge",
    "DiskSpec",
    "DiracSpectrum",
    "ModeRangeError",
    "radial_phi",
    "mode_ell",
    "mode_E",
    "dirac_spectrum",
    "hardy_nu_k",
    "zigzag_spectrum",
    "dirac_radial_direct",
]

_GAUGE_N = 16385  # nodes of the internal [0, R] gauge grid
POSITIVE_H_MIN = 0.02  # below this the positive eigenvalues underflow the weights


class ModeRangeError(RuntimeError):
    """Angular-mode window too narrow for the requested eigenvalue count."""

    def __init__(self, m_range: Tuple[int, int], suggested: Tuple[int, int]):
        self.m_range = m_range
        self.suggested = suggested
        super().__init__(
            f"mode range {m_range} contributes edge modes to the requested "
            f"spectrum; rerun with m_range >= {suggested}"
        )


@dataclass(frozen=True)
class RadialField:
    """Radial magnetic profile B(r) > 0 on [0, R]."""

    B: Union[float, Callable[[np.ndarray], np.ndarray]]
    R: float

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError(f"R must be positive, got {self.R}")

    def samples(self, r: np.ndarray) -> np.ndarray:
        if callable(self.B):
            vals = np.asarray(self.B(r), dtype=float)
        else:
            vals = np.full_like(r, float(self.B))
        # isolated zeros (e.g. B ~ r^2 at the center) are tolerated
        if np.any(vals < 0.0) or not np.any(vals > 0.0):
            raise ValueError("field must be positive on [0, R]")
        return vals


@dataclass
class RadialGauge:
    """Coulomb-gauge data: phi'' + phi'/r = B, phi(R) = 0.

    phi'(r) = (1/r) int_0^r s B(s) ds, so phi is subharmonic with its minimum
    at the center; ``hess`` is the Hessian scale B(0)/2 there.
    """

    r: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    phi_min: float
    hess: float

    def phi_at(self, x: np.ndarray) -> np.ndarray:
        return np.interp(x, self.r, self.phi)

    def dphi_at(self, x: np.ndarray) -> np.ndarray:
        return np.interp(x, self.r, self.dphi)


def radial_phi(field: RadialField, grid: Optional[Grid1D] = None) -> RadialGauge:
    """Gauge potential of a radial field by cumulative quadrature."""
    if grid is None:
        grid = Grid1D(0.0, field.R, _GAUGE_N)
    r = grid.nodes()
    b = field.samples(r)
    h = grid.step
    # I(r) = int_0^r s B ds, cumulative trapezoid; phi' = I / r.
    integrand = r * b
    flux = np.concatenate(
        [[0.0], np.cumsum(0.5 * h * (integrand[1:] + integrand[:-1]))]
    )
    dphi = np.zeros_like(r)
    dphi[1:] = flux[1:] / r[1:]
    # phi(r) = -int_r^R phi'; integrate phi' once more and shift to phi(R)=0.
    anti = np.concatenate([[0.0], np.cumsum(0.5 * h * (dphi[1:] + dphi[:-1]))])
    phi = anti - anti[-1]
    hess = 0.5 * float(b[0])
    return RadialGauge(r=r, phi=phi, dphi=dphi, phi_min=float(phi[0]), hess=hess)


def _shifted_grid(R: float, n: int) -> Grid1D:
    # nodes (i + 1/2) * delta with the last node exactly at R; the origin is
    # avoided (mode-m radial functions behave like r^|m| there).
    delta = 2.0 * R / (2 * n - 1)
    return Grid1D(delta / 2.0, R, n)


@dataclass
class DiskSpec:
    """Disk problem: field, semiclassical parameter, mode window, radial grid."""

    field: RadialField
    h: float
    m_range: Tuple[int, int]
    rgrid: Grid1D
    _gauge: Optional[RadialGauge] = dc_field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError(f"h must be positive, got {self.h}")

    @classmethod
    def make(
        cls,
        field: RadialField,
        h: float,
        n: int = 2001,
        m_range: Optional[Tuple[int, int]] = None,
    ) -> "DiskSpec":
        if m_range is None:
            m_max = math.ceil(3.0 * field.R**2 / h)
            m_range = (-m_max, m_max)
        return cls(field=field, h=h, m_range=m_range, rgrid=_shifted_grid(field.R, n))

    @property
    def gauge(self) -> RadialGauge:
        if self._gauge is None:
            self._gauge = radial_phi(self.field)
        return self._gauge


@dataclass
class DiracSpectrum:
    """Signed disk Dirac spectrum; ``neg`` holds |negative eigenvalues|."""

    pos: np.ndarray
    neg: np.ndarray
    pos_provenance: List[Tuple[int, int]]  # (mode, k) per entry
    neg_provenance: List[Tuple[int, int]]


class _ModeOperator:
    """lambda-independent pieces of the mode-m quadratic form Q_lambda.

    Inner closure: the zero-flux solution of h f' + W f = 0 is
    r^m e^{-s phi/h}, regular at the origin exactly when m >= 0; those modes
    keep the free (natural) end of the shifted grid so the state stays
    exactly representable (this is what makes the discrete roots respect
    their Hardy bounds).  For m < 0 the solution is singular yet grid
    normalizable, so the inner end is closed with a Dirichlet node.  On top
    of that, the leading cells where |W| exceeds the mesh-Peclet bound
    h/step are dropped entirely (the physical states are r^|m|-small there,
    so the cut is far below the discretization error).
    """

    def __init__(self, spec: DiskSpec, m: int, field_sign: str, orientation: int = 1):
        if field_sign not in ("plus", "minus"):
            raise ValueError(f"field_sign must be 'plus' or 'minus', got {field_sign!r}")
        g = spec.rgrid
        n = g.n
        delta = g.step
        R = spec.field.R
        h = spec.h
        nodes = g.nodes()
        flux = np.arange(1, n) * delta  # midpoints between nodes
        s = (1.0 if field_sign == "plus" else -1.0) * orientation
        w = -h * m / flux + s * spec.gauge.dphi_at(flux)

        bad = np.abs(w) > h / delta
        j0 = int(np.nonzero(bad)[0].max()) + 1 if np.any(bad) else 0
        if j0 > n - 8:
            raise ValueError(
                f"mode m={m} unresolvable on this grid (centrifugal cut at {j0}/{n})"
            )
        dirichlet = m < 0
        flux = flux[j0:]
        w = w[j0:]
        a = 0.5 * w - h / delta
        b = 0.5 * w + h / delta
        c = flux * delta  # exact cell integrals of r dr

        if dirichlet:
            # node j0 is the ghost zero; unknowns start at node j0 + 1
            nodes = g.nodes()[j0 + 1 :]
            kd = np.zeros(nodes.size)
            kd[0] += c[0] * b[0] * b[0]
            kd[:-1] += c[1:] * a[1:] * a[1:]
            kd[1:] += c[1:] * b[1:] * b[1:]
            ko = c[1:] * a[1:] * b[1:]
        else:
            nodes = g.nodes()[j0:]
            kd = np.zeros(nodes.size)
            kd[:-1] += c * a * a
            kd[1:] += c * b * b
            ko = c * a * b

        mass = nodes * delta
        mass[-1] = R * delta / 2.0 - delta**2 / 8.0
        self.h = h
        self.R = R
        self.kd = kd
        self.ko = ko
        self.mass = mass
        self._sqrt_mass = np.sqrt(mass)
        self._off = ko / (self._sqrt_mass[:-1] * self._sqrt_mass[1:])

    def ell(self, lam: float, k: int) -> np.ndarray:
        """First k eigenvalues of the form Q_lambda relative to the L2 norm."""
        diag = self.kd.copy()
        diag[-1] += self.h * lam * self.R
        diag /= self.mass
        vals, _ = eig_sym_tridiag(TridiagSym(diag, self._off), k)
        return vals - lam * lam


def mode_ell(
    spec: DiskSpec,
    m: int,
    field_sign: str,
    lam: float,
    k: int,
    orientation: int = 1,
) -> np.ndarray:
    """ell_1(lambda)..ell_k(lambda) for angular mode m."""
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    return _ModeOperator(spec, m, field_sign, orientation).ell(lam, k)


def _bisect_ell(op: _ModeOperator, k: int, lo: float, hi: float, rel_tol: float) -> float:
    """Dichotomy on ell_k with geometric bracket expansion.

    ell_k is positive below its unique zero and negative above it (the
    discrete form satisfies the same second-order structure in lambda as the
    continuum one), so plain sign bisection applies.
    """
    f_lo = op.ell(lo, k)[k - 1]
    f_hi = op.ell(hi, k)[k - 1]
    grow = 0
    while f_lo <= 0.0:
        lo *= 0.25
        f_lo = op.ell(lo, k)[k - 1]
        grow += 1
        if grow > 60:
            raise RuntimeError("no positive lower bracket for ell_k")
    grow = 0
    while f_hi >= 0.0:
        hi *= 2.0
        f_hi = op.ell(hi, k)[k - 1]
        grow += 1
        if grow > 60:
            raise RuntimeError("no negative upper bracket for ell_k")
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        f_mid = op.ell(mid, k)[k - 1]
        if f_mid == 0.0:
            return mid
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _hardy_ratio(spec: DiskSpec, m: int, orientation: int = 1) -> float:
    """Boundary-to-bulk quotient h R^{2m+1} / int r^{2m+1} e^{-2 phi / h} dr
    of the weighted holomorphic mode (m >= 0); an upper bound for E_1^{(m)}
    on the plus branch."""
    gauge = spec.gauge
    R = spec.field.R
    fine = Grid1D(0.0, R, 8193)
    r = fine.nodes()
    logw = -2.0 * orientation * gauge.phi_at(r) / spec.h
    scale = float(np.max(logw))  # keep the weight <= 1
    j = integrate((r / R) ** (2 * m + 1) * np.exp(logw - scale), fine)
    return spec.h * math.exp(-scale) / j


def _bracket_for(spec: DiskSpec, m: int, field_sign: str, k: int, orientation: int) -> Tuple[float, float]:
    """Initial dichotomy bracket for the k-th root of mode m.

    Minus branch roots live on the sqrt(h) scale.  Plus-branch ground roots
    of the holomorphic modes (m >= 0) are exponentially small; their Hardy
    quotient bounds them above and fixes the scale of the bracket, keeping
    the lower end clear of the eigensolver noise floor.
    """
    h = spec.h
    if field_sign == "minus":
        return 0.5 * math.sqrt(h), 1.5 * math.sqrt(h)
    if h < POSITIVE_H_MIN:
        raise ValueError(
            f"h={h} below the supported range for positive eigenvalues "
            f"(weights underflow past h={POSITIVE_H_MIN})"
        )
    hi = 2.0 * math.sqrt(2.0 * h)
    if k == 1 and m >= 0:
        ratio = _hardy_ratio(spec, m, orientation)
        if ratio < 0.5 * math.sqrt(h):
            return 0.25 * ratio, hi
        return 1e-9, max(hi, 2.0 * ratio)
    return 1e-9, hi


def mode_E(
    spec: DiskSpec,
    m: int,
    field_sign: str,
    k: int = 1,
    orientation: int = 1,
    rel_tol: float = 1e-9,
) -> float:
    """Unique positive zero E_k of ell_k(lambda) for angular mode m."""
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    op = _ModeOperator(spec, m, field_sign, orientation)
    lo, hi = _bracket_for(spec, m, field_sign, k, orientation)
    return _bisect_ell(op, k, lo, hi, rel_tol)


def _merge_modes(
    spec: DiskSpec,
    field_sign: str,
    count: int,
    orientation: int,
    deep: int = 2,
) -> Tuple[np.ndarray, List[Tuple[int, int]]]:
    m_lo, m_hi = spec.m_range
    entries: List[Tuple[float, int, int]] = []
    per_mode: dict = {}
    for m in range(m_lo, m_hi + 1):
        op = _ModeOperator(spec, m, field_sign, orientation)
        roots = []
        for k in range(1, deep + 1):
            lo, hi = _bracket_for(spec, m, field_sign, k, orientation)
            roots.append(_bisect_ell(op, k, lo, hi, 1e-9))
        per_mode[m] = (op, roots)
        entries.extend((root, m, k + 1) for k, root in enumerate(roots))
    entries.sort()
    selected = entries[:count]

    # deepen any mode whose deepest computed root was selected
    changed = True
    while changed:
        changed = False
        for val, m, k in selected:
            op, roots = per_mode[m]
            if k == len(roots):
                lo, hi = _bracket_for(spec, m, field_sign, len(roots) + 1, orientation)
                roots.append(_bisect_ell(op, len(roots) + 1, lo, hi, 1e-9))
                entries.append((roots[-1], m, len(roots)))
                changed = True
        if changed:
            entries.sort()
            selected = entries[:count]

    if any(m in (m_lo, m_hi) for _, m, _ in selected):
        span = max(abs(m_lo), abs(m_hi))
        raise ModeRangeError(spec.m_range, (-int(1.5 * span) - 2, int(1.5 * span) + 2))
    values = np.array([v for v, _, _ in selected])
    prov = [(m, k) for _, m, k in selected]
    return values, prov


def dirac_spectrum(spec: DiskSpec, count: int, orientation: int = 1) -> DiracSpectrum:
    """First ``count`` positive and negative disk Dirac eigenvalues.

    Negative eigenvalues are the positive zeros of the charge-conjugate
    (field-flipped) problem and are stored with positive sign.  With
    ``orientation=-1`` the whole computation runs for the reversed field.
    """
    if count < 1:
        raise ValueError(f"need count >= 1, got {count}")
    pos, pos_prov = _merge_modes(spec, "plus", count, orientation)
    neg, neg_prov = _merge_modes(spec, "minus", count, orientation)
    return DiracSpectrum(
        pos=pos, neg=neg, pos_provenance=pos_prov, neg_provenance=neg_prov
    )


def hardy_nu_k(spec: DiskSpec, kmax: int) -> np.ndarray:
    """Hardy-quotient upper bounds nu_1(h) <= ... <= nu_kmax(h).

    Per angular mode n >= 0 the quotient of the weighted holomorphic state
    r^n e^{-phi/h} is

        r_n = h R^{2n+1} / int_0^R r^{2n+1} e^{-2 phi(r)/h} dr ;

    the integrand is scaled by e^{2 phi_min / h} so it never overflows.
    """
    if kmax < 1:
        raise ValueError(f"need kmax >= 1, got {kmax}")
    R = spec.field.R
    h = spec.h
    gauge = spec.gauge
    fine = Grid1D(0.0, R, 8193)
    r = fine.nodes()
    expw = np.exp(-2.0 * (gauge.phi_at(r) - gauge.phi_min) / h)
    ratios = []
    for n_ang in range(kmax + 8):
        j = integrate((r / R) ** (2 * n_ang + 1) * expw, fine)
        ratios.append(h * math.exp(2.0 * gauge.phi_min / h) / j)
    ratios.sort()
    return np.array(ratios[:kmax])


def zigzag_spectrum(spec: DiskSpec, branch: str, count: int) -> np.ndarray:
    """Zigzag (Pauli-Dirichlet) eigenvalues alpha_k^{+-}(h).

    Radial Dirichlet problem per mode m:
        h^2 (-f'' - f'/r + (m/r - A/h)^2 f) +- h B f,  f(R) = 0,
    with A = phi'.  The plus branch is bounded below by 2 b0 h; the minus
    branch is exponentially small in 1/h.
    """
    if branch not in ("plus", "minus"):
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")
    if count < 1:
        raise ValueError(f"need count >= 1, got {count}")
    g = spec.rgrid
    n = g.n
    delta = g.step
    h = spec.h
    nodes = g.nodes()
    flux = np.arange(1, n) * delta
    c = flux * delta
    mass = nodes * delta
    mass[-1] = spec.field.R * delta / 2.0 - delta**2 / 8.0
    bvals = spec.field.samples(nodes)
    sgn = 1.0 if branch == "plus" else -1.0

    m_lo, m_hi = spec.m_range
    per_mode_k = min(count + 1, n - 2)
    allvals: List[float] = []
    for m in range(m_lo, m_hi + 1):
        v = (h * m / nodes - spec.gauge.dphi_at(nodes)) ** 2 + sgn * h * bvals
        # Dirichlet at R: drop the last node, keep its flux cell
        kd = np.zeros(n - 1)
        kd[:-1] += c[:-1] * (h / delta) ** 2
        kd[1:] += c[:-1] * (h / delta) ** 2
        kd[-1] += c[-1] * (h / delta) ** 2
        ko = -c[:-1] * (h / delta) ** 2
        diag = kd / mass[:-1] + v[:-1]
        off = ko / np.sqrt(mass[:-2] * mass[1:-1])
        vals, _ = eig_sym_tridiag(TridiagSym(diag, off), per_mode_k)
        allvals.extend(float(x) for x in vals)
    allvals.sort()
    return np.array(allvals[:count])


def dirac_radial_direct(spec: DiskSpec, m: int, count: int, sigma: float = 0.0) -> np.ndarray:
    """Signed eigenvalues of the first-order radial system (oracle).

    Staggered grid: f on edges j*delta (j = 1..N, the last exactly at R),
    ghat on centers (j - 1/2)*delta.  The wall condition ghat(R) = -f(R)
    enters through a one-sided second-order closure of ghat'(R).  Returns
    the 2*count converged eigenvalues closest to the shift ``sigma``,
    ascending.
    """
    if count < 1:
        raise ValueError(f"need count >= 1, got {count}")
    N = spec.rgrid.n
    R = spec.field.R
    h = spec.h
    delta = R / N
    edges = np.arange(1, N + 1) * delta
    centers = (np.arange(1, N + 1) - 0.5) * delta
    dphi_e = spec.gauge.dphi_at(edges)
    dphi_c = spec.gauge.dphi_at(centers)
    w_c = -h * m / centers + dphi_c  # h f' + w f  at centers
    u_e = h * (m + 1) / edges - dphi_e  # -h g' - u g  at edges

    # centrifugal cut, as in the second-order route: drop the leading cells
    # where the averaged coupling would violate the mesh-Peclet bound
    bad = (np.abs(w_c) > h / delta) | (np.abs(u_e) > h / delta)
    cut = int(np.nonzero(bad)[0].max()) + 1 if np.any(bad) else 0
    if cut > N - 8:
        raise ValueError(f"mode m={m} unresolvable on this grid (cut at {cut}/{N})")
    nf = N - cut  # f unknowns: edges cut+1..N, ghat unknowns: centers cut+1..N

    rows, cols, data = [], [], []

    def put(i, j, v):
        rows.append(i)
        cols.append(j)
        data.append(v)

    def fcol(j):  # f_j, j = cut+1..N
        return j - cut - 1

    def gcol(j):  # ghat_j, j = cut+1..N
        return nf + j - cut - 1

    for j in range(cut + 1, N + 1):  # ghat equation at center j
        i = gcol(j)
        if j >= cut + 2:
            put(i, fcol(j - 1), -h / delta + 0.5 * w_c[j - 1])  # f_{j-1}
        elif m == 0 and cut == 0:
            # regularity closure at the origin: f(0) ~ f(delta)
            put(i, fcol(1), -h / delta + 0.5 * w_c[0])
        put(i, fcol(j), h / delta + 0.5 * w_c[j - 1])  # f_j
    for j in range(cut + 1, N):  # f equation at interior edge j
        i = fcol(j)
        put(i, gcol(j + 1), -h / delta - 0.5 * u_e[j - 1])  # ghat_{j+1}
        put(i, gcol(j), h / delta - 0.5 * u_e[j - 1])  # ghat_j
    # f equation at the wall edge, using ghat(R) = -f(R)
    w0, w1, w2 = 8.0 / (3.0 * delta), -3.0 / delta, 1.0 / (3.0 * delta)
    put(fcol(N), fcol(N), h * w0 + u_e[N - 1])  # f_N  (from ghat(R) = -f_N)
    put(fcol(N), gcol(N), -h * w1)  # ghat_N
    put(fcol(N), gcol(N - 1), -h * w2)  # ghat_{N-1}

    mat = scipy.sparse.csc_matrix(
        (data, (rows, cols)), shape=(2 * nf, 2 * nf), dtype=float
    )
    k = min(2 * count + 6, 2 * nf - 2)
    v0 = np.ones(2 * nf)
    vals, vecs = scipy.sparse.linalg.eigs(mat, k=k, sigma=sigma, which="LM", v0=v0)

    r_f = edges[cut:]
    r_g = centers[cut:]
    r_inner = max(8.0 * delta, 0.02 * R)
    keep: List[float] = []
    for idx in range(vals.size):
        lam = vals[idx]
        if abs(lam.imag) > 1e-8 * max(1.0, abs(lam.real)):
            continue
        f_part = np.real(vecs[:nf, idx])
        g_part = np.real(vecs[nf:, idx])
        ref = np.max(np.abs(f_part))
        if ref > 0:
            sig = f_part[np.abs(f_part) > 1e-8 * ref]
            if sig.size > 3:
                flips = np.mean(sig[1:] * sig[:-1] < 0.0)
                if flips > 0.6:
                    warnings.warn(
                        f"filtered oscillatory mode at lambda={lam.real:.6g} (m={m})"
                    )
                    continue
        # the grid normalizes the continuum-inadmissible singular solutions
        # (~ r^{-|m|} or r^{-|m+1|}); they sit entirely at the inner cut
        total = np.sum(r_f * f_part**2) + np.sum(r_g * g_part**2)
        inner = (
            np.sum(r_f[r_f < r_inner] * f_part[r_f < r_inner] ** 2)
            + np.sum(r_g[r_g < r_inner] * g_part[r_g < r_inner] ** 2)
        )
        if inner > 0.5 * total:
            warnings.warn(
                f"filtered origin-concentrated mode at lambda={lam.real:.6g} (m={m})"
            )
            continue
        keep.append(float(lam.real))
    keep.sort(key=lambda x: abs(x - sigma))
    out = sorted(keep[: 2 * count])
    return np.array(out)
