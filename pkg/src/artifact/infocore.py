"""Information measures over the 900-cell digit-triple simplex.

Everything here treats a joint distribution p over triples
delta = (d1, d2, d3) as a flat 900-vector indexed by delta - 100, with
marginals taken by reshaping to (9, 10, 10).  The central functional is
the plug-in conditional mutual information

    F(p) = I(D1; D3 | D2)
         = H(D1,D2) + H(D2,D3) - H(D2) - H(D1,D2,D3)   (bits),

its gradient and Hessian at the Benford point, the conditional-
independence (Markov) projection, and the star discrepancy used as an
equidistribution diagnostic.  Working precision is binary float64;
counts stay exact integers upstream and probabilities are formed at
the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from mpmath import mp

from .digits import N_CELLS, TripleCounts, benford_joint
from .errors import DomainError, UndefinedRatioError

LN2 = math.log(2.0)

#: Default absolute eigenvalue threshold separating the numerically
#: null directions of the Hessian from true curvature.  The spectrum at
#: the Benford point has 99 exact-zero directions (magnitudes below
#: 1e-12) and a clean gap up to ~5e-8, so any threshold in
#: [1e-9, 1e-8] counts them identically; 1e-8 is the top of that
#: plateau.
DEFAULT_EPS_EIG = 1e-8


def _as_joint(p, *, normalized: bool = True) -> np.ndarray:
    """Validate and return a 900-cell distribution as float64."""
    if isinstance(p, TripleCounts):
        p = p.to_probs()
    arr = np.asarray(p, dtype=np.float64)
    if arr.shape != (N_CELLS,):
        raise DomainError(f"expected a {N_CELLS}-vector, got shape {arr.shape}")
    if np.any(arr < 0):
        raise DomainError("distribution has negative entries")
    if normalized and abs(float(arr.sum()) - 1.0) > 1e-12:
        raise DomainError(f"distribution sums to {arr.sum()!r}, not 1")
    return arr


def _entropy(x: np.ndarray) -> float:
    """Shannon entropy in bits with the 0*log0 = 0 convention."""
    x = x[x > 0]
    return float(-np.sum(x * np.log2(x)))


def cmi(p) -> float:
    """Plug-in I(D1; D3 | D2) in bits via the four-entropy form."""
    arr = _as_joint(p).reshape(9, 10, 10)
    return (_entropy(arr.sum(axis=2)) + _entropy(arr.sum(axis=0))
            - _entropy(arr.sum(axis=(0, 2))) - _entropy(arr))


def cmi_ratio_form(p) -> float:
    """The same functional as sum p * log2(p * p2 / (p12 * p23)).

    Kept separate so tests can assert the two forms agree to 1e-12.
    """
    arr = _as_joint(p).reshape(9, 10, 10)
    p12 = arr.sum(axis=2)
    p23 = arr.sum(axis=0)
    p2 = arr.sum(axis=(0, 2))
    mask = arr > 0
    num = arr * p2[None, :, None]
    den = p12[:, :, None] * p23[None, :, :]
    out = np.zeros_like(arr)
    out[mask] = arr[mask] * np.log2(num[mask] / den[mask])
    return float(out.sum())


@lru_cache(maxsize=1)
def i_infinity() -> float:
    """CMI of the exact Benford joint law, in bits.

    Evaluated in 50-digit arithmetic (the value is ~3.37e-5 bits, five
    orders below the entropies being differenced, so float64
    cancellation would cost accuracy) and cached.
    """
    with mp.workdps(50):
        h12 = mp.mpf(0)
        h23 = mp.mpf(0)
        h2 = mp.mpf(0)
        h123 = mp.mpf(0)
        p12 = {}
        p23 = {}
        p2 = {}
        probs = {}
        for delta in range(100, 1000):
            val = mp.log(1 + mp.mpf(1) / delta) / mp.ln10
            probs[delta] = val
            i, j, k = delta // 100, (delta // 10) % 10, delta % 10
            p12[(i, j)] = p12.get((i, j), mp.mpf(0)) + val
            p23[(j, k)] = p23.get((j, k), mp.mpf(0)) + val
            p2[j] = p2.get(j, mp.mpf(0)) + val
        ln2 = mp.log(2)
        h123 = -sum(v * mp.log(v) for v in probs.values()) / ln2
        h12 = -sum(v * mp.log(v) for v in p12.values()) / ln2
        h23 = -sum(v * mp.log(v) for v in p23.values()) / ln2
        h2 = -sum(v * mp.log(v) for v in p2.values()) / ln2
        return float(h12 + h23 - h2 - h123)


def l2_distance(p, q) -> float:
    """Euclidean distance between two 900-cell distributions."""
    return float(np.linalg.norm(_as_joint(p) - _as_joint(q)))


def star_discrepancy(points) -> float:
    """Star discrepancy D*_N of points in [0, 1).

    Sorted-sample formula: max over order statistics x_(i) of
    max(i/N - x_(i), x_(i) - (i-1)/N); exact for the sup over anchored
    intervals [0, t).
    """
    x = np.sort(np.asarray(points, dtype=np.float64))
    n = x.size
    if n == 0:
        raise DomainError("star discrepancy of an empty point set")
    if np.any(x < 0) or np.any(x >= 1):
        raise DomainError("points must lie in [0, 1)")
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(np.maximum(i / n - x, x - (i - 1) / n).max())


def markov_projection(p) -> tuple[np.ndarray, float]:
    """Conditional-independence projection and its L2 distance.

    q(i,j,k) = p(i,j) p(j,k) / p(j); fibers with zero d2-marginal are
    copied unchanged (degenerate but mass-free in practice).  cmi(q)
    vanishes by construction.
    """
    arr = _as_joint(p).reshape(9, 10, 10)
    p12 = arr.sum(axis=2)
    p23 = arr.sum(axis=0)
    p2 = arr.sum(axis=(0, 2))
    q = np.empty_like(arr)
    for j in range(10):
        if p2[j] <= 0:
            q[:, j, :] = arr[:, j, :]
        else:
            q[:, j, :] = np.outer(p12[:, j], p23[j, :]) / p2[j]
    q_flat = q.reshape(N_CELLS)
    return q_flat, float(np.linalg.norm(q_flat - arr.reshape(N_CELLS)))


@dataclass(frozen=True)
class GradientReport:
    """Analytic CMI gradient at a distribution."""

    gradient: np.ndarray          # raw partial derivatives, 900-vector
    projected: np.ndarray         # component-mean removed (tangent part)
    projected_norm: float
    component_mean: float
    component_sd: float


def cmi_gradient(p) -> GradientReport:
    """dF/dp per cell: log2( p(i,j,k) p(j) / (p(i,j) p(j,k)) ).

    Constant terms cancel on the tangent space of the simplex, so the
    tangent part is the gradient with its component mean subtracted.
    """
    arr = _as_joint(p).reshape(9, 10, 10)
    if np.any(arr <= 0):
        raise DomainError("gradient needs a strictly positive distribution")
    p12 = arr.sum(axis=2)
    p23 = arr.sum(axis=0)
    p2 = arr.sum(axis=(0, 2))
    g = np.log2(arr * p2[None, :, None] / (p12[:, :, None] * p23[None, :, :]))
    g = g.reshape(N_CELLS)
    mean = float(g.mean())
    projected = g - mean
    return GradientReport(gradient=g, projected=projected,
                          projected_norm=float(np.linalg.norm(projected)),
                          component_mean=mean, component_sd=float(g.std()))


def cmi_hessian(p) -> np.ndarray:
    """Analytic 900x900 Hessian of F at p (bits: factor 1/ln 2).

    H[(abc),(def)] = [ 1{abc=def}/p(abc) + 1{b=e}/p(b)
                       - 1{ab=de}/p(ab) - 1{bc=ef}/p(bc) ] / ln 2.
    """
    arr = _as_joint(p).reshape(9, 10, 10)
    if np.any(arr <= 0):
        raise DomainError("Hessian needs a strictly positive distribution")
    flat = arr.reshape(N_CELLS)
    p12 = arr.sum(axis=2)
    p23 = arr.sum(axis=0)
    p2 = arr.sum(axis=(0, 2))

    idx = np.arange(N_CELLS)
    a = idx // 100
    b = (idx // 10) % 10
    c = idx % 10

    same_b = b[:, None] == b[None, :]
    same_ab = (a[:, None] == a[None, :]) & same_b
    same_bc = same_b & (c[:, None] == c[None, :])

    h = np.zeros((N_CELLS, N_CELLS))
    h += np.where(same_b, 1.0 / p2[b][None, :], 0.0)
    h -= np.where(same_ab, 1.0 / p12[a, b][None, :], 0.0)
    h -= np.where(same_bc, 1.0 / p23[b, c][None, :], 0.0)
    h[idx, idx] += 1.0 / flat
    return h / LN2


@lru_cache(maxsize=1)
def tangent_basis() -> np.ndarray:
    """Orthonormal basis of the simplex tangent space {sum = 0}.

    Columns of a 900x899 matrix: the Householder reflector that maps
    e_1 to the normalized all-ones vector, minus its first column.
    """
    n = N_CELLS
    ones = np.full(n, 1.0 / math.sqrt(n))
    w = ones.copy()
    w[0] -= 1.0
    w /= np.linalg.norm(w)
    q = np.eye(n) - 2.0 * np.outer(w, w)
    basis = q[:, 1:]
    basis.setflags(write=False)
    return basis


@dataclass(frozen=True)
class HessianSpectrum:
    """Tangent-space spectrum of the CMI Hessian."""

    eigenvalues: np.ndarray       # 899 reals, ascending
    n_pos: int
    n_neg: int
    n_null: int
    lambda_max: float
    lambda_min: float
    op_norm: float                # tangent-restricted max |lambda|
    op_norm_full: float           # unrestricted 900x900 max |lambda|
    eps_eig: float

    def __post_init__(self):
        if self.n_pos + self.n_neg + self.n_null != N_CELLS - 1:
            raise DomainError("spectrum counts must total 899")


def cmi_hessian_spectrum(p=None, eps_eig: float = DEFAULT_EPS_EIG) -> HessianSpectrum:
    """Full tangent-space diagonalization of the CMI Hessian.

    ``p`` defaults to the Benford point.  Eigenvalues with |lambda| <=
    eps_eig (absolute) count as null.  Both the tangent-restricted and
    the full-space operator norms are reported, since the two
    projection conventions differ in principle.
    """
    if p is None:
        p = benford_joint()
    h = cmi_hessian(p)
    h = 0.5 * (h + h.T)
    basis = tangent_basis()
    ht = basis.T @ h @ basis
    ht = 0.5 * (ht + ht.T)
    eig = np.linalg.eigvalsh(ht)
    full = np.linalg.eigvalsh(h)
    n_null = int(np.sum(np.abs(eig) <= eps_eig))
    n_pos = int(np.sum(eig > eps_eig))
    n_neg = int(np.sum(eig < -eps_eig))
    return HessianSpectrum(
        eigenvalues=eig, n_pos=n_pos, n_neg=n_neg, n_null=n_null,
        lambda_max=float(eig[-1]), lambda_min=float(eig[0]),
        op_norm=float(np.max(np.abs(eig))),
        op_norm_full=float(np.max(np.abs(full))),
        eps_eig=eps_eig,
    )


def quadratic_ratios(p_emp, p_ref=None, i_inf: float | None = None) -> dict[str, float]:
    """Curvature diagnostics of an empirical distribution vs a reference.

    With Delta = p_emp - p_ref:
      quad_ratio   = (cmi(p_emp) - i_inf) / ||Delta||^2
      linear_ratio = |grad F(p_ref) . Delta| / ||Delta||^2
    """
    ref = benford_joint() if p_ref is None else _as_joint(p_ref)
    emp = _as_joint(p_emp)
    delta = emp - ref
    nrm2 = float(delta @ delta)
    if nrm2 == 0.0:
        raise UndefinedRatioError("zero displacement: ratios undefined")
    if i_inf is None:
        i_inf = i_infinity()
    grad = cmi_gradient(ref).gradient
    return {
        "quad_ratio": (cmi(emp) - i_inf) / nrm2,
        "linear_ratio": abs(float(grad @ delta)) / nrm2,
    }
