"""Dense complex eigenpairs, characteristic polynomials and spectrum sets.

A :class:`SpectrumSet` is a set of complex numbers under an absolute merge
tolerance: values closer than ``tol`` (transitively) are one value.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import NumericError, ValidationError
from .weights import roots_of_unity

DEFAULT_TOL = 1e-7
EIGPAIR_RTOL = 1e-8
# reciprocal condition below which an eigenvalue is treated as part of a
# perturbed Jordan block
ILL_CONDITIONED = 1e-5
CLUSTER_RADIUS = 1e-2
GRID_FRACTION = 1e-4


# --------------------------------------------------------------------------
# eigenpairs


def eig_batch(ms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a stack of square matrices.

    Returns ``(vals, vecs)`` shaped ``(B, k)`` and ``(B, k, k)`` with
    eigenvectors in columns, each scaled so its largest-modulus entry is
    exactly 1. Raises :class:`NumericError` if LAPACK fails or any pair
    misses ``|M v - lam v|_inf <= 1e-8 max(1, |M|_inf)``.
    """
    ms = np.asarray(ms, dtype=complex)
    if ms.ndim != 3 or ms.shape[1] != ms.shape[2] or ms.shape[1] == 0:
        raise ValidationError(f"expected a stack of nonempty square matrices, got shape {ms.shape}")
    if not np.all(np.isfinite(ms)):
        raise ValidationError("matrix has non-finite entries")
    try:
        vals, vecs = np.linalg.eig(ms)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver did not converge: {exc}", matrix=ms) from exc
    k = ms.shape[1]
    pivot = np.argmax(np.abs(vecs), axis=1)  # (B, k): row of max entry per column
    scale = np.take_along_axis(vecs, pivot[:, None, :], axis=1)
    vecs = vecs / scale
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(vecs))):
        raise NumericError("eigensolver returned non-finite values", matrix=ms)
    sym = np.all(ms == ms.transpose(0, 2, 1), axis=(1, 2))
    if np.any(sym):
        _refine_defective(ms, vals, vecs, np.nonzero(sym)[0])
    resid = np.abs(ms @ vecs - vecs * vals[:, None, :]).max(axis=1)
    bound = EIGPAIR_RTOL * np.maximum(1.0, np.abs(ms).sum(axis=2).max(axis=1))
    bad = np.nonzero((resid > bound[:, None]).any(axis=1))[0]
    if bad.size:
        b = int(bad[0])
        raise NumericError(
            f"eigenpair residual {resid[b].max():.3e} exceeds {bound[b]:.3e} (dim {k})",
            matrix=ms[b],
        )
    return vals, vecs


def _small_clusters(vals: np.ndarray, radius: float) -> np.ndarray:
    # single-linkage labels for a handful of points by min-label propagation
    near = np.abs(vals[:, None] - vals[None, :]) <= radius
    labels = np.arange(len(vals))
    while True:
        nxt = np.where(near, labels[None, :], len(vals)).min(axis=1)
        if np.array_equal(nxt, labels):
            return labels
        labels = nxt


def _refine_defective(ms, vals, vecs, which) -> None:
    """Average clusters of ill-conditioned eigenvalues of complex symmetric
    matrices, in place.

    For ``M == M.T`` the left eigenvector is the transpose of the right one,
    so ``|y^T y| / |y|^2`` is the reciprocal eigenvalue condition number. A
    Jordan block of size m is returned by LAPACK as m values spread by about
    ``eps**(1/m)``; their mean is accurate to rounding. The vector is then
    recomputed as the null vector of ``M - mean*I``.
    """
    v = vecs[which]
    cond = np.abs(np.einsum("bij,bij->bj", v, v)) / np.einsum("bij,bij->bj", v.conj(), v).real
    for pos in np.nonzero((cond < ILL_CONDITIONED).any(axis=1))[0]:
        b = which[pos]
        ill = cond[pos] < ILL_CONDITIONED
        m = ms[b]
        norm = max(1.0, float(np.abs(m).sum(axis=1).max()))
        # a perturbed block can drag well-conditioned copies of the same
        # eigenvalue with it, so cluster everything and keep clusters that
        # touch an ill-conditioned value
        labels = _small_clusters(vals[b], CLUSTER_RADIUS * norm)
        for lab in np.unique(labels[ill]):
            members = np.nonzero(labels == lab)[0]
            if len(members) < 2:
                continue
            mean = vals[b, members].mean()
            _, sv, vh = np.linalg.svd(m - mean * np.eye(len(m)))
            if sv[-1] > EIGPAIR_RTOL * norm:
                continue
            y = vh[-1].conj()
            y = y / y[np.argmax(np.abs(y))]
            vals[b, members] = mean
            vecs[b][:, members] = y[:, None]


def complex_eigenpairs(m) -> list[tuple[complex, np.ndarray]]:
    """All ``dim`` eigenpairs of ``m`` counted with algebraic multiplicity.

    Sorted by (real, imag) of the eigenvalue; vectors have unit max-norm.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    vals, vecs = eig_batch(m[None])
    order = np.lexsort((vals[0].imag, vals[0].real))
    return [(complex(vals[0, i]), vecs[0, :, i].copy()) for i in order]


# --------------------------------------------------------------------------
# characteristic polynomial


@dataclass(frozen=True)
class PolyCoeffs:
    """Monic polynomial ``c_0 + c_1 x + ... + c_k x^k`` with ``c_k == 1``."""

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[-1] != 1:
            raise ValidationError("polynomial must be monic")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, np.asarray(self.coeffs))

    def roots(self) -> np.ndarray:
        """Roots via the eigenvalues of the companion matrix."""
        k = self.degree
        if k == 0:
            return np.zeros(0, dtype=complex)
        comp = np.zeros((k, k), dtype=complex)
        comp[1:, :-1] = np.eye(k - 1)
        comp[:, -1] = -np.asarray(self.coeffs[:-1])
        return np.linalg.eigvals(comp)


def char_poly(m) -> PolyCoeffs:
    """``det(x I - m)`` by the Faddeev-LeVerrier recurrence.

    Exact on integer matrices up to rounding of the trace divisions; used
    for small golden checks, never in the spectrum pipeline.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValidationError(f"expected a nonempty square matrix, got shape {a.shape}")
    n = a.shape[0]
    c = [0j] * (n + 1)
    c[n] = 1 + 0j
    aux = np.zeros_like(a)
    eye = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        aux = a @ aux + c[n - k + 1] * eye
        c[n - k] = complex(-np.trace(a @ aux) / k)
    return PolyCoeffs(tuple(c))


# --------------------------------------------------------------------------
# spectrum sets


@dataclass(frozen=True)
class Witness:
    """Where an eigenvalue came from: a vertex subset (original labels) and
    the weights on it.

    ``eta`` exponents are mod ``s``; ``pi`` (mod ``2s``) is set only when the
    value was produced in pi-space. ``rotation`` counts the s-th root of unity
    applied on top of a quotient representative.
    """

    subset: tuple[int, ...]
    s: int
    eta: tuple[int, ...]
    pi: tuple[int, ...] | None = None
    rotation: int = 0
    eig_index: int = -1
    residual: float | None = field(default=None, compare=False)

    def rotated(self, r: int) -> "Witness":
        """Witness for the value multiplied by ``exp(2 pi i r / s)``."""
        s = self.s
        return replace(
            self,
            eta=tuple((f + r) % s for f in self.eta),
            pi=None if self.pi is None else tuple((e + r) % (2 * s) for e in self.pi),
            rotation=(self.rotation + r) % s,
            residual=None,
        )

    def sort_key(self):
        return (self.subset, self.eta, self.pi or (), self.rotation, self.eig_index)

    def to_dict(self) -> dict:
        d = {"subset": list(self.subset), "eta": list(self.eta)}
        if self.pi is not None:
            d["pi"] = list(self.pi)
        d["rotation"] = self.rotation
        d["eig_index"] = self.eig_index
        if self.residual is not None:
            d["residual"] = self.residual
        return d

    @classmethod
    def from_dict(cls, d: dict, s: int) -> "Witness":
        pi = d.get("pi")
        return cls(
            subset=tuple(int(v) for v in d["subset"]),
            s=s,
            eta=tuple(int(f) for f in d["eta"]),
            pi=None if pi is None else tuple(int(e) for e in pi),
            rotation=int(d.get("rotation", 0)),
            eig_index=int(d.get("eig_index", -1)),
            residual=d.get("residual"),
        )


@dataclass(frozen=True)
class SpectrumSet:
    values: tuple[complex, ...]
    tol: float
    witnesses: tuple[Witness | None, ...] | None = None

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=complex)

    def contains(self, z: complex, tol: float | None = None) -> bool:
        if not self.values:
            return False
        return bool(np.min(np.abs(self.as_array() - z)) <= (self.tol if tol is None else tol))


def cluster_points(values, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Single-linkage clustering of complex points at threshold ``tol``.

    Returns ``(labels, centroids)``: ``labels[i]`` indexes the canonically
    sorted ``centroids`` array. Exact duplicates are collapsed before pair
    search, so heavy repetition stays cheap.
    """
    vals = np.asarray(values, dtype=complex).ravel()
    if tol <= 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    if not np.all(np.isfinite(vals)):
        raise ValidationError("spectrum values must be finite")
    if vals.size == 0:
        return np.zeros(0, dtype=np.intp), np.zeros(0, dtype=complex)
    pts = np.column_stack([vals.real, vals.imag]) + 0.0
    # Points sharing a grid cell of side GRID_FRACTION * tol are linked anyway;
    # one representative per cell keeps the pair search linear in the number
    # of distinct values. Linkage is exact up to a fuzz of 2 cell diagonals.
    cells = np.floor(pts / (GRID_FRACTION * tol)).astype(np.int64)
    _, inverse, counts = np.unique(cells, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    nu = len(counts)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    rep = np.empty((nu, 2))
    rep[inverse[order]] = pts[order]
    pairs = cKDTree(rep).query_pairs(tol, output_type="ndarray")
    adj = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(nu, nu))
    ncomp, comp = connected_components(adj, directed=False)
    # centroids from the original points, summed in input-independent order
    lab = comp[inverse][order]
    tot = np.bincount(lab, minlength=ncomp).astype(float)
    cre = np.bincount(lab, weights=pts[order, 0], minlength=ncomp) / tot
    cim = np.bincount(lab, weights=pts[order, 1], minlength=ncomp) / tot
    # real parts equal up to tol sort by imaginary part
    order = np.lexsort((cim, np.round(cre / tol)))
    rank = np.empty(ncomp, dtype=np.intp)
    rank[order] = np.arange(ncomp)
    centroids = (cre[order] + 0.0) + 1j * (cim[order] + 0.0)
    return rank[comp[inverse]], centroids


def _pick(labels: np.ndarray, ncl: int, residuals: np.ndarray, tiebreak: np.ndarray) -> np.ndarray:
    # index of the member with smallest (residual, tiebreak) in each cluster
    order = np.lexsort((tiebreak, residuals, labels))
    first = np.ones(len(order), dtype=bool)
    first[1:] = labels[order][1:] != labels[order][:-1]
    best = np.full(ncl, -1, dtype=np.intp)
    best[labels[order][first]] = order[first]
    return best


def merge_spectrum(
    values: Sequence[complex],
    tol: float = DEFAULT_TOL,
    witnesses: Sequence[Witness | None] | None = None,
) -> SpectrumSet:
    """Deduplicate ``values`` by single-linkage clustering at ``tol``.

    Each cluster becomes its centroid. When witnesses are given, each
    cluster keeps the one with the smallest residual.
    """
    vals = np.asarray(list(values), dtype=complex)
    labels, centroids = cluster_points(vals, tol)
    kept = None
    if witnesses is not None:
        witnesses = list(witnesses)
        if len(witnesses) != len(vals):
            raise ValidationError("witnesses must align with values")
        # rank witnesses by a stable key so the choice ignores input order
        keyed = sorted(
            range(len(witnesses)),
            key=lambda i: (witnesses[i] is None, witnesses[i].sort_key() if witnesses[i] else ()),
        )
        tiebreak = np.empty(len(witnesses), dtype=np.intp)
        tiebreak[keyed] = np.arange(len(witnesses))
        resid = np.array(
            [np.inf if w is None or w.residual is None else w.residual for w in witnesses]
        )
        best = _pick(labels, len(centroids), resid, tiebreak)
        kept = tuple(witnesses[i] for i in best)
    return SpectrumSet(tuple(complex(z) for z in centroids), tol, kept)


def rotation_closure(sp: SpectrumSet, s: int) -> SpectrumSet:
    """Close ``sp`` under multiplication by every s-th root of unity."""
    if s < 1:
        raise ValidationError(f"s must be positive, got {s}")
    roots = roots_of_unity(np.arange(s), s)
    vals = (roots[:, None] * sp.as_array()[None, :]).ravel()
    wits = None
    if sp.witnesses is not None:
        wits = [
            None if w is None else (w if r == 0 else w.rotated(r))
            for r in range(s)
            for w in sp.witnesses
        ]
    return merge_spectrum(vals, sp.tol, wits)


@dataclass(frozen=True)
class SpectrumComparison:
    equal: bool
    a_minus_b: tuple[complex, ...]
    b_minus_a: tuple[complex, ...]
    max_matched_distance: float


def compare_spectra(a, b, tol: float = DEFAULT_TOL) -> SpectrumComparison:
    """Match values of ``a`` and ``b`` greedily by distance, up to ``tol``."""
    if tol <= 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    va = np.asarray(list(a), dtype=complex)
    vb = np.asarray(list(b), dtype=complex)
    if va.size and vb.size:
        pa = np.column_stack([va.real, va.imag])
        pb = np.column_stack([vb.real, vb.imag])
        near = cKDTree(pa).query_ball_tree(cKDTree(pb), tol)
        ia = np.array([i for i, js in enumerate(near) for _ in js], dtype=np.intp)
        ib = np.array([j for js in near for j in js], dtype=np.intp)
    else:
        ia = ib = np.zeros(0, dtype=np.intp)
    dist = np.abs(va[ia] - vb[ib])
    keep = dist <= tol
    ia, ib, dist = ia[keep], ib[keep], dist[keep]
    order = np.lexsort((ib, ia, dist))
    used_a = np.zeros(va.size, dtype=bool)
    used_b = np.zeros(vb.size, dtype=bool)
    worst = 0.0
    for i, j, d in zip(ia[order], ib[order], dist[order]):
        if not used_a[i] and not used_b[j]:
            used_a[i] = used_b[j] = True
            worst = max(worst, float(d))
    amb = tuple(complex(z) for z in va[~used_a])
    bma = tuple(complex(z) for z in vb[~used_b])
    return SpectrumComparison(not amb and not bma, amb, bma, worst)

