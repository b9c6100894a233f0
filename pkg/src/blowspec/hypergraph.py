"""Uniform hypergraphs, graph blowups and tensor eigenpair certification.

The adjacency tensor is never materialized. For a k-uniform hypergraph the
eigen-equation is applied in its edge form

    lam * x_v**(k-1) == sum over edges e containing v of prod_{u in e, u != v} x_u

which is what :func:`apply_adjacency` evaluates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CertificationError, EigenpairInputError, ValidationError
from .graph import Graph, VertexSubset, induced_subgraph
from .weights import WeightAssignment, adjacency_from_pi

CERT_TOL = 1e-8
ZERO_SNAP = 1e-10


@dataclass(frozen=True, eq=False)
class UniformHypergraph:
    k: int
    n: int
    edges: np.ndarray  # (E, k), each row sorted ascending

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.intp).reshape(-1, self.k)
        edges = np.sort(edges, axis=1)
        if edges.size:
            if edges.min() < 0 or edges.max() >= self.n:
                raise ValidationError("hyperedge vertex out of range")
            if np.any(edges[:, 1:] == edges[:, :-1]):
                raise ValidationError("hyperedge with repeated vertex")
            if len(np.unique(edges, axis=0)) != len(edges):
                raise ValidationError("duplicate hyperedge")
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """Per vertex, the indices of the edges containing it."""
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for idx, e in enumerate(self.edges):
            for v in e:
                inc[v].append(idx)
        return tuple(tuple(i) for i in inc)

    @cached_property
    def _scatter(self) -> np.ndarray:
        # maps flattened (edge, slot) products onto vertices
        sc = np.zeros((self.edges.size, self.n))
        sc[np.arange(self.edges.size), self.edges.ravel()] = 1.0
        return sc

    def to_json(self) -> dict:
        return {"k": self.k, "n": self.n, "edges": self.edges.tolist()}


@dataclass(frozen=True)
class BlowupMap:
    """Block structure of ``G^[s]``: base vertex ``i`` owns ids ``[s*i, s*i+s)``."""

    base: Graph
    s: int

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        s = self.s
        return tuple(tuple(range(s * i, s * i + s)) for i in range(self.base.n))

    @property
    def representative(self) -> tuple[int, ...]:
        return tuple(self.s * i for i in range(self.base.n))


@dataclass(frozen=True, eq=False)
class TensorEigenPair:
    lam: complex
    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=complex)
        if not np.any(x):
            raise ValidationError("tensor eigenvector must be nonzero")
        object.__setattr__(self, "x", x)


@dataclass(frozen=True, eq=False)
class ResidualReport:
    max_residual: float
    per_vertex: np.ndarray
    scale: float

    @property
    def certified(self) -> bool:
        return self.max_residual <= CERT_TOL


def build_blowup(g: Graph, s: int) -> tuple[UniformHypergraph, BlowupMap]:
    """The 2s-uniform blowup hypergraph of ``g``: one hyperedge per edge."""
    if s < 2:
        raise ValidationError(f"blowups need s >= 2, got s={s}")
    rows = [list(range(s * i, s * i + s)) + list(range(s * j, s * j + s)) for i, j in g.edges]
    h = UniformHypergraph(2 * s, s * g.n, np.array(rows, dtype=np.intp).reshape(-1, 2 * s))
    return h, BlowupMap(g, s)


def _others_products(xe: np.ndarray) -> np.ndarray:
    # xe (..., k) -> product of all entries but one, without division
    k = xe.shape[-1]
    ones = np.ones(xe.shape[:-1] + (1,), dtype=xe.dtype)
    pre = np.cumprod(np.concatenate([ones, xe[..., :-1]], axis=-1), axis=-1)
    suf = np.cumprod(np.concatenate([ones, xe[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
    assert pre.shape[-1] == k
    return pre * suf


def apply_adjacency_batch(h: UniformHypergraph, xs: np.ndarray) -> np.ndarray:
    """:func:`apply_adjacency` over the rows of ``xs`` shaped ``(B, n)``."""
    xs = np.asarray(xs)
    if xs.shape[-1] != h.n:
        raise ValidationError(f"vector length {xs.shape[-1]} != hypergraph order {h.n}")
    if len(h.edges) == 0:
        return np.zeros(xs.shape, dtype=np.result_type(xs, float))
    prods = _others_products(xs[..., h.edges])
    return prods.reshape(xs.shape[:-1] + (-1,)) @ h._scatter


def apply_adjacency(h: UniformHypergraph, x) -> np.ndarray:
    """Right-hand side of the edge-form eigen-equation for every vertex."""
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1:
        raise ValidationError("expected a vector")
    return apply_adjacency_batch(h, x[None])[0]


def residuals_batch(h: UniformHypergraph, lams, xs) -> np.ndarray:
    """Normalized max residual for each pair ``(lams[b], xs[b])``."""
    lams = np.asarray(lams, dtype=complex)
    xs = np.asarray(xs, dtype=complex)
    per = np.abs(lams[:, None] * xs ** (h.k - 1) - apply_adjacency_batch(h, xs))
    scale = np.maximum(1.0, np.abs(lams) * np.abs(xs).max(axis=1) ** (h.k - 1))
    return per.max(axis=1, initial=0.0) / scale


def eigen_residual(h: UniformHypergraph, pair: TensorEigenPair) -> ResidualReport:
    x = pair.x
    if x.shape != (h.n,):
        raise ValidationError(f"vector length {x.shape} != hypergraph order {h.n}")
    per = np.abs(pair.lam * x ** (h.k - 1) - apply_adjacency(h, x))
    scale = max(1.0, abs(pair.lam) * float(np.abs(x).max()) ** (h.k - 1))
    return ResidualReport(float(per.max(initial=0.0)) / scale, per, scale)


def lift_batch(bm: BlowupMap, labels, pis: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Tensor eigenvectors built from weighted-subgraph eigenvectors.

    ``labels`` are the original base vertices of the subset; ``pis`` and
    ``ys`` are ``(B, |labels|)`` weight values and eigenvectors of
    ``diag(pi) A diag(pi)``. Entries below ``ZERO_SNAP * |y|_inf`` become
    exact zeros; the whole block is then zero, which still satisfies the
    block equations because every block has at least two vertices.
    """
    s = bm.s
    ys = np.array(ys, dtype=complex)
    ys /= np.abs(ys).max(axis=1, keepdims=True)
    ys[np.abs(ys) < ZERO_SNAP] = 0
    with np.errstate(all="ignore"):
        zs = np.power(ys, 1.0 / s)
    zs[ys == 0] = 0
    xs = np.zeros((ys.shape[0], s * bm.base.n), dtype=complex)
    base = s * np.asarray(labels, dtype=np.intp)
    for off in range(1, s):
        xs[:, base + off] = zs
    xs[:, base] = pis * zs
    return xs


def construct_blowup_eigenvector(
    bm: BlowupMap,
    subset: VertexSubset,
    w: WeightAssignment,
    lam: complex,
    y,
    h: UniformHypergraph | None = None,
) -> TensorEigenPair:
    """Turn an eigenpair of a 2s-weighted induced subgraph into a certified
    eigenpair of the blowup.

    Block ``i`` gets ``pi(i) z_i`` on its representative and ``z_i`` on the
    other vertices, with ``z_i`` the principal s-th root of ``y_i``.
    """
    if lam == 0:
        raise ValidationError("construction requires a nonzero eigenvalue")
    if w.s != bm.s:
        raise ValidationError(f"weights are for s={w.s}, blowup has s={bm.s}")
    sub, labels = induced_subgraph(bm.base, subset)
    m = adjacency_from_pi(sub, w)
    y = np.asarray(y, dtype=complex)
    if y.shape != (len(labels),) or not np.any(y):
        raise EigenpairInputError("eigenvector must be nonzero with one entry per subset vertex")
    bound = 1e-8 * max(1.0, float(np.abs(m).sum(axis=1).max())) * float(np.abs(y).max())
    err = float(np.abs(m @ y - lam * y).max())
    if err > bound:
        raise EigenpairInputError(f"(lam, y) residual {err:.3e} exceeds {bound:.3e}")
    x = lift_batch(bm, labels, w.values()[None], y[None])[0]
    pair = TensorEigenPair(complex(lam), x)
    if h is None:
        h, _ = build_blowup(bm.base, bm.s)
    report = eigen_residual(h, pair)
    if not report.certified:
        raise CertificationError(
            f"constructed eigenvector for lam={lam} has residual {report.max_residual:.3e}"
        )
    return pair


def zero_eigenpair(bm: BlowupMap, vertex: int = 0) -> TensorEigenPair:
    """Eigenvalue 0 with a vector supported on one blowup vertex."""
    x = np.zeros(bm.s * bm.base.n, dtype=complex)
    x[bm.s * vertex] = 1.0
    return TensorEigenPair(0j, x)
