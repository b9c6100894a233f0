"""H/N classification of real eigenvalues of graph blowups.

A real eigenvalue is an H-eigenvalue when some real eigenvector exists and an
N-eigenvalue otherwise. For a real eigenvector ``x`` of ``G^[s]`` with
``lam != 0``, multiplying the block equation at ``v`` by ``x_v`` gives
``lam x_v^(2s) = t_i T_i`` where ``t_i`` is the product over block ``i`` and
``T_i`` the sum of the neighboring block products. So all entries of a block
share one modulus, ``x_v^(2s) = t_i^2``, and ``lam t_i = T_i`` on the support:
``t`` is a nowhere-zero real eigenvector of the *plain* adjacency matrix of
the induced subgraph on the support. Conversely such a ``t`` lifts back. The
classifier searches connected induced subgraphs for that certificate; the
multi-start residual search below is an independent numeric check of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CertificationError, ValidationError
from .graph import Graph, VertexSubset, enumerate_connected_subsets, induced_subgraph
from .hypergraph import (
    CERT_TOL,
    BlowupMap,
    TensorEigenPair,
    UniformHypergraph,
    build_blowup,
    eigen_residual,
    residuals_batch,
    zero_eigenpair,
)

EIG_MATCH = 1e-8
ZERO_COORD = 1e-9
NOWHERE_ZERO_RATIO = 1e-6
MAX_TRIES = 100
ORACLE_FOUND = 1e-6


@dataclass(frozen=True)
class SubsetFailure:
    subset: tuple[int, ...]
    reason: str


@dataclass(frozen=True, eq=False)
class HNVerdict:
    lam: float
    verdict: str  # "H", "N" or "ZERO"
    vector: np.ndarray | None = None
    residual: float | None = None
    subset: tuple[int, ...] | None = None
    examined: tuple[SubsetFailure, ...] = field(default=())
    method: str = "derived-reduction"

    def to_dict(self) -> dict:
        d = {"lambda": self.lam, "verdict": self.verdict, "method": self.method}
        if self.vector is not None:
            d["vector"] = [float(v) for v in self.vector]
            d["residual"] = self.residual
            d["subset"] = list(self.subset)
        if self.examined:
            d["examined"] = [{"subset": list(f.subset), "reason": f.reason} for f in self.examined]
        return d


def _eigenspace_search(m: np.ndarray, lam: float, rng: np.random.Generator):
    w, v = np.linalg.eigh(m)
    basis = v[:, np.abs(w - lam) <= EIG_MATCH]
    if basis.shape[1] == 0:
        return None, f"{lam:.10g} is not an adjacency eigenvalue"
    dead = np.nonzero(np.all(np.abs(basis) <= ZERO_COORD, axis=1))[0]
    if dead.size:
        return None, f"eigenspace vanishes identically at coordinate(s) {dead.tolist()}"
    tries = 1 if basis.shape[1] == 1 else MAX_TRIES
    for _ in range(tries):
        vec = basis[:, 0] if basis.shape[1] == 1 else basis @ rng.standard_normal(basis.shape[1])
        big = np.abs(vec).max()
        if np.abs(vec).min() > NOWHERE_ZERO_RATIO * big:
            vec = vec / big
            return vec * np.sign(vec[0]), ""
    return None, f"no nowhere-zero combination found in {tries} tries"


def nowhere_zero_in_eigenspace(m, lam: float, rng=None) -> np.ndarray | None:
    """A real eigenvector of symmetric ``m`` for ``lam`` with no zero entry.

    Returns None when ``lam`` is not an eigenvalue or every eigenvector has a
    zero coordinate. The result has max-norm 1 and a positive first entry.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or not np.allclose(m, m.T):
        raise ValidationError("expected a real symmetric matrix")
    vec, _ = _eigenspace_search(m, float(lam), np.random.default_rng(rng))
    return vec


def lift_real(bm: BlowupMap, labels, t: np.ndarray) -> np.ndarray:
    """Real blowup vector whose block products are ``t`` on ``labels``.

    Every vertex of block ``i`` gets ``|t_i|**(1/s)``; a negative ``t_i``
    flips the sign of the block representative only.
    """
    s = bm.s
    x = np.zeros(s * bm.base.n)
    for i, ti in zip(labels, t):
        mag = abs(ti) ** (1.0 / s)
        x[s * i:s * i + s] = mag
        if ti < 0:
            x[s * i] = -mag
    return x


def classify_real_eigenvalue(g: Graph, s: int, lam, rng=0) -> HNVerdict:
    """Decide whether the real eigenvalue ``lam`` of ``G^[s]`` is H or N.

    Does not check that ``lam`` is an eigenvalue at all; pass a value taken
    from :func:`blowup_spectrum`.
    """
    if s < 2:
        raise ValidationError(f"blowups need s >= 2, got s={s}")
    lam_c = complex(lam)
    if abs(lam_c.imag) > EIG_MATCH:
        raise ValidationError(f"H/N classification applies to real eigenvalues, got {lam}")
    lam = lam_c.real
    h, bm = build_blowup(g, s)
    if abs(lam) <= EIG_MATCH:
        pair = zero_eigenpair(bm, 0)
        r = eigen_residual(h, pair).max_residual
        return HNVerdict(0.0, "ZERO", pair.x.real.copy(), r, (0,))
    gen = np.random.default_rng(rng)
    adj = g.adjacency()
    failures = []
    for subset in enumerate_connected_subsets(g):
        labels = subset.members
        t, reason = _eigenspace_search(adj[np.ix_(labels, labels)], lam, gen)
        if t is None:
            failures.append(SubsetFailure(tuple(labels), reason))
            continue
        x = lift_real(bm, labels, t)
        r = eigen_residual(h, TensorEigenPair(lam, x)).max_residual
        if r > CERT_TOL:
            raise CertificationError(
                f"real lift for lam={lam} on subset {labels} has residual {r:.3e}; "
                "the subgraph reduction is violated"
            )
        return HNVerdict(lam, "H", x, r, tuple(labels))
    return HNVerdict(lam, "N", examined=tuple(failures))


# --------------------------------------------------------------------------
# numeric oracle


def _pair_scatter(h: UniformHypergraph):
    # (E * P, N * N) map from "product over an edge minus slots p, q" to the
    # Jacobian entries (v, w) and (w, v) of the edge-form adjacency operator
    k, n = h.k, h.n
    slot_pairs = [(p, q) for p in range(k) for q in range(p + 1, k)]
    rows, cols = [], []
    for ei, e in enumerate(h.edges):
        for pi, (p, q) in enumerate(slot_pairs):
            r = ei * len(slot_pairs) + pi
            rows += [r, r]
            cols += [e[p] * n + e[q], e[q] * n + e[p]]
    sc = np.zeros((len(h.edges) * len(slot_pairs), n * n))
    np.add.at(sc, (rows, cols), 1.0)
    keep = np.ones((len(slot_pairs), k), dtype=bool)
    for pi, (p, q) in enumerate(slot_pairs):
        keep[pi, [p, q]] = False
    return sc, keep


def _residual_and_jacobian(h, lam, xs, scatter, keep):
    from .hypergraph import apply_adjacency_batch

    b, n = xs.shape
    k = h.k
    f = np.empty((b, n + 1))
    f[:, :n] = lam * xs ** (k - 1) - apply_adjacency_batch(h, xs)
    f[:, n] = (xs ** 2).sum(axis=1) - 1.0
    jac = np.zeros((b, n + 1, n))
    if len(h.edges):
        xe = xs[:, h.edges]  # (B, E, k)
        prods = np.where(keep[None, None], xe[:, :, None, :], 1.0).prod(axis=-1)  # (B, E, P)
        jac[:, :n, :] = -(prods.reshape(b, -1) @ scatter).reshape(b, n, n)
    idx = np.arange(n)
    jac[:, idx, idx] += lam * (k - 1) * xs ** (k - 2)
    jac[:, n, :] = 2 * xs
    return f, jac


def numeric_real_eigvec_search(
    h: UniformHypergraph, lam: float, restarts: int = 200, rng=0, max_iter: int = 200
) -> tuple[float, np.ndarray]:
    """Best real unit vector for the eigen-equation at ``lam``.

    Runs Levenberg-Marquardt from ``restarts`` random points on the sphere,
    all restarts advancing together, on the equations plus ``|x|^2 = 1``.
    Returns ``(residual, x)`` for the best normalized residual found. A
    residual at or below 1e-6 counts as a real eigenvector; anything larger
    is only evidence, not proof, that none exists.
    """
    if restarts < 1:
        raise ValidationError("restarts must be >= 1")
    gen = np.random.default_rng(rng)
    n = h.n
    xs = gen.standard_normal((restarts, n))
    xs /= np.linalg.norm(xs, axis=1, keepdims=True)
    scatter, keep = _pair_scatter(h)
    mu = np.full(restarts, 1e-3)
    f, jac = _residual_and_jacobian(h, lam, xs, scatter, keep)
    cost = (f ** 2).sum(axis=1)
    eye = np.eye(n)
    for _ in range(max_iter):
        active = cost > 1e-28
        if not active.any():
            break
        jt = jac.transpose(0, 2, 1)
        lhs = jt @ jac + mu[:, None, None] * eye
        step = -np.linalg.solve(lhs, (jt @ f[:, :, None]))[:, :, 0]
        trial = xs + step
        f_new, jac_new = _residual_and_jacobian(h, lam, trial, scatter, keep)
        cost_new = (f_new ** 2).sum(axis=1)
        better = (cost_new < cost) & active
        xs[better], f[better], jac[better], cost[better] = (
            trial[better], f_new[better], jac_new[better], cost_new[better]
        )
        mu = np.where(better, mu / 3, np.minimum(mu * 4, 1e12))
    xs = xs / np.linalg.norm(xs, axis=1, keepdims=True)
    res = residuals_batch(h, np.full(restarts, lam, dtype=complex), xs)
    best = int(np.argmin(res))
    return float(res[best]), xs[best]


# --------------------------------------------------------------------------
# exact certificate for K3, s = 2, lam = -2


def _int_det(rows: list[list[int]]) -> int:
    # fraction-free Bareiss elimination
    a = [list(r) for r in rows]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def k3_minus_two_certificate() -> dict:
    """Exact proof trace that -2 is an N-eigenvalue of the 2-blowup of K3.

    A real eigenvector cannot vanish on any block: neither the blowup of a
    single vertex nor that of an edge has eigenvalue -2. With all blocks
    nonzero, each block pair satisfies ``x_v = +-x_u`` and the signed squares
    ``y_i`` solve ``(A - lam I) y = 0``; an integer determinant shows y = 0.
    """
    from .engine import EngineOptions, blowup_spectrum

    lam, s = -2, 2
    k3 = Graph.complete(3)
    smaller = {}
    for name, g in (("K1", Graph.complete(1)), ("K2", Graph.complete(2))):
        sp = blowup_spectrum(g, s, EngineOptions(certify=True)).spectrum
        smaller[name] = {"spectrum_size": len(sp), "contains_lambda": sp.contains(lam)}
    coeff = [[(1 if k3.has_edge(i, j) else 0) - (lam if i == j else 0) for j in range(3)] for i in range(3)]
    det = _int_det(coeff)
    assert det != 0, "coefficient matrix is singular; the nonexistence argument fails"
    proper_ok = not any(v["contains_lambda"] for v in smaller.values())
    return {
        "graph": "K3",
        "s": s,
        "lambda": lam,
        "proper_induced_subgraphs": smaller,
        "all_blocks_nonzero": proper_ok,
        "coefficient_matrix": coeff,
        "determinant": det,
        "only_trivial_solution": det != 0,
        "verdict": "N" if proper_ok and det != 0 else "undetermined",
    }
