"""Eigenvalues of ``G^[s]`` from the weighted induced subgraphs of ``G``.

A complex number is an eigenvalue of the blowup exactly when it is an
eigenvalue of some induced subgraph of ``G`` carrying 2s-th root of unity
vertex weights. The engine enumerates those (subgraph, weighting) work items,
solves each small matrix, lifts every nonzero eigenpair back to a tensor
eigenvector of the blowup and keeps only certified values.

Three reductions keep the enumeration small, and each can be switched off:

* eta-space: the weighted spectrum depends only on the squares of the weights,
  so s choices per vertex instead of 2s;
* rotation quotient: scaling all weights by a common root of unity rotates the
  whole spectrum, so the minimum vertex of each subset is pinned and the
  result is closed under s-th root rotations afterwards;
* connectivity: a disconnected subgraph's spectrum is the union of its
  components' spectra, which are enumerated on their own.
"""

from __future__ import annotations

import logging
import time
from functools import lru_cache
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import CertificationError, ValidationError
from .graph import Graph, VertexSubset, enumerate_all_subsets, enumerate_connected_subsets, induced_subgraph
from .hypergraph import (
    CERT_TOL,
    build_blowup,
    construct_blowup_eigenvector,
    eigen_residual,
    lift_batch,
    residuals_batch,
    zero_eigenpair,
)
from .spectra import (
    DEFAULT_TOL,
    SpectrumComparison,
    SpectrumSet,
    Witness,
    cluster_points,
    compare_spectra,
    complex_eigenpairs,
    eig_batch,
)
from .weights import EtaAssignment, WeightAssignment, adjacency_from_pi, pi_matrices, roots_of_unity

log = logging.getLogger(__name__)

SOFT_MAX_N = 16
# assignments solved per eig call; bounds memory for large subsets
_BATCH = 4096


@dataclass(frozen=True)
class EngineOptions:
    tol: float = DEFAULT_TOL
    use_eta_reduction: bool = True
    use_rotation_quotient: bool = True
    use_connected_reduction: bool = True
    certify: bool = True
    worker_count: int = 1

    def __post_init__(self):
        if not self.tol > 0:
            raise ValidationError(f"tol must be positive, got {self.tol}")
        if self.worker_count < 1:
            raise ValidationError(f"worker_count must be >= 1, got {self.worker_count}")

    def reductions(self) -> dict:
        return {
            "eta": self.use_eta_reduction,
            "rotation_quotient": self.use_rotation_quotient,
            "connected": self.use_connected_reduction,
        }


@dataclass(frozen=True)
class SpectrumReport:
    spectrum: SpectrumSet
    s: int
    options: EngineOptions
    certified: tuple[float, ...] | None
    counts: dict = field(default_factory=dict)

    @property
    def values(self) -> tuple[complex, ...]:
        return self.spectrum.values


def _assignments(k: int, base: int, pin_first: bool, start: int, stop: int) -> np.ndarray:
    # rows are base-`base` digit expansions of codes start..stop-1, first digit most significant
    free = k - 1 if pin_first else k
    codes = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((len(codes), free), dtype=np.int64)
    for col in range(free - 1, -1, -1):
        digits[:, col] = codes % base
        codes //= base
    if pin_first:
        digits = np.concatenate([np.zeros((len(digits), 1), dtype=np.int64), digits], axis=1)
    return digits


def _solve_chunk(g: Graph, s: int, opts: EngineOptions, masks: list[int]) -> dict:
    """Solve every work item of the given subsets.

    Records come out in a fixed order (subset, assignment, eigen-index,
    rotation), so the concatenation over chunks is independent of how the
    subsets were split across workers.
    """
    h, bm = build_blowup(g, s) if opts.certify else (None, None)
    adj = g.adjacency()
    eta_space = opts.use_eta_reduction
    base = s if eta_space else 2 * s
    rots = np.arange(s) if opts.use_rotation_quotient else np.zeros(1, dtype=np.int64)
    rot_phase = roots_of_unity(rots, s)

    items: list[tuple[int, tuple[int, ...]]] = []
    out_val, out_res, out_item, out_rot, out_eig = [], [], [], [], []
    n_matrices = 0
    for mask in masks:
        labels = VertexSubset(g.n, mask).members
        k = len(labels)
        sub = adj[np.ix_(labels, labels)]
        total = base ** (k - 1 if opts.use_rotation_quotient else k)
        for start in range(0, total, _BATCH):
            exps = _assignments(k, base, opts.use_rotation_quotient, start, min(total, start + _BATCH))
            n_matrices += len(exps)
            # eta exponents f are solved as pi exponents e = f: the complex
            # symmetric form is similar to diag(eta) A and has cheap
            # eigenvalue condition numbers
            mats = pi_matrices(roots_of_unity(exps, 2 * s), sub)
            vals, vecs = eig_batch(mats)
            am, aj = np.nonzero(np.abs(vals) > opts.tol)
            first_item = len(items)
            items.extend((mask, tuple(int(e) for e in row)) for row in exps)
            if am.size == 0:
                continue
            lam0 = vals[am, aj]
            for r, phase in zip(rots, rot_phase):
                lam = lam0 * phase
                if opts.certify:
                    # rotating every pi by exp(i pi r / s) scales the matrix
                    # by exp(2 i pi r / s) and keeps its eigenvectors
                    pis = roots_of_unity((exps[am] + r) % (2 * s), 2 * s)
                    xs = lift_batch(bm, labels, pis, vecs[am, :, aj])
                    res = residuals_batch(h, lam, xs)
                else:
                    res = np.full(lam.shape, np.nan)
                out_val.append(lam)
                out_res.append(res)
                out_item.append(first_item + am)
                out_rot.append(np.full(am.shape, r, dtype=np.int64))
                out_eig.append(aj)
    cat = lambda xs, dt: np.concatenate(xs).astype(dt) if xs else np.zeros(0, dtype=dt)  # noqa: E731
    return {
        "items": items,
        "val": cat(out_val, complex),
        "res": cat(out_res, float),
        "item": cat(out_item, np.int64),
        "rot": cat(out_rot, np.int64),
        "eig": cat(out_eig, np.int64),
        "matrices": n_matrices,
    }


def _split(masks: list[int], cost: list[int], parts: int) -> list[list[int]]:
    # contiguous chunks of roughly equal cost; order preserved
    if parts <= 1 or len(masks) <= 1:
        return [masks]
    target = sum(cost) / parts
    chunks, cur, acc = [], [], 0.0
    for m, c in zip(masks, cost):
        cur.append(m)
        acc += c
        if acc >= target and len(chunks) < parts - 1:
            chunks.append(cur)
            cur, acc = [], 0.0
    if cur:
        chunks.append(cur)
    return chunks


@lru_cache(maxsize=None)
def _labels(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def _witness(item: tuple[int, tuple[int, ...]], rot, eig, s: int, eta_space: bool, res) -> Witness:
    mask, exps = item
    subset = _labels(mask)
    rot = int(rot)
    pi = tuple((e + rot) % (2 * s) for e in exps)
    eta = tuple(e % s for e in pi)
    if eta_space and all(e < s for e in pi):
        # pi is the default square root of eta; leave it implicit
        pi = None
    residual = None if res is None or np.isnan(res) else float(res)
    return Witness(subset, s, eta, pi, int(rot), int(eig), residual)


def blowup_spectrum(g: Graph, s: int, opts: EngineOptions | None = None) -> SpectrumReport:
    """All eigenvalues of the s-blowup of ``g``, with witnesses."""
    opts = opts or EngineOptions()
    if s < 2:
        raise ValidationError(f"blowups need s >= 2, got s={s}")
    if g.n < 1:
        raise ValidationError("graph must have at least one vertex")
    if g.n > SOFT_MAX_N:
        log.warning("n=%d exceeds the soft limit %d; enumeration may be very slow", g.n, SOFT_MAX_N)
    t0 = time.perf_counter()

    enum = enumerate_connected_subsets if opts.use_connected_reduction else enumerate_all_subsets
    # singletons only carry eigenvalue 0, which is inserted directly
    masks = [sub.mask for sub in enum(g) if len(sub) > 1]
    base = s if opts.use_eta_reduction else 2 * s
    cost = [base ** bin(m).count("1") * bin(m).count("1") for m in masks]
    chunks = _split(masks, cost, 4 * opts.worker_count if opts.worker_count > 1 else 1)

    if opts.worker_count > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=opts.worker_count) as pool:
            parts = list(pool.map(_solve_chunk, *zip(*[(g, s, opts, c) for c in chunks])))
    else:
        parts = [_solve_chunk(g, s, opts, c) for c in chunks]

    items: list = []
    vals, res = [np.zeros(1, complex)], [np.zeros(1)]
    item, rot, eig = ([np.zeros(1, np.int64)] for _ in range(3))
    # record 0 is the eigenvalue 0 itself, witnessed by a single vertex
    zero_res = 0.0
    if opts.certify:
        h, bm = build_blowup(g, s)
        zero_res = eigen_residual(h, zero_eigenpair(bm, 0)).max_residual
    res[0][0] = zero_res
    items.append((1, (0,)))
    for p in parts:
        vals.append(p["val"])
        res.append(p["res"])
        item.append(p["item"] + len(items))
        rot.append(p["rot"])
        eig.append(p["eig"])
        items.extend(p["items"])
    vals, res, item, rot, eig = (np.concatenate(a) for a in (vals, res, item, rot, eig))

    labels, centroids = cluster_points(vals, opts.tol)
    order = np.lexsort((np.arange(len(vals)), np.nan_to_num(res, nan=0.0), labels))
    first = np.ones(len(order), dtype=bool)
    first[1:] = labels[order][1:] != labels[order][:-1]
    best = order[first]  # one record per cluster, clusters in canonical order

    witnesses = []
    for b in best.tolist():
        w = _witness(items[item[b]], rot[b], eig[b], s, opts.use_eta_reduction, res[b])
        if b == 0:
            w = Witness((0,), s, (0,), None, 0, -1, float(zero_res) if opts.certify else None)
        witnesses.append(w)

    certified = None
    if opts.certify:
        certified = tuple(float(res[b]) for b in best)
        bad = [(complex(centroids[i]), r) for i, r in enumerate(certified) if not r <= CERT_TOL]
        if bad:
            raise CertificationError(
                f"{len(bad)} eigenvalue(s) failed certification, first {bad[0][0]} "
                f"with residual {bad[0][1]:.3e}"
            )

    # 0 is reported exactly
    zero_cluster = labels[0]
    values = [complex(z) for z in centroids]
    values[zero_cluster] = 0j
    counts = {
        "subsets": len(masks) + g.n,
        "matrices": sum(p["matrices"] for p in parts),
        "records": int(len(vals) - 1),
        "records_over_tolerance": int(np.sum(res[1:] > CERT_TOL)) if opts.certify else 0,
        "values": len(values),
        "wall_ms": (time.perf_counter() - t0) * 1e3,
    }
    spectrum = SpectrumSet(tuple(values), opts.tol, tuple(witnesses))
    return SpectrumReport(spectrum, s, opts, certified, counts)


# --------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class VerificationEntry:
    value: complex
    residual: float | None
    ok: bool
    reason: str = ""


@dataclass(frozen=True)
class VerificationReport:
    entries: tuple[VerificationEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def failures(self) -> list[VerificationEntry]:
        return [e for e in self.entries if not e.ok]


def _witness_weights(w: Witness, s: int) -> WeightAssignment:
    if w.pi is not None:
        return WeightAssignment(s, w.pi)
    return EtaAssignment(s, w.eta).square_root()


def verify_spectrum(g: Graph, s: int, sp: SpectrumSet, tol: float | None = None) -> VerificationReport:
    """Re-derive and certify every value of ``sp`` from its witness alone."""
    tol = sp.tol if tol is None else tol
    if sp.witnesses is None or any(w is None for w in sp.witnesses):
        raise ValidationError("every spectrum value needs a witness to be verified")
    h, bm = build_blowup(g, s)
    entries = []
    for value, w in zip(sp.values, sp.witnesses):
        if w.s != s:
            raise ValidationError(f"witness is for s={w.s}, verifying s={s}")
        subset = VertexSubset.of(g.n, w.subset)
        if abs(value) <= tol:
            r = eigen_residual(h, zero_eigenpair(bm, w.subset[0])).max_residual
            entries.append(VerificationEntry(value, r, r <= CERT_TOL, "" if r <= CERT_TOL else "zero pair rejected"))
            continue
        sub, _ = induced_subgraph(g, subset)
        weights = _witness_weights(w, s)
        pairs = complex_eigenpairs(adjacency_from_pi(sub, weights))
        lam, y = min(pairs, key=lambda p: abs(p[0] - value))
        if abs(lam - value) > tol:
            entries.append(VerificationEntry(
                value, None, False,
                f"not an eigenvalue of the witness matrix (nearest {lam:.6g}, distance {abs(lam - value):.3e})",
            ))
            continue
        if abs(lam) <= tol:
            entries.append(VerificationEntry(value, None, False, "witness eigenvalue is numerically zero"))
            continue
        try:
            pair = construct_blowup_eigenvector(bm, subset, weights, lam, y, h=h)
        except CertificationError as exc:
            entries.append(VerificationEntry(value, None, False, str(exc)))
            continue
        r = eigen_residual(h, pair).max_residual
        entries.append(VerificationEntry(value, r, True))
    return VerificationReport(tuple(entries))


# --------------------------------------------------------------------------
# reduction cross-check

CROSSVAL_CONFIGS = {
    "all_reductions": {},
    "no_eta": {"use_eta_reduction": False},
    "no_rotation_quotient": {"use_rotation_quotient": False},
    "no_connected": {"use_connected_reduction": False},
    "no_reductions": {
        "use_eta_reduction": False,
        "use_rotation_quotient": False,
        "use_connected_reduction": False,
    },
}


@dataclass(frozen=True)
class CrossValidationReport:
    reports: dict
    comparisons: dict  # config name -> SpectrumComparison against all_reductions

    @property
    def equal(self) -> bool:
        return all(c.equal for c in self.comparisons.values())


def cross_validate_reductions(
    g: Graph, s: int, tol: float = DEFAULT_TOL, certify: bool = False, worker_count: int = 1
) -> CrossValidationReport:
    """Run the engine with each reduction disabled and compare to the default."""
    if g.n > 8 or s not in (2, 3, 4):
        raise ValidationError("cross-validation supports n <= 8 and s in {2, 3, 4}")
    base = EngineOptions(tol=tol, certify=certify, worker_count=worker_count)
    reports = {name: blowup_spectrum(g, s, replace(base, **kw)) for name, kw in CROSSVAL_CONFIGS.items()}
    ref = reports["all_reductions"].spectrum
    comparisons: dict[str, SpectrumComparison] = {
        name: compare_spectra(ref, rep.spectrum, tol)
        for name, rep in reports.items()
        if name != "all_reductions"
    }
    return CrossValidationReport(reports, comparisons)
