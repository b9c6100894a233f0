"""Root-of-unity vertex weights and the weighted adjacency matrices they define.

Weights are stored as integer exponents so enumeration is exact; complex
values only appear when a matrix is built.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .graph import Graph


def roots_of_unity(exponents, order: int) -> np.ndarray:
    """``exp(2*pi*i*e/order)`` elementwise, exact for multiples of quarter turns."""
    e = np.mod(np.asarray(exponents, dtype=np.int64), order)
    shape = e.shape
    e = e.ravel()
    # exact values where the angle is a multiple of pi/2
    quarter = (4 * e) % order == 0
    out = np.exp(2j * np.pi * e / order)
    if np.any(quarter):
        q = (4 * e[quarter]) // order
        out[quarter] = np.array([1, 1j, -1, -1j])[q]
    return out.reshape(shape)


def _check_exponents(exponents: Sequence[int], order: int, what: str) -> tuple[int, ...]:
    exps = tuple(int(e) for e in exponents)
    for e in exps:
        if not 0 <= e < order:
            raise ValidationError(f"{what} exponent {e} outside [0, {order})")
    return exps


@dataclass(frozen=True)
class WeightAssignment:
    """Vertex weights ``pi(i) = exp(2*pi*i*e_i / (2s))``, 2s-th roots of unity."""

    s: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        if self.s < 1:
            raise ValidationError(f"s must be positive, got {self.s}")
        object.__setattr__(self, "exponents", _check_exponents(self.exponents, 2 * self.s, "pi"))

    def __len__(self) -> int:
        return len(self.exponents)

    def values(self) -> np.ndarray:
        return roots_of_unity(self.exponents, 2 * self.s)

    def squares(self) -> "EtaAssignment":
        """The assignment ``eta_i = pi(i)**2``."""
        return EtaAssignment(self.s, tuple(e % self.s for e in self.exponents))


@dataclass(frozen=True)
class EtaAssignment:
    """Vertex weights ``eta_i = exp(2*pi*i*f_i / s)``, s-th roots of unity."""

    s: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        if self.s < 1:
            raise ValidationError(f"s must be positive, got {self.s}")
        object.__setattr__(self, "exponents", _check_exponents(self.exponents, self.s, "eta"))

    def __len__(self) -> int:
        return len(self.exponents)

    def values(self) -> np.ndarray:
        return roots_of_unity(self.exponents, self.s)

    def square_root(self) -> WeightAssignment:
        """A pi with ``pi**2 == eta``: takes ``e_i = f_i``."""
        return WeightAssignment(self.s, self.exponents)


def pi_matrices(pis: np.ndarray, adj: np.ndarray) -> np.ndarray:
    """Stack of ``diag(pi) A diag(pi)`` for the rows of ``pis``.

    The lower triangle is mirrored from the upper one: fused multiply-add can
    make ``pi_i pi_j`` and ``pi_j pi_i`` differ in the last bit, and exact
    symmetry is relied on downstream.
    """
    ms = (pis[:, :, None] * pis[:, None, :]) * adj
    lo = np.tril_indices(adj.shape[0], -1)
    ms[:, lo[0], lo[1]] = ms[:, lo[1], lo[0]]
    return ms


def adjacency_from_pi(g: Graph, w: WeightAssignment) -> np.ndarray:
    """Complex symmetric matrix with ``M[i, j] = pi(i) pi(j)`` on edges."""
    if len(w) != g.n:
        raise ValidationError(f"weight assignment has length {len(w)}, graph has {g.n} vertices")
    return pi_matrices(w.values()[None], g.adjacency())[0]


def adjacency_from_eta(g: Graph, h: EtaAssignment) -> np.ndarray:
    """Row-scaled adjacency ``diag(eta) A``.

    Similar to ``adjacency_from_pi`` for any pi squaring to eta, via
    conjugation by ``diag(pi)``.
    """
    if len(h) != g.n:
        raise ValidationError(f"eta assignment has length {len(h)}, graph has {g.n} vertices")
    return h.values()[:, None] * g.adjacency()
