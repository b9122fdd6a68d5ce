"""Pointwise mixed invariants of curvature and field derivatives.

Tilting the unit normal toward the unit field by t gives a sphere-valued
map whose differential, written in adapted frames, has columns
H_j + t V_j (j = 1..n) and sqrt(1+t^2) H_{n+1}.  Its determinant is
sqrt(1+t^2) * sum_k eta_k t^k; the coefficients eta_k are column
replacement determinant sums and are what this module computes.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ._reduction import KahanAccumulator
from .errors import IndexOutOfRange
from .fields import ShapeData


@dataclass(frozen=True)
class ColumnSystem:
    """Column data for the invariant determinants.

    ``H`` is the (p, p) symmetric curvature matrix whose j-th column is
    H_j; ``V`` is (p, n) whose j-th column is (a_1j, ..., a_nj, vvec_j).
    Leading batch axes are allowed on both.
    """

    H: np.ndarray
    V: np.ndarray

    @classmethod
    def from_shape_data(cls, sd: ShapeData) -> "ColumnSystem":
        a = np.asarray(sd.a)
        vv = np.asarray(sd.vvec)
        V = np.concatenate([a, vv[..., None, :]], axis=-2)
        return cls(H=np.asarray(sd.h), V=V)

    @property
    def n(self) -> int:
        return self.V.shape[-1]


@dataclass(frozen=True)
class EtaVector:
    """Values eta_0 .. eta_n (trailing axis when batched)."""

    values: np.ndarray

    def __getitem__(self, k):
        return self.values[..., k]


def _subset_matrix(cols: ColumnSystem, subset) -> np.ndarray:
    M = np.array(cols.H, copy=True)
    for j in subset:
        M[..., :, j] = cols.V[..., :, j]
    return M


def eta(k: int, cols: ColumnSystem) -> np.ndarray:
    """Sum over k-subsets S of {1..n} of det(columns: V_j if j in S else H_j).

    Column n+1 is always H_{n+1}.  Subsets are enumerated in lexicographic
    order and summed with Kahan compensation, so the result is
    bit-reproducible.
    """
    n = cols.n
    if not 0 <= k <= n:
        raise IndexOutOfRange(f"k={k} outside [0, {n}]")
    subsets = list(combinations(range(n), k))
    mats = np.stack([_subset_matrix(cols, s) for s in subsets], axis=0)
    dets = np.linalg.det(mats)
    acc = KahanAccumulator(dets.shape[1:])
    for i in range(len(subsets)):
        acc.add(dets[i])
    return acc.total


def eta_all(cols: ColumnSystem) -> EtaVector:
    """All eta_k at once, reusing one pass of subset enumeration."""
    n = cols.n
    order = [(k, s) for k in range(n + 1) for s in combinations(range(n), k)]
    mats = np.stack([_subset_matrix(cols, s) for _, s in order], axis=0)
    dets = np.linalg.det(mats)
    accs = [KahanAccumulator(dets.shape[1:]) for _ in range(n + 1)]
    for i, (k, _) in enumerate(order):
        accs[k].add(dets[i])
    values = np.stack([acc.total for acc in accs], axis=-1)
    return EtaVector(values=values)


def tilt_jacobian(cols: ColumnSystem, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Differential of the tilted normal map and its determinant.

    Columns are H_j + t V_j for j <= n and sqrt(1+t^2) H_{n+1} last.
    t = 0 is accepted and gives det = eta_0.
    """
    n = cols.n
    M = np.array(cols.H, copy=True)
    M[..., :, :n] = M[..., :, :n] + t * cols.V
    M[..., :, n] = np.sqrt(1.0 + t * t) * cols.H[..., :, n]
    return M, np.linalg.det(M)
