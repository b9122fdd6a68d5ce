"""Closed parametrized hypersurfaces and their first/second-order geometry.

A hypersurface of dimension n+1 sits in Euclidean space of dimension n+2
and is described by one or more charts.  Each chart supplies a vectorized
position map together with first (and ideally second) partial derivatives.
From those this module derives the induced metric, the chart volume
factor, the unit normal (the normal map into the sphere), the derivative
of the normal, and the second fundamental form in any orthonormal frame.

Evaluation contracts are batched: parameter points are arrays of shape
(B, p) with p = n+1, positions are (B, q) with q = n+2.  The public
single-point operations wrap the batched kernels.
"""

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from ._finitediff import partial_stack
from .errors import DegenerateImmersion, FrameNotOrthonormal

# Relative rank threshold: the cross product of the tangent vectors must
# exceed this times the product of their norms, else the chart differential
# is treated as rank-deficient.
_DEGENERACY_RTOL = 1e-12

_FRAME_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class SurfaceMetadata:
    """Catalog identity and topological data supplied by the user."""

    key: str = ""
    name: str = ""
    betti: tuple[int, ...] | None = None
    euler_characteristic: int | None = None


@dataclass(frozen=True)
class Chart:
    """One parametrized patch of a hypersurface.

    ``position`` maps (B, p) parameter points to (B, q) ambient points;
    ``first_partials`` returns (B, q, p) with column a holding dF/du_a;
    ``second_partials`` returns (B, q, p, p) with [:, :, a, b] = d2F/du_a du_b.
    If ``second_partials`` is omitted a finite-difference wrapper around
    ``first_partials`` is installed.
    """

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    periodic: tuple[bool, ...]
    position: Callable[[np.ndarray], np.ndarray]
    first_partials: Callable[[np.ndarray], np.ndarray]
    second_partials: Callable[[np.ndarray], np.ndarray] | None = None
    weight_fraction: float = 1.0

    def __post_init__(self):
        if not (len(self.lo) == len(self.hi) == len(self.periodic)):
            raise ValueError("lo, hi and periodic must have equal length")
        if self.second_partials is None:
            fd = partial_stack(self.first_partials, self.lo, self.hi)
            object.__setattr__(self, "second_partials", fd)

    @property
    def dim(self) -> int:
        return len(self.lo)

    def midpoint(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.lo) + np.asarray(self.hi))


@dataclass(frozen=True)
class ChartedHypersurface:
    """A closed oriented immersed hypersurface given by charts.

    ``n_intrinsic`` is the parameter n: the surface has dimension n+1 and
    the ambient space dimension n+2.  ``orientation_sign`` globally flips
    the computed normal; with +1 the tangent basis followed by the normal
    is positively oriented in the ambient space.
    """

    n_intrinsic: int
    charts: tuple[Chart, ...]
    orientation_sign: int = 1
    metadata: SurfaceMetadata = field(default_factory=SurfaceMetadata)

    def __post_init__(self):
        if self.n_intrinsic < 1:
            raise ValueError("n_intrinsic must be >= 1")
        if self.orientation_sign not in (-1, 1):
            raise ValueError("orientation_sign must be +1 or -1")
        if not self.charts:
            raise ValueError("at least one chart required")
        p, q = self.dim, self.ambient_dim
        for i, chart in enumerate(self.charts):
            if chart.dim != p:
                raise ValueError(f"chart {i}: expected {p} coordinates")
            probe = chart.midpoint()[None, :]
            pos = np.asarray(chart.position(probe))
            if pos.shape != (1, q):
                raise ValueError(
                    f"chart {i}: position returned shape {pos.shape}, "
                    f"expected (1, {q}); ambient dimension must be n+2"
                )
            jac = np.asarray(chart.first_partials(probe))
            if jac.shape != (1, q, p):
                raise ValueError(f"chart {i}: first_partials shape {jac.shape}")

    @property
    def dim(self) -> int:
        return self.n_intrinsic + 1

    @property
    def ambient_dim(self) -> int:
        return self.n_intrinsic + 2


@dataclass(frozen=True)
class PointGeometry:
    """First-order data at a chart point."""

    position: np.ndarray        # (q,)
    tangent_basis: np.ndarray   # (p, q) rows dF/du_a
    metric: np.ndarray          # (p, p)
    volume_factor: float        # sqrt(det metric)
    normal: np.ndarray          # (q,) unit


class GeometryBatch(NamedTuple):
    position: np.ndarray       # (B, q)
    jacobian: np.ndarray       # (B, q, p)
    metric: np.ndarray         # (B, p, p)
    volume_factor: np.ndarray  # (B,)
    normal: np.ndarray         # (B, q)
    dnormal: np.ndarray | None  # (B, p, q), row a = dN/du_a
    second: np.ndarray | None   # (B, q, p, p)


def generalized_cross(vectors: np.ndarray) -> np.ndarray:
    """Vector orthogonal to p = q-1 vectors in q-space (Hodge dual).

    ``vectors`` has shape (..., p, q) with the vectors as rows.  The result
    X satisfies <X, y> = det[v_1 | ... | v_p | y] for every y, so the rows
    followed by X are positively oriented and |X| equals the p-volume they
    span.
    """
    vs = np.asarray(vectors, dtype=float)
    p, q = vs.shape[-2], vs.shape[-1]
    if q != p + 1:
        raise ValueError(f"need q = p+1 vectors, got {p} vectors in R^{q}")
    cols = np.swapaxes(vs, -1, -2)  # (..., q, p)
    minors = np.stack(
        [np.delete(cols, i, axis=-2) for i in range(q)], axis=-3
    )  # (..., q, p, p)
    dets = np.linalg.det(minors)
    signs = np.where((np.arange(q) + p) % 2 == 0, 1.0, -1.0)
    return dets * signs


def _as_batch(u: np.ndarray) -> tuple[np.ndarray, bool]:
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        return u[None, :], True
    return u, False


def _raise_degenerate(U, bad):
    idx = int(np.argmax(bad))
    pt = np.asarray(U)[idx]
    raise DegenerateImmersion(
        f"chart differential rank-deficient at u={pt.tolist()}"
    )


def geometry_batch(
    surface: ChartedHypersurface,
    chart_index: int,
    U: np.ndarray,
    second: bool = True,
) -> GeometryBatch:
    """Evaluate chart geometry at a batch of parameter points.

    With ``second=True`` the derivative of the unit normal is included,
    obtained by differentiating the normalized cross product of the chart
    tangent vectors through the second partials.
    """
    chart = surface.charts[chart_index]
    U = np.asarray(U, dtype=float)
    B, p = U.shape
    q = p + 1
    sgn = float(surface.orientation_sign)

    F = np.asarray(chart.position(U), dtype=float)
    J = np.asarray(chart.first_partials(U), dtype=float)
    tangents = np.swapaxes(J, -1, -2)  # (B, p, q)

    G = generalized_cross(tangents)  # (B, q)
    Gnorm = np.linalg.norm(G, axis=-1)
    tan_norms = np.linalg.norm(tangents, axis=-1)  # (B, p)
    scale = np.prod(tan_norms, axis=-1)
    bad = Gnorm <= _DEGENERACY_RTOL * scale
    if np.any(bad):
        _raise_degenerate(U, bad)
    normal = sgn * G / Gnorm[:, None]

    g = np.einsum("xqa,xqb->xab", J, J)
    det_g = np.linalg.det(g)
    volume_factor = np.sqrt(det_g)

    dnormal = None
    H2 = None
    if second:
        H2 = np.asarray(chart.second_partials(U), dtype=float)
        # dG/du_a by multilinearity: replace tangent row b with d(dF/du_b)/du_a.
        stacks = []
        for b in range(p):
            s = np.repeat(tangents[:, None, :, :], p, axis=1)  # (B, p_a, p, q)
            s[:, :, b, :] = np.moveaxis(H2[:, :, b, :], -1, 1)
            stacks.append(s)
        rep = np.stack(stacks, axis=1)  # (B, p_b, p_a, p, q)
        dG = np.sum(generalized_cross(rep), axis=1)  # (B, p_a, q)
        nh = G / Gnorm[:, None]
        proj = np.einsum("xq,xaq->xa", nh, dG)
        dnormal = sgn * (dG - proj[:, :, None] * nh[:, None, :]) / Gnorm[:, None, None]

    return GeometryBatch(F, J, g, volume_factor, normal, dnormal, H2)


def tangent_coefficients(geo: GeometryBatch, X: np.ndarray) -> np.ndarray:
    """Chart-basis coefficients of tangent directions.

    ``X`` has shape (B, m, q); returns c of shape (B, p, m) solving
    J c = X in the least-squares sense via the metric (exact for tangent X).
    """
    rhs = np.einsum("xqa,xmq->xam", geo.jacobian, X)
    return np.linalg.solve(geo.metric, rhs)


def normal_derivative(geo: GeometryBatch, X: np.ndarray) -> np.ndarray:
    """Ambient directional derivative of the unit normal along tangent X.

    ``X`` shape (B, m, q) -> (B, m, q), chain rule through the chart.
    """
    c = tangent_coefficients(geo, X)
    return np.einsum("xam,xaq->xmq", c, geo.dnormal)


def second_fundamental_form(
    geo: GeometryBatch, frame: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Matrix <D_{E_A} N, E_B> over an orthonormal tangent frame.

    ``frame`` has shape (B, p, q) with the frame vectors as rows.  Returns
    the symmetrized matrix and the max-entry asymmetry of the raw one.
    """
    DN = normal_derivative(geo, frame)
    h_raw = np.einsum("xmq,xkq->xmk", DN, frame)
    h_t = np.swapaxes(h_raw, -1, -2)
    asym = np.max(np.abs(h_raw - h_t), axis=(-2, -1))
    return 0.5 * (h_raw + h_t), asym


def unit_normal(surface: ChartedHypersurface, chart_index: int, u) -> np.ndarray:
    """Outward-convention unit normal at a chart point.

    The normal is the normalized generalized cross product of the chart
    tangent vectors times ``orientation_sign``, so the tangent basis
    followed by the normal is positively oriented when the sign is +1.
    """
    U, single = _as_batch(u)
    geo = geometry_batch(surface, chart_index, U, second=False)
    return geo.normal[0] if single else geo.normal


def point_geometry(surface: ChartedHypersurface, chart_index: int, u) -> PointGeometry:
    """Bundle position, tangent basis, metric, volume factor and normal."""
    U, _ = _as_batch(u)
    geo = geometry_batch(surface, chart_index, U, second=False)
    return PointGeometry(
        position=geo.position[0],
        tangent_basis=np.swapaxes(geo.jacobian[0], -1, -2),
        metric=geo.metric[0],
        volume_factor=float(geo.volume_factor[0]),
        normal=geo.normal[0],
    )


def shape_operator(
    surface: ChartedHypersurface,
    chart_index: int,
    u,
    frame: np.ndarray,
    return_asymmetry: bool = False,
):
    """Second fundamental form h_AB = <D_{E_A} N, E_B> in the given frame.

    ``frame`` is (p, q), rows orthonormal and tangent within 1e-10.  The
    returned matrix is explicitly symmetrized; pass ``return_asymmetry``
    to also obtain the max-entry asymmetry of the raw matrix.
    """
    U, _ = _as_batch(u)
    E = np.asarray(frame, dtype=float)[None, :, :]
    p = surface.dim
    if E.shape[1:] != (p, p + 1):
        raise FrameNotOrthonormal(f"frame must have shape ({p}, {p + 1})")
    gram = np.einsum("xmq,xkq->xmk", E, E)
    if np.max(np.abs(gram - np.eye(p))) > _FRAME_ORTHO_TOL:
        raise FrameNotOrthonormal("frame fails orthonormality tolerance 1e-10")
    geo = geometry_batch(surface, chart_index, U, second=True)
    h, asym = second_fundamental_form(geo, E)
    if return_asymmetry:
        return h[0], float(asym[0])
    return h[0]


def shape_determinant_batch(
    surface: ChartedHypersurface, chart_index: int, U: np.ndarray
) -> np.ndarray:
    """det of the normal-map differential, frame-free.

    Computed in the chart basis as det(<dN/du_a, dF/du_b>) / det(metric);
    equals the determinant of the second fundamental form in any
    orthonormal frame.
    """
    geo = geometry_batch(surface, chart_index, U, second=True)
    K = np.einsum("xaq,xqb->xab", geo.dnormal, geo.jacobian)
    return np.linalg.det(K) / np.linalg.det(geo.metric)
