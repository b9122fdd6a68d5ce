"""curvint: curvature integrals and normal-map degree for closed hypersurfaces.

Given a closed oriented hypersurface of dimension n+1 in Euclidean
(n+2)-space carrying a unit tangent vector field, curvint computes the
pointwise mixed invariants of the second fundamental form and the field's
covariant derivative, integrates them with spectral tensor-product
quadrature, extracts the degree of the normal map, and verifies the exact
integral identities the degree imposes, together with Betti-number
constraints and a foliation obstruction.
"""

from .catalog import field_names, get_field, get_surface, surface_entry, surface_names
from .degree import (
    DegreeResult,
    EtaCheck,
    FoliationReport,
    MilnorInput,
    MilnorReport,
    VerificationReport,
    foliation_obstruction_report,
    gauss_degree,
    milnor_constraints,
    predicted_integral,
    sphere_volume,
    verify_integral_formula,
)
from .errors import (
    CurvintError,
    DegenerateImmersion,
    FrameNotOrthonormal,
    IndexOutOfRange,
    NonIntegerDegree,
    VanishingField,
)
from .fields import (
    AdaptedFramePoint,
    ShapeData,
    TangentField,
    adapted_frame,
    finite_difference_jacobian,
    normalize_and_project,
    shape_data,
    shape_data_batch,
)
from .invariants import ColumnSystem, EtaVector, eta, eta_all, tilt_jacobian
from .manifold import (
    Chart,
    ChartedHypersurface,
    PointGeometry,
    SurfaceMetadata,
    generalized_cross,
    point_geometry,
    shape_operator,
    unit_normal,
)
from .quadrature import IntegralResult, QuadratureGrid, integrate, integrate_eta

__version__ = "0.1.0"

__all__ = [
    "AdaptedFramePoint",
    "Chart",
    "ChartedHypersurface",
    "ColumnSystem",
    "CurvintError",
    "DegenerateImmersion",
    "DegreeResult",
    "EtaCheck",
    "EtaVector",
    "FoliationReport",
    "FrameNotOrthonormal",
    "IndexOutOfRange",
    "IntegralResult",
    "MilnorInput",
    "MilnorReport",
    "NonIntegerDegree",
    "PointGeometry",
    "QuadratureGrid",
    "ShapeData",
    "SurfaceMetadata",
    "TangentField",
    "VanishingField",
    "VerificationReport",
    "adapted_frame",
    "eta",
    "eta_all",
    "field_names",
    "finite_difference_jacobian",
    "foliation_obstruction_report",
    "gauss_degree",
    "generalized_cross",
    "get_field",
    "get_surface",
    "integrate",
    "integrate_eta",
    "milnor_constraints",
    "normalize_and_project",
    "point_geometry",
    "predicted_integral",
    "shape_data",
    "shape_data_batch",
    "shape_operator",
    "sphere_volume",
    "surface_entry",
    "surface_names",
    "tilt_jacobian",
    "unit_normal",
    "verify_integral_formula",
    "__version__",
]
