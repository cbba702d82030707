"""Hyperbolic polyhedra, de Sitter duals, cone-spherical metrics and
dihedral-angle admissibility checks in the Minkowski model."""

from hyperpoly.minkowski import (
    CausalClass,
    DSPoint,
    GeometryError,
    HPlane,
    HPoint,
    MVector,
    ProjectiveCenter,
    classify,
    desitter_distance,
    hyperbolic_distance,
    inner,
    projective_inverse,
    projective_map,
)
from hyperpoly.pogorelov import (
    DeformationField,
    PogorelovContext,
    discrete_lie_residual,
    global_map,
    infinitesimal_map,
    norm_difference_residual,
    pushforward_field,
    supporting_center,
)
from hyperpoly.polyhedron import (
    Combinatorics,
    ProjectivePolyhedron,
    corner_angle,
    dihedral_angle,
    exterior_angle,
    face_area,
    from_planes,
    validate,
)
from hyperpoly.duality import (
    DualPolyhedron,
    cone_angle_report,
    dual,
    dual_metric,
)
from hyperpoly.conemetric import (
    ConeSphericalMetric,
    GeodesicPath,
    SphericalTriangle,
    build_cap_complex,
    find_short_closed_geodesic,
    geodesic_trace,
    hemisphere_cap,
    length_vector,
    metric_to_lengths,
    path_self_intersects,
    recover_combinatorics,
    trace_from_corner,
)
from hyperpoly.angles import (
    WeightedDualGraph,
    check_angle_admissibility,
    check_cycle_condition,
    check_path_condition,
    consistency_with_metric,
)
from hyperpoly.truncation import (
    hyperideal_angles,
    polar_plane,
    truncate,
    untruncate,
)
from hyperpoly.tracing import KERNEL_BACKEND

__version__ = "0.1.0"
