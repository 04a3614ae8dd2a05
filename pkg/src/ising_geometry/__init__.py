"""Entanglement and Fubini-Study geometry of the all-range Ising spin-1/2 system."""

__version__ = "0.1.0"

from .states import (  # noqa: E402
    BlochAngles,
    FullState,
    OracleCapError,
    SymmetricState,
    SymmetryLeakageWarning,
    SystemConfig,
    embed_full,
    fidelity,
    project_symmetric,
    spin_coherent_state,
)
from .evolution import (  # noqa: E402
    CollectiveHamiltonian,
    PeriodicityReport,
    brute_force_evolve,
    closed_form_evolve,
    collective_hamiltonian,
    detect_period,
    field_evolve,
)
from .entanglement import (  # noqa: E402
    MeanSpinVector,
    entanglement_closed_form,
    entanglement_large_n_limit,
    entanglement_theta_half,
    geometric_entanglement,
    mean_spin,
)
from .geometry import (  # noqa: E402
    CurvatureDomainError,
    CurvatureSample,
    MetricTensor2D,
    PoleProximityError,
    cos2theta_from_curvature,
    curvature_extrema,
    entanglement_vs_curvature,
    evolution_circle_radius,
    fs_metric_fd,
    metric_closed_form,
    negative_curvature_region,
    scalar_curvature,
    scalar_products,
)
from .field_geometry import (  # noqa: E402
    TopologyReport,
    TransformedCoords,
    classify_topology,
    diagonalized_field_metric,
    field_metric_closed_form,
    field_metric_fd,
    transform_coordinates,
)
