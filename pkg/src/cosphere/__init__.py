"""Singular reduction of cosphere bundles at zero momentum.

Two entry points: build an :class:`IsotropyPoset` by hand (or from JSON)
and stratify it with :func:`cl_stratification`, or start from a concrete
:class:`TorusActionSpec` on R^{2n} and let :func:`build_isotropy_poset`
derive the poset.  The ``phase``/``reeb``/``checks`` layers verify the
combinatorial answers numerically on the builtin fixtures.
"""

from .fixtures import BUILTIN_FIXTURES, Fixture, get_fixture, s1_on_r2, t2_on_r4
from .phase import (
    InvariantVector,
    PhasePoint,
    check_reduced_membership,
    classify_point,
    hilbert_map,
    invariants,
    k0_project,
    momentum,
    sample_zero_level,
)
from .poset import (
    IsotropyPoset,
    OrbitType,
    ValidationReport,
    hasse_edges,
    is_subconjugate,
    poset_from_json,
    poset_to_dot,
    poset_to_json,
    principal_type,
    transitive_closure,
    validate,
)
from .reeb import Trajectory, flow_exact, flow_invariants_closed, flow_rk4, reeb_field
from .strata import (
    StratificationResult,
    Stratum,
    StratumKind,
    cl_stratification,
    classify_seam,
    contact_strata,
    secondary_strata,
    semifree_decomposition,
    single_type_reduce,
    starred_lattice,
    zero_level_types,
)
from .torus import (
    SupportStabilizer,
    TorusActionSpec,
    build_isotropy_poset,
    is_almost_semifree,
    lifted_action_is_free,
    spec_from_json,
    spec_to_json,
    stabilizer_of_support,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_FIXTURES",
    "Fixture",
    "InvariantVector",
    "IsotropyPoset",
    "OrbitType",
    "PhasePoint",
    "StratificationResult",
    "Stratum",
    "StratumKind",
    "SupportStabilizer",
    "TorusActionSpec",
    "Trajectory",
    "ValidationReport",
    "build_isotropy_poset",
    "check_reduced_membership",
    "cl_stratification",
    "classify_point",
    "classify_seam",
    "contact_strata",
    "flow_exact",
    "flow_invariants_closed",
    "flow_rk4",
    "get_fixture",
    "hasse_edges",
    "hilbert_map",
    "invariants",
    "is_almost_semifree",
    "is_subconjugate",
    "k0_project",
    "lifted_action_is_free",
    "momentum",
    "poset_from_json",
    "poset_to_dot",
    "poset_to_json",
    "principal_type",
    "reeb_field",
    "s1_on_r2",
    "sample_zero_level",
    "secondary_strata",
    "semifree_decomposition",
    "single_type_reduce",
    "spec_from_json",
    "spec_to_json",
    "stabilizer_of_support",
    "starred_lattice",
    "t2_on_r4",
    "transitive_closure",
    "validate",
    "zero_level_types",
]
