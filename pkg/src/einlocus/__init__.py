"""Numerical verification of the Einstein condition on real loci of
Kahler manifolds defined by chart potentials and anti-holomorphic maps."""

__version__ = "0.1.0"

from .antiholo import (
    AntiholoMap,
    FixedLocusParam,
    anti_isometry_residual,
    antiholomorphy_residual,
    find_fixed_point,
    fixed_locus_residual,
    isometry_residual,
    potential_invariance_residual,
    pullback_potential,
    pushforward,
)
from .bundles import (
    ManifoldBundle,
    builtin_cpn,
    builtin_flat_torus,
    builtin_quadric,
    builtin_toric_chart,
    builtin_toric_flat,
    builtin_toric_fs,
    list_builtins,
    make_builtin,
)
from .coords import ChartPoint, RealTangent, apply_J, j_matrix, wirtinger
from .criterion import (
    SpectralVerdict,
    TraceOperatorAt,
    j_normal_curvature,
    mixed_curvature_trace,
    spectral_test,
    trace_operator_at,
)
from .errors import (
    ChartDomainError,
    DegenerateMetricError,
    EinlocusError,
    HypothesesNotVerifiedError,
    JetOrderError,
    NonAnalyticFieldError,
    RankDeficiencyError,
    SpecFormatError,
    UnknownPrimitiveError,
)
from .jets import Jet, JetSpace, jet_space, lift_callable_to_jet
from .locus import (
    FramePair,
    LocusPoint,
    build_frame,
    intrinsic_ricci_on_frame,
    lagrangian_residual,
    locus_point,
    project_tn,
    restricted_ricci,
    second_fundamental_form,
    sff_max_norm,
    totally_real_residual,
)
from .metrics import (
    ChartGeometry,
    HermitianMetric,
    KahlerCurvature,
    PotentialChart,
    christoffel_real,
    curvature_at,
    curvature_endomorphism,
    einstein_residual,
    kahler_form_at,
    lift_to_jet,
    metric_at,
    real_metric_at,
    ricci_form_at,
    riemann_real,
)
from .sampling import SamplingConfig, halton_points, sample_chart_points
from .specfile import bundle_from_dict, bundle_to_dict, load_spec, save_spec
from .verify import (
    EXIT_DEGENERATE,
    EXIT_EINSTEIN,
    EXIT_HYPOTHESES_FAILED,
    EXIT_NOT_EINSTEIN,
    EXIT_USAGE,
    Tolerances,
    VerificationReport,
    run_verify,
    verdict,
)
