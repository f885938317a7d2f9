"""Grover search with arbitrary initial amplitudes.

``gal.analytic`` predicts amplitude dynamics and success probability in
closed form, ``gal.statevector`` runs the literal iteration on a full state
vector, and ``gal.planner`` turns predictions into measurement schedules.
"""

from .analytic import (
    EllipseGeometry,
    ProbabilityProfile,
    Regime,
    SpectralParams,
    compute_spectral,
    ellipse_geometry,
    mean_amplitudes,
    probability_profile,
    reconstruct_amplitude,
    reconstruct_vector,
    recursion_step_exact,
    success_probability,
)
from .core import (
    DiffusionKernel,
    InitialMoments,
    SearchInstance,
    StateVector,
    Tolerances,
    moments_of,
    validate_instance,
)
from .distributions import DistributionSpec, Kind, generate
from .planner import (
    MeasurementPlan,
    Strategy,
    TwoTimePlan,
    expected_repetitions,
    optimal_measurement_times,
    robust_two_time_plan,
)
from .statevector import (
    DiffusionMethod,
    SimConfig,
    Simulator,
    diffusion_wht,
    grover_run,
    invert_about_average,
    marked_probability,
    oracle_flip,
)

__version__ = "0.1.0"
