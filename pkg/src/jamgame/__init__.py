"""Power-control games between a transmitter and a jammer on fading channels."""

from .channel import FadingModel, QuadratureSpec, discretize, expectation, quantile
from .errors import (
    ConsistencyError,
    ConvergenceError,
    CurveRangeError,
    ExistenceError,
    IntegrationError,
    JamGameError,
    ResolutionError,
    StructureError,
)
from .frame_solver import (
    AffineCurve,
    FrameSolution,
    PeakGameSolution,
    PowerCurve,
    Profile,
    RequiredPower,
    bayes_frame_profiles,
    ergodic_capacity,
    jammer_best_response,
    mean_power,
    nocsi_curve,
    nocsi_mu_prime,
    peak_game_solve,
    required_jam_power,
    required_tx_power_curve,
    solve_problem1,
    solve_problem1_discrete,
    transmitter_best_response,
    waterfill_power,
)
from .mixed_equilibrium import (
    EquilibriumPlay,
    MixedEquilibrium,
    MixedStrategy,
    MonotoneCurve,
    equilibrium_strategies,
    fullcsi_equilibrium,
    hughes_narayan_closed_form,
    nocsi_closed_form,
    sample_strategy,
    solve_general_game,
)
from .montecarlo import (
    SimulationReport,
    deviation_test,
    estimate_outage,
    estimate_payoff,
    standard_deviations,
)
from .pure_strategies import (
    OutageReport,
    maximin_outage,
    minimax_outage,
    nonintelligent_outage,
    peak_outage,
    peak_report,
)

__version__ = "0.1.0"
