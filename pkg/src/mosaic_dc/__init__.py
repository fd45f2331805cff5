"""Multi-objective workload distribution across geo-distributed datacenters.

Plans split each workload type's global arrival rate across datacenters and
choose how much clean energy to buy at each site; they are scored on energy
cost, carbon emissions and water use.
"""

from .decision import DecisionSpace, DistributionPlan, WorkloadDemand, conservation_check
from .errors import (
    BudgetExhausted,
    CapacityError,
    ConfigError,
    MosaicError,
    OversubscriptionError,
    PlanInfeasibleError,
    ScenarioError,
)
from .evaluation import evaluate_plan
from .experiment import RunReport, run_day, sweep
from .models import ObjectiveVector
from .mosaic import MosaicConfig, generate_weights, optimize_epoch, tchebycheff, weighted_sum
from .baselines import BaselineConfig, run_dmgc, run_gald, run_too
from .pareto import ParetoFront, efficient_corners, pareto_filter, phv
from .scenario import Scenario, generate_scenario, load_bundled, load_scenario, save_scenario

__version__ = "0.1.0"
