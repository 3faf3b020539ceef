from .uncertain import NormalRV, LinearUncertain, LinearNormalURV, Criterion, CriterionKind
from .posynomial import Monomial, Posynomial, GPProblem, DualProblem, DualSolution
from .program import (
    UncertainTerm, NormalTerm, URGPProblem, StochasticGP,
    ChanceRow, DeterministicProgram, AuxBinding, LiftedGP
)
from .results import (
    SolveConfig, SolveStatus, PrimalSolution, PipelineResult, SweepRow,
    EndpointPolicy, MCConfig, MCReport
)

__all__ = [
    'NormalRV', 'LinearUncertain', 'LinearNormalURV', 'Criterion', 'CriterionKind',
    'Monomial', 'Posynomial', 'GPProblem', 'DualProblem', 'DualSolution',
    'UncertainTerm', 'NormalTerm', 'URGPProblem', 'StochasticGP',
    'ChanceRow', 'DeterministicProgram', 'AuxBinding', 'LiftedGP',
    'SolveConfig', 'SolveStatus', 'PrimalSolution', 'PipelineResult', 'SweepRow',
    'EndpointPolicy', 'MCConfig', 'MCReport'
]
