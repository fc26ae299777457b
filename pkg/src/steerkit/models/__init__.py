"""Domain value types."""
from steerkit.models.assemblage import Assemblage, CorrelationTable
from steerkit.models.certificates import (
    AlphaStarResult,
    DeterministicStrategy,
    FeasibilityReport,
    FeasibilityStatus,
    LocalStateEnsemble,
    OneWayReport,
    SteeringInequality,
)
from steerkit.models.lhs import (
    HiddenVariable,
    ModelParameters,
    ModelVerification,
    PairCheck,
    ProtocolStatistics,
)
from steerkit.models.search import CampaignRow, RestartTrace, SearchConfig, SearchResult
from steerkit.models.state import MeasurementSet, TwoQubitState

__all__ = [
    'Assemblage', 'CorrelationTable', 'AlphaStarResult', 'DeterministicStrategy',
    'FeasibilityReport', 'FeasibilityStatus', 'LocalStateEnsemble', 'OneWayReport',
    'SteeringInequality', 'HiddenVariable', 'ModelParameters', 'ModelVerification',
    'PairCheck', 'ProtocolStatistics', 'CampaignRow', 'RestartTrace',
    'SearchConfig', 'SearchResult', 'MeasurementSet', 'TwoQubitState',
]
