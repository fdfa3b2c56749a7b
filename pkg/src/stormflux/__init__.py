"""Hurricane evacuation and epidemic importation-risk modeling.

Pipeline: fitted Beta participation rates per risk zone and hurricane
category, evacuee counts per county, case exportations via detection-bound
prevalence, and destination dispersion through multinomial-logit OD
matrices, with Monte-Carlo credible intervals throughout.
"""

from .errors import (
    DataFormatError,
    DegenerateChoiceSetError,
    DomainError,
    FitConvergenceError,
    MissingSeriesError,
    ReferentialIntegrityError,
    StormfluxError,
    ValidationError,
)
from .evacmodel import (
    BetaEvacModel,
    EvacObservation,
    fit,
    load_model,
    load_observations,
    predict_rate,
    sample_rate,
    save_model,
)
from .geodata import (
    CensusBlockGroup,
    County,
    Datasets,
    ForecastTrack,
    apply_track,
    great_circle_miles,
    load_datasets,
)
from .odchoice import (
    AccommodationSplit,
    ChoiceCoefficients,
    ODMatrix,
    blend,
    load_coefficients,
    od_probabilities,
)
from .prevalence import DetectionRates, PrevalenceEstimate, estimate_prevalence
from .scenario import (
    CredibleInterval,
    Scenario,
    ScenarioResult,
    compare_scenarios,
    load_scenario,
    run_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "AccommodationSplit",
    "BetaEvacModel",
    "CensusBlockGroup",
    "ChoiceCoefficients",
    "County",
    "CredibleInterval",
    "DataFormatError",
    "Datasets",
    "DegenerateChoiceSetError",
    "DetectionRates",
    "DomainError",
    "EvacObservation",
    "FitConvergenceError",
    "ForecastTrack",
    "MissingSeriesError",
    "ODMatrix",
    "PrevalenceEstimate",
    "ReferentialIntegrityError",
    "Scenario",
    "ScenarioResult",
    "StormfluxError",
    "ValidationError",
    "apply_track",
    "blend",
    "compare_scenarios",
    "estimate_prevalence",
    "fit",
    "great_circle_miles",
    "load_coefficients",
    "load_datasets",
    "load_model",
    "load_observations",
    "load_scenario",
    "od_probabilities",
    "predict_rate",
    "run_scenario",
    "sample_rate",
    "save_model",
]
