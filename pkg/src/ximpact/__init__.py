"""Cross-impact modeling toolkit.

Builds impact matrices from market sufficient statistics, verifies the
behavioural properties of each model numerically, and benchmarks
goodness-of-fit on simulated or user-supplied market panels.
"""

from .models import (
    MODEL_CATALOGUE,
    CovarianceTriple,
    ImpactMatrix,
    ModelId,
    evaluate,
    expected_cost,
    parse_model,
    predict,
)

__version__ = "0.1.0"

__all__ = [
    "CovarianceTriple",
    "ImpactMatrix",
    "ModelId",
    "MODEL_CATALOGUE",
    "evaluate",
    "parse_model",
    "predict",
    "expected_cost",
    "__version__",
]
