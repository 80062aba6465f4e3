"""Domain models."""
from .approximation import ApproximationModel, Violation
from .functional_equation import FunctionalEquationData, GammaFactorTerm
from .line import LinePoint, LineSamples, LineScanResult, PointKind, SimplicityRow, SimplicityStatus
from .path import PathSample
from .prediction import DiscrepancyRecord, Prediction, PredictionInput, PsiCase
from .region import (
    Axis,
    ClusterReport,
    CountReport,
    LocatedRoot,
    RectRegion,
    StripPoint,
    StripReport,
    StripSide,
)
from .series import Envelope, SeriesSpec
from .verification import EnvelopePoint, VerificationCheck

__all__ = [
    "ApproximationModel",
    "Axis",
    "ClusterReport",
    "CountReport",
    "DiscrepancyRecord",
    "Envelope",
    "EnvelopePoint",
    "FunctionalEquationData",
    "GammaFactorTerm",
    "LinePoint",
    "LineSamples",
    "LineScanResult",
    "LocatedRoot",
    "PathSample",
    "PointKind",
    "Prediction",
    "PredictionInput",
    "PsiCase",
    "RectRegion",
    "SeriesSpec",
    "SimplicityRow",
    "SimplicityStatus",
    "StripPoint",
    "StripReport",
    "StripSide",
    "VerificationCheck",
    "Violation",
]
