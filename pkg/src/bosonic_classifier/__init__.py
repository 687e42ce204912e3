"""Bosonic data re-uploading classifier on two-mode N-photon linear optics."""

from .circuit import (
    CircuitSpec,
    ElementSpec,
    EncodingSpec,
    Kind,
    classify,
    forward,
    forward_sampled,
    reference_circuit,
    resolve_phases,
)
from .data import Dataset, LabeledPoint, gen_circle
from .fock import FockUnitary, FockVector, ModeUnitary, lift_unitary
from .metrics import ConfusionMatrix, evaluate, rates
from .trainer import TrainConfig, cost, train
from .trigpoly import TrigPoly, probe_phases, recover_trig_poly

__all__ = [
    "CircuitSpec",
    "ConfusionMatrix",
    "Dataset",
    "ElementSpec",
    "EncodingSpec",
    "FockUnitary",
    "FockVector",
    "Kind",
    "LabeledPoint",
    "ModeUnitary",
    "TrainConfig",
    "TrigPoly",
    "classify",
    "cost",
    "evaluate",
    "forward",
    "forward_sampled",
    "gen_circle",
    "lift_unitary",
    "reference_circuit",
    "probe_phases",
    "rates",
    "recover_trig_poly",
    "resolve_phases",
    "train",
]
