from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np
from uncertainties import UFloat
from uncertainties.unumpy import nominal_values, std_devs

from pose_processing.geometry.pose import Pose
from pose_processing.models import DataProduct, DataProductVariable

CLASS_IDS_VAR_NAME = "class_ids"
INSTANCE_COUNT_VAR_NAME = "instance_count"
IOU2D_VAR_NAME = "iou2d"
IOU2D_UNCERTAINTY_VAR_NAME = "iou2d_delta"
VSS_VAR_NAME = "vss"
VSS_UNCERTAINTY_VAR_NAME = "vss_delta"
ADD_VAR_NAME = "add"
ADD_UNCERTAINTY_VAR_NAME = "add_delta"
ADD_SYMMETRIC_VAR_NAME = "add_symmetric"
VSS_NORMALIZATION_VAR_NAME = "vss_normalization"
SCORE_THRESHOLD_VAR_NAME = "score_threshold"
PRECISION_VAR_NAME = "precision"
RECALL_VAR_NAME = "recall"
F1_VAR_NAME = "f1"
AVERAGE_PRECISION_VAR_NAME = "average_precision"

ALL_CLASSES = 0


@dataclass
class GroundTruthInstance:
    class_id: int
    pose: Pose
    box: np.ndarray


@dataclass
class PredictedInstance:
    class_id: int
    pose: Pose
    score: float
    box: np.ndarray


@dataclass
class EvalRecord:
    frame_id: int
    ground_truths: list[GroundTruthInstance] = field(default_factory=list)
    predictions: list[PredictedInstance] = field(default_factory=list)


@dataclass
class DetectionScores:
    """Precision, recall and F1 at each global score threshold, plus all-point interpolated AP.

    precision is the interpolated envelope, never rising as the threshold drops; raw_precision is the plain ratio
    that f1 is computed from.
    """
    thresholds: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    average_precision: float
    ground_truth_count: int
    raw_precision: np.ndarray

    def write_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["threshold", "precision", "recall", "f1", "raw_precision"])
            for row in zip(self.thresholds, self.precision, self.recall, self.f1, self.raw_precision):
                writer.writerow([f"{value:.9g}" for value in row])
        return path


@dataclass
class PoseOutcome:
    frame_id: int
    class_id: int
    score: float
    iou2d: float
    iou2d_correct: bool
    vss: float
    add: float
    add_correct: bool
    symmetric: bool = False


POSE_OUTCOME_COLUMNS = ["frame_id", "class_id", "score", "iou2d", "iou2d_correct", "vss", "add", "add_correct",
                        "symmetric"]


def write_pose_outcomes_csv(path: Union[str, Path], outcomes: list[PoseOutcome]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(POSE_OUTCOME_COLUMNS)
        for outcome in outcomes:
            writer.writerow([outcome.frame_id, outcome.class_id, f"{outcome.score:.9g}", f"{outcome.iou2d:.9g}",
                             int(outcome.iou2d_correct), f"{outcome.vss:.9g}", f"{outcome.add:.9g}",
                             int(outcome.add_correct), int(outcome.symmetric)])
    return path


@dataclass
class EvaluationSummary(DataProduct):
    """Per-class pose accuracy rates; the first row (class 0) aggregates every class."""
    class_ids: np.ndarray
    instance_count: np.ndarray
    iou2d: np.ndarray[UFloat]
    vss: np.ndarray[UFloat]
    add: np.ndarray[UFloat]
    add_symmetric: np.ndarray
    detection: DetectionScores
    score_threshold: float

    def to_data_product_variables(self) -> list[DataProductVariable]:
        best = int(np.flatnonzero(self.detection.thresholds == self.score_threshold)[0])
        return [
            DataProductVariable(CLASS_IDS_VAR_NAME, self.class_ids),
            DataProductVariable(INSTANCE_COUNT_VAR_NAME, self.instance_count),
            DataProductVariable(IOU2D_VAR_NAME, nominal_values(self.iou2d)),
            DataProductVariable(IOU2D_UNCERTAINTY_VAR_NAME, std_devs(self.iou2d)),
            DataProductVariable(VSS_VAR_NAME, nominal_values(self.vss)),
            DataProductVariable(VSS_UNCERTAINTY_VAR_NAME, std_devs(self.vss)),
            DataProductVariable(ADD_VAR_NAME, nominal_values(self.add)),
            DataProductVariable(ADD_UNCERTAINTY_VAR_NAME, std_devs(self.add)),
            DataProductVariable(ADD_SYMMETRIC_VAR_NAME, self.add_symmetric),
            DataProductVariable(VSS_NORMALIZATION_VAR_NAME, "union", record_varying=False),
            DataProductVariable(SCORE_THRESHOLD_VAR_NAME, self.score_threshold, record_varying=False),
            DataProductVariable(PRECISION_VAR_NAME, float(self.detection.precision[best]), record_varying=False),
            DataProductVariable(RECALL_VAR_NAME, float(self.detection.recall[best]), record_varying=False),
            DataProductVariable(F1_VAR_NAME, float(self.detection.f1[best]), record_varying=False),
            DataProductVariable(AVERAGE_PRECISION_VAR_NAME, self.detection.average_precision,
                                record_varying=False),
        ]
