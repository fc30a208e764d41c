import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from uncertainties import ufloat, UFloat

from pose_processing.constants import DETECTION_IOU_THRESHOLD, POSE_IOU_THRESHOLD
from pose_processing.geometry.boxes import mask_bounding_box
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.mesh import TriMesh
from pose_processing.metrics.models import EvalRecord, PoseOutcome, DetectionScores, EvaluationSummary, \
    ALL_CLASSES
from pose_processing.metrics.science.detection_metrics import detection_scores, best_f1_threshold, \
    match_predictions, box_iou
from pose_processing.metrics.science.pose_metrics import mask_iou, add
from pose_processing.models import ProductMetadata
from pose_processing.raster.science.rasterizer import render
from pose_processing.utils import parallel_map

logger = logging.getLogger(__name__)


@dataclass
class EvaluationReport:
    detection: DetectionScores
    score_threshold: float
    outcomes: list[PoseOutcome]
    summary: EvaluationSummary


def evaluate_frame(record: EvalRecord, meshes: dict[int, TriMesh], cam: CameraIntrinsics, score_threshold: float,
                   symmetric_classes: frozenset = frozenset(),
                   iou_threshold: float = DETECTION_IOU_THRESHOLD) -> list[PoseOutcome]:
    """Pose errors of every correctly detected instance whose score reaches the threshold."""
    outcomes = []
    for index, truth_index in enumerate(match_predictions(record, iou_threshold)):
        prediction = record.predictions[index]
        if truth_index < 0 or prediction.score < score_threshold:
            continue
        truth = record.ground_truths[truth_index]
        mesh = meshes[truth.class_id]
        gt_mask = render(mesh, truth.pose, cam).mask
        est_mask = render(mesh, prediction.pose, cam).mask
        gt_box, est_box = mask_bounding_box(gt_mask), mask_bounding_box(est_mask)
        ratio = 0.0 if gt_box is None or est_box is None else box_iou(gt_box, est_box)
        distance, add_correct = add(truth.pose, prediction.pose, mesh)
        outcomes.append(PoseOutcome(record.frame_id, truth.class_id, prediction.score, ratio,
                                    ratio > POSE_IOU_THRESHOLD, mask_iou(gt_mask, est_mask), distance, add_correct,
                                    truth.class_id in symmetric_classes))
    return outcomes


def binomial_rate(successes: int, trials: int) -> UFloat:
    if trials == 0:
        return ufloat(0.0, 0.0)
    rate = successes / trials
    return ufloat(rate, np.sqrt(rate * (1 - rate) / trials))


def mean_with_error(values: list[float]) -> UFloat:
    if len(values) == 0:
        return ufloat(0.0, 0.0)
    error = np.std(values, ddof=1) / np.sqrt(len(values)) if len(values) > 1 else 0.0
    return ufloat(float(np.mean(values)), float(error))


def summarize(outcomes: list[PoseOutcome], detection: DetectionScores, score_threshold: float,
              class_ids: list[int], symmetric_classes: frozenset,
              input_metadata: ProductMetadata) -> EvaluationSummary:
    rows = [ALL_CLASSES] + sorted(class_ids)
    counts, iou2d, vss, add_rates, symmetric = [], [], [], [], []
    for class_id in rows:
        selected = [o for o in outcomes if class_id == ALL_CLASSES or o.class_id == class_id]
        counts.append(len(selected))
        iou2d.append(binomial_rate(sum(o.iou2d_correct for o in selected), len(selected)))
        vss.append(mean_with_error([o.vss for o in selected]))
        add_rates.append(binomial_rate(sum(o.add_correct for o in selected), len(selected)))
        symmetric.append(class_id in symmetric_classes)
    return EvaluationSummary(input_metadata, np.array(rows), np.array(counts), np.array(iou2d), np.array(vss),
                             np.array(add_rates), np.array(symmetric), detection, score_threshold)


def evaluate(records: list[EvalRecord], meshes: dict[int, TriMesh], cam: CameraIntrinsics,
             input_metadata: ProductMetadata, symmetric_classes: frozenset = frozenset(),
             iou_threshold: float = DETECTION_IOU_THRESHOLD, score_thresholds: Optional[np.ndarray] = None,
             threads: int = 1) -> EvaluationReport:
    """Detection sweep first, then pose errors of the instances detected at the best-F1 threshold."""
    detection = detection_scores(records, iou_threshold, score_thresholds)
    threshold = best_f1_threshold(detection)

    def evaluate_record(record: EvalRecord) -> list[PoseOutcome]:
        return evaluate_frame(record, meshes, cam, threshold, symmetric_classes, iou_threshold)

    outcomes = [outcome for frame in parallel_map(evaluate_record, records, threads) for outcome in frame]
    summary = summarize(outcomes, detection, threshold, list(meshes), symmetric_classes, input_metadata)
    logger.info("Evaluated %d frames: AP %.3f, %d poses at score threshold %.3f, ADD %s, VSS %s",
                len(records), detection.average_precision, len(outcomes), threshold, summary.add[0], summary.vss[0])
    return EvaluationReport(detection, threshold, outcomes, summary)
