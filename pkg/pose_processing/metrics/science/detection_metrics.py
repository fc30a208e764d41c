from typing import Optional

import numpy as np

from pose_processing.constants import DETECTION_IOU_THRESHOLD, SCORE_THRESHOLD_COUNT
from pose_processing.geometry.boxes import box_iou_matrix
from pose_processing.metrics.models import EvalRecord, DetectionScores


def box_iou(a, b) -> float:
    return float(box_iou_matrix(a, b)[0, 0])


def default_score_thresholds() -> np.ndarray:
    return np.linspace(1.0 / SCORE_THRESHOLD_COUNT, 1.0, SCORE_THRESHOLD_COUNT)


def match_predictions(record: EvalRecord, iou_threshold: float = DETECTION_IOU_THRESHOLD) -> np.ndarray:
    """Greedy matching in descending score order; each prediction takes the unmatched ground truth of its class
    with the highest IoU above the threshold. Returns the matched ground-truth index per prediction, -1 if none.
    """
    matched = np.full(len(record.predictions), -1, dtype=np.int64)
    if not record.predictions or not record.ground_truths:
        return matched

    scores = np.array([prediction.score for prediction in record.predictions])
    order = np.lexsort((np.arange(len(scores)), -scores))
    ious = box_iou_matrix(np.array([prediction.box for prediction in record.predictions]),
                          np.array([truth.box for truth in record.ground_truths]))
    truth_classes = np.array([truth.class_id for truth in record.ground_truths])
    taken = np.zeros(len(record.ground_truths), dtype=bool)
    for index in order:
        candidates = (truth_classes == record.predictions[index].class_id) & ~taken & (ious[index] > iou_threshold)
        if candidates.any():
            best = int(np.argmax(np.where(candidates, ious[index], -1.0)))
            matched[index] = best
            taken[best] = True
    return matched


def ranked_outcomes(records: list[EvalRecord], iou_threshold: float = DETECTION_IOU_THRESHOLD) \
        -> tuple[np.ndarray, np.ndarray, int]:
    """Scores and true-positive flags of every prediction in descending score order, and the ground-truth count."""
    scores, true_positives = [], []
    for record in records:
        scores.extend(prediction.score for prediction in record.predictions)
        true_positives.extend(match_predictions(record, iou_threshold) >= 0)
    scores = np.array(scores, dtype=np.float64)
    true_positives = np.array(true_positives, dtype=bool)
    order = np.lexsort((np.arange(len(scores)), -scores))
    return scores[order], true_positives[order], sum(len(record.ground_truths) for record in records)


def average_precision(recall: np.ndarray, precision: np.ndarray) -> float:
    """All-point interpolated area under the precision-recall curve."""
    recall = np.concatenate(([0.0], recall, [1.0]))
    precision = np.concatenate(([0.0], precision, [0.0]))
    precision = np.maximum.accumulate(precision[::-1])[::-1]
    changes = np.flatnonzero(recall[1:] != recall[:-1])
    return float(np.sum((recall[changes + 1] - recall[changes]) * precision[changes + 1]))


def interpolated_precision(precision: np.ndarray) -> np.ndarray:
    """Envelope over a threshold sweep in ascending threshold order: best precision at any lower threshold."""
    return np.maximum.accumulate(np.asarray(precision, dtype=np.float64))


def detection_scores(records: list[EvalRecord], iou_threshold: float = DETECTION_IOU_THRESHOLD,
                     score_thresholds: Optional[np.ndarray] = None) -> DetectionScores:
    """Precision is 1 when nothing is predicted and recall is 1 when nothing is to be found. Thresholds come back
    in ascending order."""
    thresholds = default_score_thresholds() if score_thresholds is None else np.sort(
        np.asarray(score_thresholds, dtype=np.float64))
    scores, true_positives, ground_truth_count = ranked_outcomes(records, iou_threshold)

    predicted = np.array([np.count_nonzero(scores >= threshold) for threshold in thresholds])
    correct = np.array([np.count_nonzero(true_positives[scores >= threshold]) for threshold in thresholds])
    raw_precision = np.where(predicted > 0, correct / np.maximum(predicted, 1), 1.0)
    recall = correct / ground_truth_count if ground_truth_count else np.ones(len(thresholds))
    total = raw_precision + recall
    f1 = np.where(total > 0, 2 * raw_precision * recall / np.where(total > 0, total, 1.0), 0.0)

    if ground_truth_count == 0 or len(scores) == 0:
        ap = 0.0
    else:
        cumulative = np.cumsum(true_positives)
        ap = average_precision(cumulative / ground_truth_count, cumulative / np.arange(1, len(scores) + 1))
    return DetectionScores(thresholds, interpolated_precision(raw_precision), recall, f1, ap, ground_truth_count,
                           raw_precision)


def best_f1_threshold(scores: DetectionScores) -> float:
    """Threshold with the highest F1; ties go to the highest threshold."""
    best = len(scores.f1) - 1 - int(np.argmax(scores.f1[::-1]))
    return float(scores.thresholds[best])
