import numpy as np
from scipy.special import softmax

from pose_processing.anchors.models import TrainingTargets, BoxLabel
from pose_processing.anchors.science.priors import encode_box
from pose_processing.constants import POSITIVE_IOU_THRESHOLD, HARD_NEGATIVE_RATIO
from pose_processing.geometry.boxes import box_iou_matrix


def match_priors(priors: np.ndarray, ground_truth: list[BoxLabel],
                 iou_threshold: float = POSITIVE_IOU_THRESHOLD) -> TrainingTargets:
    prior_count = len(priors)
    labels = np.zeros(prior_count, dtype=np.int64)
    view_ids = np.full(prior_count, -1, dtype=np.int64)
    inplane_ids = np.full(prior_count, -1, dtype=np.int64)
    offsets = np.zeros((prior_count, 4))
    matched_gt = np.full(prior_count, -1, dtype=np.int64)
    best_iou = np.zeros(prior_count)
    if len(ground_truth) == 0:
        return TrainingTargets(labels, view_ids, inplane_ids, offsets, matched_gt, best_iou)

    gt_boxes = np.array([gt.box for gt in ground_truth], dtype=np.float64)
    ious = box_iou_matrix(priors, gt_boxes)
    best_gt = np.argmax(ious, axis=1)
    best_iou = ious[np.arange(prior_count), best_gt]
    positive = best_iou > iou_threshold

    matched_gt[positive] = best_gt[positive]
    labels[positive] = [ground_truth[g].class_id for g in best_gt[positive]]
    view_ids[positive] = [ground_truth[g].view_id for g in best_gt[positive]]
    inplane_ids[positive] = [ground_truth[g].inplane_id for g in best_gt[positive]]
    offsets[positive] = encode_box(priors[positive], gt_boxes[best_gt[positive]])
    return TrainingTargets(labels, view_ids, inplane_ids, offsets, matched_gt, best_iou)


def objectness(class_logits: np.ndarray) -> np.ndarray:
    return softmax(class_logits, axis=1)[:, 1:].max(axis=1)


def select_hard_negatives(class_logits: np.ndarray, targets: TrainingTargets,
                          ratio: float = HARD_NEGATIVE_RATIO) -> np.ndarray:
    """Unassigned priors with the highest foreground probability, ratio times as many as the positives."""
    candidates = np.flatnonzero(targets.labels == 0)
    quota = int(ratio * len(targets.positives))
    scores = objectness(class_logits)[candidates]
    order = np.lexsort((candidates, -scores))
    return candidates[order[:quota]]
