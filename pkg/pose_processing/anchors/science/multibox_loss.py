import logging

import numpy as np
from scipy.special import logsumexp, softmax

from pose_processing.anchors.models import PriorPredictions, TrainingTargets
from pose_processing.constants import LOSS_WEIGHT_FIT, LOSS_WEIGHT_VIEW, LOSS_WEIGHT_INPLANE, SMOOTH_L1_TRANSITION

logger = logging.getLogger(__name__)


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row cross-entropy and its gradient with respect to the logits."""
    rows = np.arange(len(labels))
    losses = logsumexp(logits, axis=1) - logits[rows, labels]
    gradient = softmax(logits, axis=1)
    gradient[rows, labels] -= 1.0
    return losses, gradient


def smooth_l1(differences: np.ndarray, transition: float = SMOOTH_L1_TRANSITION) -> tuple[np.ndarray, np.ndarray]:
    magnitude = np.abs(differences)
    quadratic = magnitude < transition
    losses = np.where(quadratic, 0.5 * differences ** 2 / transition, magnitude - 0.5 * transition)
    gradient = np.where(quadratic, differences / transition, np.sign(differences))
    return losses, gradient


def _check_sizes(predictions: PriorPredictions, targets: TrainingTargets):
    counts = {len(predictions.offsets), len(predictions.class_logits), len(predictions.view_logits),
              len(predictions.inplane_logits), targets.prior_count}
    if len(counts) != 1:
        raise ValueError(f"Predictions and targets disagree on the number of priors: {sorted(counts)}")
    positives = targets.positives
    if len(positives) == 0:
        return
    if targets.labels.max() >= predictions.class_logits.shape[1]:
        raise ValueError(f"Class label {targets.labels.max()} outside {predictions.class_logits.shape[1]} logits")
    if targets.view_ids[positives].max() >= predictions.view_logits.shape[1]:
        raise ValueError(f"View id {targets.view_ids[positives].max()} outside "
                         f"{predictions.view_logits.shape[1]} logits")
    if targets.inplane_ids[positives].max() >= predictions.inplane_logits.shape[1]:
        raise ValueError(f"In-plane id {targets.inplane_ids[positives].max()} outside "
                         f"{predictions.inplane_logits.shape[1]} logits")


def multibox_loss(predictions: PriorPredictions, targets: TrainingTargets, alpha: float = LOSS_WEIGHT_FIT,
                  beta: float = LOSS_WEIGHT_VIEW, gamma: float = LOSS_WEIGHT_INPLANE
                  ) -> tuple[float, PriorPredictions]:
    """Summed classification loss over positives and negatives plus weighted fit, view and in-plane
    losses over positives, with the gradient for every prediction entry."""
    _check_sizes(predictions, targets)
    positives = targets.positives
    negatives = np.asarray(targets.negatives, dtype=np.int64)
    gradient = PriorPredictions.zeros(predictions.prior_count, predictions.class_logits.shape[1],
                                      predictions.view_logits.shape[1], predictions.inplane_logits.shape[1])

    classified = np.concatenate([negatives, positives])
    class_labels = np.concatenate([np.zeros(len(negatives), dtype=np.int64), targets.labels[positives]])
    class_losses, class_gradient = softmax_cross_entropy(predictions.class_logits[classified], class_labels)
    np.add.at(gradient.class_logits, classified, class_gradient)

    fit_losses, fit_gradient = smooth_l1(predictions.offsets[positives] - targets.offsets[positives])
    gradient.offsets[positives] = alpha * fit_gradient

    view_losses, view_gradient = softmax_cross_entropy(predictions.view_logits[positives],
                                                       targets.view_ids[positives])
    gradient.view_logits[positives] = beta * view_gradient

    inplane_losses, inplane_gradient = softmax_cross_entropy(predictions.inplane_logits[positives],
                                                             targets.inplane_ids[positives])
    gradient.inplane_logits[positives] = gamma * inplane_gradient

    class_term = float(np.sum(class_losses))
    fit_term = float(np.sum(fit_losses))
    view_term = float(np.sum(view_losses))
    inplane_term = float(np.sum(inplane_losses))
    logger.debug("Multibox loss terms: class %.4f, fit %.4f, view %.4f, in-plane %.4f over %d positives",
                 class_term, fit_term, view_term, inplane_term, len(positives))
    return class_term + alpha * fit_term + beta * view_term + gamma * inplane_term, gradient
