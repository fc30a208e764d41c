import numpy as np
from scipy.special import softmax

from pose_processing.anchors.models import PriorPredictions, Detection
from pose_processing.anchors.science.priors import decode_box
from pose_processing.geometry.boxes import clip_boxes


def decode_detections(priors: np.ndarray, predictions: PriorPredictions, image_width: float, image_height: float,
                      score_threshold: float, full_sphere_views: bool = False) -> list[Detection]:
    """All priors whose best foreground probability reaches the threshold, highest score first."""
    class_scores = softmax(predictions.class_logits, axis=1)
    foreground = class_scores[:, 1:].max(axis=1)
    selected = np.flatnonzero(foreground >= score_threshold)
    selected = selected[np.lexsort((selected, -foreground[selected]))]

    boxes = clip_boxes(decode_box(priors[selected], predictions.offsets[selected]), image_width, image_height)
    view_scores = softmax(predictions.view_logits[selected], axis=1)
    inplane_scores = softmax(predictions.inplane_logits[selected], axis=1)
    return [Detection(int(prior_id), class_scores[prior_id], view_scores[i], inplane_scores[i],
                      predictions.offsets[prior_id], boxes[i], full_sphere_views)
            for i, prior_id in enumerate(selected)]
