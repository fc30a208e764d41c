import numpy as np

from pose_processing.anchors.models import Detection
from pose_processing.constants import NMS_IOU_THRESHOLD
from pose_processing.geometry.boxes import box_iou_matrix


def nms(detections: list[Detection], iou_threshold: float = NMS_IOU_THRESHOLD) -> list[Detection]:
    """Greedy suppression of same-class boxes overlapping a higher scored detection by more than the threshold."""
    order = sorted(detections, key=lambda d: (-d.score, d.prior_id))
    if len(order) == 0:
        return []
    boxes = np.array([d.box for d in order])
    classes = np.array([d.class_id for d in order])
    ious = box_iou_matrix(boxes, boxes)

    suppressed = np.zeros(len(order), dtype=bool)
    keep = []
    for i, detection in enumerate(order):
        if suppressed[i]:
            continue
        keep.append(detection)
        suppressed |= (classes == classes[i]) & (ious[i] > iou_threshold)
    return keep
