from typing import Optional

import numpy as np


def box_width_height(boxes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    boxes = np.asarray(boxes, dtype=np.float64)
    return boxes[..., 2] - boxes[..., 0], boxes[..., 3] - boxes[..., 1]


def box_area(boxes: np.ndarray) -> np.ndarray:
    width, height = box_width_height(boxes)
    return np.clip(width, 0, None) * np.clip(height, 0, None)


def box_center(boxes: np.ndarray) -> np.ndarray:
    boxes = np.asarray(boxes, dtype=np.float64)
    return np.stack([(boxes[..., 0] + boxes[..., 2]) / 2, (boxes[..., 1] + boxes[..., 3]) / 2], axis=-1)


def box_diagonal(boxes: np.ndarray) -> np.ndarray:
    width, height = box_width_height(boxes)
    return np.hypot(width, height)


def box_iou_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise intersection over union of boxes given as [x1, y1, x2, y2] rows."""
    a = np.asarray(a, dtype=np.float64).reshape(-1, 4)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 4)
    top_left = np.maximum(a[:, None, :2], b[None, :, :2])
    bottom_right = np.minimum(a[:, None, 2:], b[None, :, 2:])
    intersection = np.prod(np.clip(bottom_right - top_left, 0, None), axis=-1)
    union = box_area(a)[:, None] + box_area(b)[None, :] - intersection
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(union > 0, intersection / union, 0.0)


def clip_boxes(boxes: np.ndarray, width: float, height: float) -> np.ndarray:
    boxes = np.array(boxes, dtype=np.float64)
    boxes[..., [0, 2]] = np.clip(boxes[..., [0, 2]], 0, width)
    boxes[..., [1, 3]] = np.clip(boxes[..., [1, 3]], 0, height)
    return boxes


def mask_bounding_box(mask: np.ndarray) -> Optional[np.ndarray]:
    """Tight box [min_col, min_row, max_col + 1, max_row + 1] around a boolean mask, None when empty."""
    rows = np.flatnonzero(np.any(mask, axis=1))
    if len(rows) == 0:
        return None
    columns = np.flatnonzero(np.any(mask, axis=0))
    return np.array([columns[0], rows[0], columns[-1] + 1, rows[-1] + 1], dtype=np.float64)
