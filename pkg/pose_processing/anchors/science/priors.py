import numpy as np

from pose_processing.anchors.models import PriorConfig
from pose_processing.geometry.boxes import clip_boxes, box_width_height


def generate_priors(cfg: PriorConfig) -> np.ndarray:
    """Prior boxes [x1, y1, x2, y2] ordered scale-major, then row-major locations, then shapes."""
    boxes = []
    for scale in cfg.scales:
        centers_x = (np.arange(scale.map_width) + 0.5) / scale.map_width * cfg.image_width
        centers_y = (np.arange(scale.map_height) + 0.5) / scale.map_height * cfg.image_height
        grid_x, grid_y = np.meshgrid(centers_x, centers_y)
        sizes = np.array(scale.shapes)
        widths = sizes[:, 0] * cfg.image_width * np.sqrt(sizes[:, 1])
        heights = sizes[:, 0] * cfg.image_height / np.sqrt(sizes[:, 1])
        center_x = grid_x.reshape(-1, 1)
        center_y = grid_y.reshape(-1, 1)
        scale_boxes = np.stack([center_x - widths / 2, center_y - heights / 2,
                                center_x + widths / 2, center_y + heights / 2], axis=-1)
        boxes.append(scale_boxes.reshape(-1, 4))
    return clip_boxes(np.concatenate(boxes), cfg.image_width, cfg.image_height)


def encode_box(prior: np.ndarray, gt: np.ndarray) -> np.ndarray:
    width, height = box_width_height(prior)
    if np.any(width <= 0) or np.any(height <= 0):
        raise ValueError("Prior boxes must have positive width and height")
    scale = np.stack([width, height, width, height], axis=-1)
    return (np.asarray(gt, dtype=np.float64) - np.asarray(prior, dtype=np.float64)) / scale


def decode_box(prior: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    width, height = box_width_height(prior)
    scale = np.stack([width, height, width, height], axis=-1)
    return np.asarray(prior, dtype=np.float64) + np.asarray(offsets, dtype=np.float64) * scale
