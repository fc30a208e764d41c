import numpy as np
from scipy import ndimage

from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.pose import backproject_pixels
from pose_processing.raster.models import RenderBuffers, ContourPoints

MAX_RELATIVE_DEPTH_JUMP = 0.05

FOUR_NEIGHBORHOOD = ndimage.generate_binary_structure(2, 1)


def mask_boundary(mask: np.ndarray) -> np.ndarray:
    interior = ndimage.binary_erosion(mask, structure=FOUR_NEIGHBORHOOD, border_value=0)
    return mask & ~interior


def outward_normals(mask: np.ndarray, rows: np.ndarray, columns: np.ndarray) -> np.ndarray:
    values = mask.astype(np.float64)
    gradient = np.column_stack([ndimage.sobel(values, axis=1)[rows, columns],
                                ndimage.sobel(values, axis=0)[rows, columns]])
    lengths = np.linalg.norm(gradient, axis=1, keepdims=True)
    return np.where(lengths > 1e-12, -gradient / np.where(lengths > 1e-12, lengths, 1.0), 0.0)


def extract_contour(buffers: RenderBuffers) -> ContourPoints:
    if not buffers.visible:
        return ContourPoints(np.zeros((0, 2), dtype=np.int64), np.zeros((0, 3)), np.zeros((0, 2)))
    rows, columns = np.nonzero(mask_boundary(buffers.mask))
    pixels = np.column_stack([columns, rows])
    camera_points = backproject_pixels(pixels + 0.5, buffers.depth[rows, columns], buffers.camera)
    model_points = buffers.pose.inverse().transform_points(camera_points)
    return ContourPoints(pixels, model_points, outward_normals(buffers.mask, rows, columns))


def depth_to_points(depth: np.ndarray, cam: CameraIntrinsics) -> np.ndarray:
    columns, rows = cam.pixel_centers()
    valid = depth > 0
    points = backproject_pixels(np.stack([columns, rows], axis=-1), np.where(valid, depth, 1.0), cam)
    points[~valid] = 0.0
    return points


def depth_to_normals(depth: np.ndarray, cam: CameraIntrinsics,
                     max_relative_jump: float = MAX_RELATIVE_DEPTH_JUMP) -> np.ndarray:
    """Camera-frame unit normals facing the camera; zero vectors mark pixels without a valid neighborhood."""
    points = depth_to_points(depth, cam)
    normals = np.zeros(depth.shape + (3,))
    if min(depth.shape) < 3:
        return normals

    horizontal = points[1:-1, 2:] - points[1:-1, :-2]
    vertical = points[2:, 1:-1] - points[:-2, 1:-1]
    interior = np.cross(horizontal, vertical)

    center = depth[1:-1, 1:-1]
    valid = center > 0
    for neighbor in [depth[1:-1, 2:], depth[1:-1, :-2], depth[2:, 1:-1], depth[:-2, 1:-1]]:
        valid &= (neighbor > 0) & (np.abs(neighbor - center) <= max_relative_jump * center)
    lengths = np.linalg.norm(interior, axis=-1)
    valid &= lengths > 0

    interior = interior / np.where(lengths > 0, lengths, 1.0)[..., None]
    away_from_camera = np.sum(interior * points[1:-1, 1:-1], axis=-1) > 0
    interior[away_from_camera] *= -1
    interior[~valid] = 0.0
    normals[1:-1, 1:-1] = interior
    return normals


def valid_normals(normals: np.ndarray) -> np.ndarray:
    return np.any(normals != 0, axis=-1)
