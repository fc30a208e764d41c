import logging

import numpy as np

from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.mesh import TriMesh
from pose_processing.geometry.pose import Pose, project_points
from pose_processing.raster.models import RenderBuffers

logger = logging.getLogger(__name__)

NEAR_PLANE_METERS = 1e-3
AMBIENT_SHADING = 0.3


def _edge_function(start: np.ndarray, end: np.ndarray, columns: np.ndarray, rows: np.ndarray) -> np.ndarray:
    return (end[0] - start[0]) * (rows - start[1]) - (end[1] - start[1]) * (columns - start[0])


def _covers(weights: np.ndarray, edge: np.ndarray) -> np.ndarray:
    # top-left rule: a pixel center exactly on an edge belongs to only one of the two triangles sharing it
    owns_boundary = edge[1] < 0 or (edge[1] == 0 and edge[0] > 0)
    if owns_boundary:
        return weights >= 0
    return weights > 0


def _rasterize_triangle(corners: np.ndarray, z: np.ndarray, face: int, depth: np.ndarray,
                        face_index: np.ndarray):
    a, b, c = corners
    area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if area == 0:
        return
    if area < 0:
        b, c = c, b
        z = z[[0, 2, 1]]
        area = -area

    height, width = depth.shape
    column_start = max(int(np.ceil(corners[:, 0].min() - 0.5)), 0)
    column_end = min(int(np.floor(corners[:, 0].max() - 0.5)), width - 1)
    row_start = max(int(np.ceil(corners[:, 1].min() - 0.5)), 0)
    row_end = min(int(np.floor(corners[:, 1].max() - 0.5)), height - 1)
    if column_start > column_end or row_start > row_end:
        return

    columns, rows = np.meshgrid(np.arange(column_start, column_end + 1) + 0.5,
                                np.arange(row_start, row_end + 1) + 0.5)
    weight_a = _edge_function(b, c, columns, rows)
    weight_b = _edge_function(c, a, columns, rows)
    weight_c = _edge_function(a, b, columns, rows)
    inside = _covers(weight_a, c - b) & _covers(weight_b, a - c) & _covers(weight_c, b - a)
    if not inside.any():
        return

    inverse_depth = (weight_a / z[0] + weight_b / z[1] + weight_c / z[2]) / area
    with np.errstate(divide="ignore"):
        pixel_depth = 1.0 / inverse_depth

    region = (slice(row_start, row_end + 1), slice(column_start, column_end + 1))
    depth_region = depth[region]
    face_region = face_index[region]
    closer = inside & (pixel_depth < depth_region)
    depth_region[closer] = pixel_depth[closer]
    face_region[closer] = face


def render(mesh: TriMesh, pose: Pose, cam: CameraIntrinsics) -> RenderBuffers:
    points = pose.transform_points(mesh.vertices)
    if not np.any(points[:, 2] > NEAR_PLANE_METERS):
        logger.debug("Mesh entirely behind the camera at translation %s", pose.translation)
        return RenderBuffers.empty(pose, cam, behind_camera=True)

    triangles = points[mesh.faces]
    normals = np.cross(triangles[:, 1] - triangles[:, 0], triangles[:, 2] - triangles[:, 0])
    lengths = np.linalg.norm(normals, axis=1)
    drawable = np.all(triangles[:, :, 2] > NEAR_PLANE_METERS, axis=1) & (lengths > 0)
    normals = normals / np.where(lengths > 0, lengths, 1.0)[:, None]
    away_from_camera = np.sum(normals * triangles.mean(axis=1), axis=1) > 0
    normals[away_from_camera] *= -1

    shading = AMBIENT_SHADING + (1 - AMBIENT_SHADING) * np.abs(normals[:, 2])
    face_colors = mesh.face_colors() * shading[:, None]

    height, width = cam.shape
    depth = np.full((height, width), np.inf)
    face_index = np.full((height, width), -1, dtype=np.int64)
    for face in np.flatnonzero(drawable):
        corners = project_points(triangles[face], cam)
        _rasterize_triangle(corners, triangles[face, :, 2], face, depth, face_index)

    mask = face_index >= 0
    depth[~mask] = 0.0
    color = np.zeros((height, width, 3))
    color[mask] = face_colors[face_index[mask]]
    normal_buffer = np.zeros((height, width, 3))
    normal_buffer[mask] = normals[face_index[mask]]
    return RenderBuffers(color, depth, mask, normal_buffer, face_index, pose, cam)
