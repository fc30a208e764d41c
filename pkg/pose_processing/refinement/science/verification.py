from typing import Optional

import numpy as np

from pose_processing.constants import VERIFY_EDGE_DISTANCE_PIXELS
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.mesh import TriMesh
from pose_processing.geometry.pose import Pose
from pose_processing.lifting.models import HypothesisPool
from pose_processing.raster.science.contour import extract_contour, depth_to_normals, valid_normals
from pose_processing.raster.science.rasterizer import render
from pose_processing.refinement.models import EdgeMap


def verify_contour(pose: Pose, mesh: TriMesh, edges: EdgeMap, cam: CameraIntrinsics) -> float:
    """Mean |cos| between rendered contour normals and the orientation of the adjacent scene edge.

    Contour pixels without a scene edge within one pixel contribute zero.
    """
    contour = extract_contour(render(mesh, pose, cam))
    if len(contour) == 0:
        return 0.0
    columns, rows = contour.pixels[:, 0], contour.pixels[:, 1]
    distances, (edge_rows, edge_columns) = edges.nearest_edge
    near = distances[rows, columns] <= VERIFY_EDGE_DISTANCE_PIXELS
    orientation = edges.orientation[edge_rows[rows, columns], edge_columns[rows, columns]]
    agreement = np.abs(np.sum(orientation * contour.normals, axis=1))
    return float(np.clip(np.mean(np.where(near, agreement, 0.0)), 0.0, 1.0))


def verify_normals(pose: Pose, mesh: TriMesh, scene_depth: np.ndarray, cam: CameraIntrinsics,
                   depth_gate: Optional[float] = None, scene_normals: Optional[np.ndarray] = None) -> float:
    """Mean |cos| between rendered and scene normals over rendered pixels whose scene normal is valid.

    With a depth gate, pixels whose depths differ by more than the gate contribute zero.
    """
    if scene_normals is None:
        scene_normals = depth_to_normals(scene_depth, cam)
    buffers = render(mesh, pose, cam)
    rows, columns = np.nonzero(buffers.mask)
    observed = scene_normals[rows, columns]
    valid = valid_normals(observed)
    if not valid.any():
        return 0.0
    agreement = np.abs(np.sum(buffers.normals[rows, columns] * observed, axis=1))
    if depth_gate is not None:
        agreement = np.where(np.abs(buffers.depth[rows, columns] - scene_depth[rows, columns]) <= depth_gate,
                             agreement, 0.0)
    return float(np.clip(np.mean(agreement[valid]), 0.0, 1.0))


def best_hypothesis_index(pool: HypothesisPool, scores) -> int:
    """Ties go to the earliest hypothesis in pool order."""
    scores = np.asarray(scores, dtype=np.float64)
    if len(pool) == 0:
        raise ValueError("Cannot select from an empty hypothesis pool")
    if len(scores) != len(pool):
        raise ValueError(f"Got {len(scores)} scores for {len(pool)} hypotheses")
    return int(np.argmax(scores))


def select_best(pool: HypothesisPool, scores) -> tuple[Pose, float]:
    best = best_hypothesis_index(pool, scores)
    return pool.hypotheses[best].final_pose, float(scores[best])
