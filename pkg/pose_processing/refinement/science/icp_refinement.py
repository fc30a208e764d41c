import logging
from typing import Optional

import numpy as np
from scipy import linalg

from pose_processing.constants import MIN_CORRESPONDENCES
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.mesh import TriMesh
from pose_processing.geometry.pose import Pose, backproject_pixels
from pose_processing.raster.science.contour import depth_to_normals, depth_to_points, valid_normals
from pose_processing.raster.science.rasterizer import render
from pose_processing.refinement.models import RefineConfig, RefinementResult

logger = logging.getLogger(__name__)

SOLVER_DAMPING = 1e-12
CONVERGED_TWIST_NORM = 1e-10


def associate_projective(pose: Pose, mesh: TriMesh, scene_depth: np.ndarray, scene_points: np.ndarray,
                         scene_normals: np.ndarray, cam: CameraIntrinsics, depth_gate: float,
                         normal_gate_degrees: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pairs every rendered pixel with the scene point at the same pixel, dropping pairs whose depths or
    normals disagree beyond the gates. Returns model-frame points, scene points and scene normals."""
    buffers = render(mesh, pose, cam)
    rows, columns = np.nonzero(buffers.mask)
    rendered_depth = buffers.depth[rows, columns]
    observed_depth = scene_depth[rows, columns]
    observed_normals = scene_normals[rows, columns]

    keep = (observed_depth > 0) & (np.abs(rendered_depth - observed_depth) <= depth_gate)
    keep &= valid_normals(observed_normals)
    keep &= np.sum(buffers.normals[rows, columns] * observed_normals, axis=1) >= np.cos(
        np.radians(normal_gate_degrees))

    rows, columns = rows[keep], columns[keep]
    camera_points = backproject_pixels(np.column_stack([columns, rows]) + 0.5, rendered_depth[keep], cam)
    model_points = pose.inverse().transform_points(camera_points)
    return model_points, scene_points[rows, columns], observed_normals[keep]


def point_to_plane_residuals(pose: Pose, model_points: np.ndarray, targets: np.ndarray,
                             normals: np.ndarray) -> np.ndarray:
    return np.sum((pose.transform_points(model_points) - targets) * normals, axis=1)


def _rms(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(values ** 2)))


def solve_point_to_plane(pose: Pose, model_points: np.ndarray, targets: np.ndarray, normals: np.ndarray,
                         iterations: int) -> Pose:
    """Minimizes the point-to-plane distances of fixed pairs by repeated closed-form 6x6 linear solves."""
    for _ in range(iterations):
        points = pose.transform_points(model_points)
        errors = np.sum((points - targets) * normals, axis=1)
        jacobian = np.hstack([np.cross(points, normals), normals])
        normal_matrix = jacobian.T @ jacobian
        damping = SOLVER_DAMPING * max(np.trace(normal_matrix), 1.0) * np.eye(6)
        try:
            twist = linalg.solve(normal_matrix + damping, -jacobian.T @ errors, assume_a="sym")
        except linalg.LinAlgError:
            break
        pose = pose.apply_twist(twist)
        if np.linalg.norm(twist) < CONVERGED_TWIST_NORM:
            break
    return pose


def relative_twist(start: Pose, end: Pose) -> np.ndarray:
    """Increment that apply_twist maps start onto end."""
    increment = end.compose(start.inverse())
    return np.concatenate([increment.scipy_rotation.as_rotvec(), increment.translation])


def refine_icp(pose: Pose, mesh: TriMesh, scene_depth: np.ndarray, cam: CameraIntrinsics,
               cfg: RefineConfig = RefineConfig(), scene_normals: Optional[np.ndarray] = None) -> RefinementResult:
    """Projective point-to-plane ICP against a depth image.

    The depth gate starts at 2^k times its configured value and halves each round until it reaches it.
    A round whose residual exceeds the previous one halves the previous update up to max_step_halvings
    times before giving up and keeping the last good pose.
    """
    if scene_normals is None:
        scene_normals = depth_to_normals(scene_depth, cam)
    scene_points = depth_to_points(scene_depth, cam)

    def associate(candidate: Pose, round_index: int):
        depth_gate = cfg.icp_depth_gate * 2.0 ** max(cfg.gate_annealing_rounds - round_index, 0)
        pairs = associate_projective(candidate, mesh, scene_depth, scene_points, scene_normals, cam,
                                     depth_gate, cfg.icp_normal_gate)
        if len(pairs[0]) < MIN_CORRESPONDENCES:
            return None, None
        return pairs, _rms(point_to_plane_residuals(candidate, *pairs))

    current = pose
    trace = []
    previous_pose = None
    previous_update = None
    for round_index in range(cfg.icp_rounds + 1):
        pairs, residual = associate(current, round_index)
        if pairs is not None and trace and residual > trace[-1]:
            pairs, residual = None, None
            for halving in range(1, cfg.max_step_halvings + 1):
                candidate = previous_pose.apply_twist(previous_update * 0.5 ** halving)
                candidate_pairs, candidate_residual = associate(candidate, round_index)
                if candidate_pairs is not None and candidate_residual <= trace[-1]:
                    current, pairs, residual = candidate, candidate_pairs, candidate_residual
                    break
            if pairs is None:
                logger.debug("ICP residual increased after round %d, keeping previous pose", round_index)
                current = previous_pose
                break

        if pairs is None:
            if round_index == 0:
                logger.warning("ICP refinement skipped: fewer than %d valid correspondences", MIN_CORRESPONDENCES)
                return RefinementResult(pose, None, True, "icp")
            current = previous_pose
            break

        trace.append(residual)
        logger.debug("ICP round %d: %d pairs, point-to-plane rms %.6f m", round_index, len(pairs[0]), residual)
        if round_index == cfg.icp_rounds:
            break
        refined = solve_point_to_plane(current, *pairs, cfg.inner_iterations)
        previous_pose, previous_update = current, relative_twist(current, refined)
        current = refined
        if np.linalg.norm(previous_update) < CONVERGED_TWIST_NORM:
            break
    return RefinementResult(current, trace[-1], False, "icp", trace)
