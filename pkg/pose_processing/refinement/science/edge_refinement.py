import logging
from typing import Optional

import numpy as np
from scipy import linalg, ndimage

from pose_processing.constants import EDGE_ORIENTATION_AGREEMENT, MIN_CORRESPONDENCES
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.mesh import TriMesh
from pose_processing.geometry.pose import Pose, project_points, projection_jacobians
from pose_processing.raster.models import ContourPoints
from pose_processing.raster.science.contour import extract_contour
from pose_processing.raster.science.rasterizer import render
from pose_processing.refinement.models import EdgeMap, RefineConfig, RefinementResult

logger = logging.getLogger(__name__)

SOLVER_DAMPING = 1e-9
CONVERGED_TWIST_NORM = 1e-10


def geman_mcclure_weights(residual_norms: np.ndarray, scale: float) -> np.ndarray:
    return (scale ** 2 / (scale ** 2 + residual_norms ** 2)) ** 2


def geman_mcclure_cost(residual_norms: np.ndarray, scale: float) -> np.ndarray:
    squared = residual_norms ** 2
    return scale ** 2 * squared / (2 * (scale ** 2 + squared))


def robust_mean_residual(residual_norms: np.ndarray, scale: float) -> float:
    weights = geman_mcclure_weights(residual_norms, scale)
    return float(np.sum(weights * residual_norms) / np.sum(weights))


def find_edge_correspondences(contour: ContourPoints, edges: EdgeMap,
                              search_radius: int) -> tuple[np.ndarray, np.ndarray]:
    """Closest scene edge along each contour normal, as a flag per point and a target pixel position.

    Candidates are local maxima of the gradient magnitude along the ray that lie on the edge mask with an
    orientation agreeing with the normal. The peak is refined to sub-pixel precision and moved half a pixel
    back along the normal so that a contour lying exactly on its edge has zero residual.
    """
    point_count = len(contour)
    if point_count == 0:
        return np.zeros(0, dtype=bool), np.zeros((0, 2))
    centers = contour.pixel_centers
    normals = contour.normals
    steps = np.arange(-search_radius, search_radius + 1, dtype=np.float64)
    positions = centers[:, None, :] + steps[None, :, None] * normals[:, None, :]
    profile = ndimage.map_coordinates(edges.magnitude, [positions[..., 1] - 0.5, positions[..., 0] - 0.5],
                                      order=1, mode="constant", cval=0.0)

    height, width = edges.shape
    columns = np.floor(positions[..., 0]).astype(np.int64)
    rows = np.floor(positions[..., 1]).astype(np.int64)
    inside = (columns >= 0) & (columns < width) & (rows >= 0) & (rows < height)
    columns = np.clip(columns, 0, width - 1)
    rows = np.clip(rows, 0, height - 1)
    agreement = np.abs(np.sum(edges.orientation[rows, columns] * normals[:, None, :], axis=-1))
    candidates = inside & edges.mask[rows, columns] & (agreement >= EDGE_ORIENTATION_AGREEMENT)

    previous = np.pad(profile[:, :-1], ((0, 0), (1, 0)), constant_values=-np.inf)
    following = np.pad(profile[:, 1:], ((0, 0), (0, 1)), constant_values=-np.inf)
    peaks = candidates & (profile >= previous) & (profile >= following)
    distances = np.where(peaks, np.abs(steps - 0.5)[None, :], np.inf)
    best = np.argmin(distances, axis=1)
    points = np.arange(point_count)
    found = np.isfinite(distances[points, best]) & (np.linalg.norm(normals, axis=1) > 0)

    center_value = profile[points, best]
    before = profile[points, np.clip(best - 1, 0, len(steps) - 1)]
    after = profile[points, np.clip(best + 1, 0, len(steps) - 1)]
    curvature = before - 2 * center_value + after
    with np.errstate(divide="ignore", invalid="ignore"):
        shift = np.where(curvature < 0, 0.5 * (before - after) / curvature, 0.0)
    shift = np.clip(shift, -0.5, 0.5)
    offsets = steps[best] + shift - 0.5
    return found, centers + offsets[:, None] * normals


def _reprojection_residuals(pose: Pose, model_points: np.ndarray, targets: np.ndarray,
                            cam: CameraIntrinsics) -> Optional[tuple[np.ndarray, np.ndarray]]:
    camera_points = pose.transform_points(model_points)
    if np.any(camera_points[:, 2] <= 0):
        return None
    return project_points(camera_points, cam) - targets, camera_points


def _irls(pose: Pose, model_points: np.ndarray, targets: np.ndarray, cam: CameraIntrinsics,
          cfg: RefineConfig) -> tuple[Pose, list[float]]:
    residuals, camera_points = _reprojection_residuals(pose, model_points, targets, cam)
    objective = float(np.sum(geman_mcclure_cost(np.linalg.norm(residuals, axis=1), cfg.gm_scale)))
    objectives = [objective]
    for _ in range(cfg.inner_iterations):
        weights = geman_mcclure_weights(np.linalg.norm(residuals, axis=1), cfg.gm_scale)
        jacobians = projection_jacobians(camera_points, cam)
        hessian = np.einsum("n,nij,nik->jk", weights, jacobians, jacobians)
        gradient = np.einsum("n,nij,ni->j", weights, jacobians, residuals)
        damping = SOLVER_DAMPING * max(np.trace(hessian), 1.0) * np.eye(6)
        try:
            twist = -linalg.solve(hessian + damping, gradient, assume_a="sym")
        except linalg.LinAlgError:
            break

        accepted = None
        for halving in range(cfg.max_step_halvings + 1):
            candidate = pose.apply_twist(twist * 0.5 ** halving)
            evaluation = _reprojection_residuals(candidate, model_points, targets, cam)
            if evaluation is None:
                continue
            candidate_objective = float(np.sum(geman_mcclure_cost(np.linalg.norm(evaluation[0], axis=1),
                                                                  cfg.gm_scale)))
            if candidate_objective <= objective:
                accepted = candidate, evaluation, candidate_objective
                break
        if accepted is None:
            break
        pose, (residuals, camera_points), objective = accepted
        objectives.append(objective)
        if np.linalg.norm(twist) < CONVERGED_TWIST_NORM:
            break
    return pose, objectives


def refine_edges(pose: Pose, mesh: TriMesh, edges: EdgeMap, cam: CameraIntrinsics,
                 cfg: RefineConfig = RefineConfig()) -> RefinementResult:
    """Aligns the rendered contour with scene edges by Geman-McLure weighted Gauss-Newton on a twist,
    searching new correspondences every round."""
    current = pose
    residual = None
    trace = []
    step_objectives = []
    for round_index in range(cfg.rounds):
        contour = extract_contour(render(mesh, current, cam)).subsample(cfg.max_contour_points)
        found, targets = find_edge_correspondences(contour, edges, cfg.search_radius_px)
        if found.sum() < MIN_CORRESPONDENCES:
            if round_index == 0:
                logger.warning("Edge refinement skipped: %d correspondences", found.sum())
                return RefinementResult(pose, None, True, "edges")
            break

        model_points = contour.model_points[found]
        targets = targets[found]
        previous = current
        current, objectives = _irls(current, model_points, targets, cam, cfg)
        step_objectives.append(objectives)
        residuals, _ = _reprojection_residuals(current, model_points, targets, cam)
        residual = robust_mean_residual(np.linalg.norm(residuals, axis=1), cfg.gm_scale)
        trace.append(residual)
        logger.debug("Edge round %d: %d correspondences, robust residual %.3f px", round_index, found.sum(),
                     residual)
        if len(objectives) == 1 or (current.rotation_angle_to(previous) < 1e-6
                                    and current.translation_distance_to(previous) < 1e-9):
            break
    return RefinementResult(current, residual, False, "edges", trace, step_objectives)
