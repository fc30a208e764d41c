from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from pose_processing.errors import ConfigurationError
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.mesh import TriMesh
from pose_processing.lifting.models import HypothesisPool, Hypothesis
from pose_processing.raster.science.contour import depth_to_normals
from pose_processing.refinement.models import EdgeMap, RefineConfig, RefinementMode, RefinementResult, \
    PoolRefinement
from pose_processing.refinement.science.edge_refinement import refine_edges
from pose_processing.refinement.science.icp_refinement import refine_icp
from pose_processing.refinement.science.scene_edges import scene_edges
from pose_processing.refinement.science.verification import verify_contour, verify_normals, best_hypothesis_index
from pose_processing.utils import parallel_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SceneObservation:
    """Read-only scene buffers shared by every hypothesis of a frame."""
    image: np.ndarray
    depth: Optional[np.ndarray]
    edges: EdgeMap
    normals: Optional[np.ndarray]

    @classmethod
    def from_frame(cls, image: np.ndarray, depth: Optional[np.ndarray], cam: CameraIntrinsics) -> SceneObservation:
        normals = depth_to_normals(depth, cam) if depth is not None else None
        return cls(image, depth, scene_edges(image), normals)


def refine_hypothesis(hypothesis: Hypothesis, mesh: TriMesh, scene: SceneObservation, cam: CameraIntrinsics,
                      cfg: RefineConfig, mode: RefinementMode) -> list[RefinementResult]:
    """Refines and verifies one hypothesis in place, returning the refinement records in order."""
    results = []
    pose = hypothesis.pose
    if mode in (RefinementMode.EDGES, RefinementMode.BOTH):
        results.append(refine_edges(pose, mesh, scene.edges, cam, cfg))
        pose = results[-1].pose
    if mode.uses_depth:
        results.append(refine_icp(pose, mesh, scene.depth, cam, cfg, scene.normals))
        pose = results[-1].pose

    if results:
        hypothesis.refined_pose = pose
        hypothesis.skipped = all(result.skipped for result in results)
        hypothesis.residual = results[-1].residual
    if mode.uses_depth:
        hypothesis.verification_score = verify_normals(pose, mesh, scene.depth, cam, cfg.verification_depth_gate,
                                                       scene.normals)
    else:
        hypothesis.verification_score = verify_contour(pose, mesh, scene.edges, cam)
    return results


def refine_pool(pool: HypothesisPool, mesh: TriMesh, scene: SceneObservation, cam: CameraIntrinsics,
                cfg: RefineConfig, mode: RefinementMode, threads: int = 1) -> PoolRefinement:
    """Refines every hypothesis of the pool in parallel and selects the best verified pose."""
    if mode.uses_depth and scene.depth is None:
        raise ConfigurationError(f"Refinement mode {mode.value} needs a depth image")

    def refine(hypothesis: Hypothesis) -> list[RefinementResult]:
        return refine_hypothesis(hypothesis, mesh, scene, cam, cfg, mode)

    results = parallel_map(refine, pool.hypotheses, threads)
    skipped = sum(hypothesis.skipped for hypothesis in pool.hypotheses)
    if skipped:
        logger.info("Refinement skipped for %d of %d hypotheses", skipped, len(pool))
    scores = [hypothesis.verification_score for hypothesis in pool.hypotheses]
    best = best_hypothesis_index(pool, scores)
    return PoolRefinement(pool.hypotheses[best].final_pose, float(scores[best]), best, results)
