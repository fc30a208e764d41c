import logging
import time
from typing import Optional

from pose_processing.anchors.models import Detection
from pose_processing.lifting.science.lift import build_pool
from pose_processing.lifting.science.nms import nms
from pose_processing.metrics.models import EvalRecord, GroundTruthInstance, PredictedInstance
from pose_processing.pipeline.models import PipelineConfig, PoseEstimate, FrameResult
from pose_processing.raster.science.canonical_table import CanonicalTable
from pose_processing.refinement.science.pool_refinement import SceneObservation, refine_pool
from pose_processing.synthgen.models import SyntheticFrame, SceneObject, Annotation

logger = logging.getLogger(__name__)


def estimate_detection(detection: Detection, scene_object: SceneObject, table: CanonicalTable,
                       scene: SceneObservation, cfg: PipelineConfig, views_parsed: int,
                       inplanes_parsed: int) -> Optional[PoseEstimate]:
    try:
        pool = build_pool(detection, table, cfg.camera, views_parsed, inplanes_parsed)
    except ValueError as e:
        logger.warning("Rejected detection from prior %d: %s", detection.prior_id, e)
        return None
    refinement = refine_pool(pool, scene_object.mesh, scene, cfg.camera, cfg.refine, cfg.refinement)
    best = pool.hypotheses[refinement.best_index]
    return PoseEstimate(detection.class_id, detection.score, detection.box, refinement.pose, best.view_id,
                        best.inplane_id, refinement.score, len(pool), refinement)


def estimate_frame(frame: SyntheticFrame, detections: list[Detection], objects: dict[int, SceneObject],
                   tables: dict[int, CanonicalTable], cfg: PipelineConfig, views_parsed: Optional[int] = None,
                   inplanes_parsed: Optional[int] = None) -> FrameResult:
    """Suppresses overlapping detections, then lifts, refines and verifies a hypothesis pool for each survivor."""
    views_parsed = cfg.views_parsed if views_parsed is None else views_parsed
    inplanes_parsed = cfg.inplanes_parsed if inplanes_parsed is None else inplanes_parsed
    start = time.perf_counter()

    kept = nms(detections, cfg.nms_iou)
    depth = frame.depth if cfg.refinement.uses_depth else None
    scene = SceneObservation.from_frame(frame.image, depth, cfg.camera)
    estimates = []
    for detection in kept:
        if detection.class_id not in tables:
            logger.warning("Frame %d: no model for detected class %d", frame.frame_index, detection.class_id)
            continue
        estimate = estimate_detection(detection, objects[detection.class_id], tables[detection.class_id], scene,
                                      cfg, views_parsed, inplanes_parsed)
        if estimate is not None:
            estimates.append(estimate)
    if not estimates:
        logger.info("Frame %d: no poses from %d detections", frame.frame_index, len(detections))
    return FrameResult(frame.frame_index, estimates, time.perf_counter() - start)


def to_eval_record(result: FrameResult, annotations: list[Annotation]) -> EvalRecord:
    """Fully occluded instances are not expected to be found."""
    ground_truths = [GroundTruthInstance(a.class_id, a.pose, a.box) for a in annotations if a.visible]
    predictions = [PredictedInstance(e.class_id, e.pose, e.score, e.box) for e in result.estimates]
    return EvalRecord(result.frame_index, ground_truths, predictions)
