import logging

import numpy as np

from pose_processing.anchors.models import Detection
from pose_processing.metrics.models import ALL_CLASSES
from pose_processing.metrics.science.evaluation import evaluate
from pose_processing.models import ProductMetadata
from pose_processing.pipeline.models import PipelineConfig, ParsingSweep
from pose_processing.pipeline.science.frame_pipeline import estimate_frame, to_eval_record
from pose_processing.raster.science.canonical_table import CanonicalTable
from pose_processing.synthgen.models import SyntheticFrame, SceneObject
from pose_processing.utils import parallel_map

logger = logging.getLogger(__name__)


def sweep_parsing(frames: list[SyntheticFrame], detections: list[list[Detection]], objects: dict[int, SceneObject],
                  tables: dict[int, CanonicalTable], cfg: PipelineConfig,
                  input_metadata: ProductMetadata) -> ParsingSweep:
    """Reruns pose estimation on the same detections for every (V, R) pool size and scores each run."""
    meshes = {class_id: scene_object.mesh for class_id, scene_object in objects.items()}
    counts, add_rates, vss_means = [], [], []
    for views_parsed, inplanes_parsed in cfg.sweep_parse_counts:
        def estimate(index: int):
            return estimate_frame(frames[index], detections[index], objects, tables, cfg, views_parsed,
                                  inplanes_parsed)

        results = parallel_map(estimate, range(len(frames)), cfg.threads)
        records = [to_eval_record(result, frame.annotations) for result, frame in zip(results, frames)]
        summary = evaluate(records, meshes, cfg.camera, input_metadata, cfg.symmetric_classes).summary
        row = int(np.flatnonzero(summary.class_ids == ALL_CLASSES)[0])
        counts.append(summary.instance_count[row])
        add_rates.append(summary.add[row])
        vss_means.append(summary.vss[row])
        logger.info("V=%d R=%d: ADD %s, VSS %s over %d poses", views_parsed, inplanes_parsed, summary.add[row],
                    summary.vss[row], summary.instance_count[row])

    views, inplanes = np.array(cfg.sweep_parse_counts).T
    return ParsingSweep(input_metadata, views, inplanes, np.array(counts), np.array(add_rates), np.array(vss_means),
                        cfg.refinement.value)
