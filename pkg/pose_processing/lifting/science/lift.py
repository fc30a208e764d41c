import logging

import numpy as np

from pose_processing.anchors.models import Detection
from pose_processing.constants import MIN_BOX_DIAGONAL_PIXELS, DEFAULT_VIEWS_PARSED, DEFAULT_INPLANES_PARSED
from pose_processing.geometry.boxes import box_center, box_diagonal
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.pose import Pose, backproject
from pose_processing.lifting.models import Hypothesis, HypothesisPool
from pose_processing.raster.science.canonical_table import CanonicalTable
from pose_processing.viewspace.science.view_assignment import cell_rotation

logger = logging.getLogger(__name__)


def lift(box: np.ndarray, view_id: int, inplane_id: int, table: CanonicalTable, cam: CameraIntrinsics) -> Pose:
    """Pose whose render at the given rotation cell fills the box.

    Depth follows the diagonal ratio z_s = l_r / l_s * z_r, and the model centroid is back-projected from the
    box center shifted by the canonical centroid offset scaled to the new size.
    """
    diagonal = float(box_diagonal(box))
    if diagonal < MIN_BOX_DIAGONAL_PIXELS:
        raise ValueError(f"Box diagonal {diagonal:.2f} px is too small to lift")

    _, canonical_diagonal, centroid_offset = table.lookup(view_id, inplane_id)
    scale = diagonal / canonical_diagonal
    depth = table.z_r / scale

    rotation = cell_rotation(table.viewspace, view_id, inplane_id)
    rotated_centroid = rotation @ table.mesh_centroid
    centroid_pixel = box_center(box) + centroid_offset * scale
    centroid = backproject(centroid_pixel, depth + rotated_centroid[2], cam)
    return Pose.from_matrix(rotation, centroid - rotated_centroid)


def _stable_top(scores: np.ndarray, count: int) -> np.ndarray:
    return np.argsort(-scores, kind="stable")[:count]


def build_pool(detection: Detection, table: CanonicalTable, cam: CameraIntrinsics,
               views_parsed: int = DEFAULT_VIEWS_PARSED,
               inplanes_parsed: int = DEFAULT_INPLANES_PARSED) -> HypothesisPool:
    """Lifts the top view and in-plane ids of a detection, most probable combination first.

    Scores given over the whole icosphere are first restricted to the views kept by the table's view space.
    """
    if views_parsed < 1 or inplanes_parsed < 1:
        raise ValueError(f"Parse counts must be at least 1, got V={views_parsed} R={inplanes_parsed}")
    viewspace = table.viewspace
    view_scores = np.asarray(detection.view_scores, dtype=np.float64)
    if detection.full_sphere_views:
        if view_scores.size <= viewspace.sphere_ids.max():
            raise ValueError(f"Detection carries {view_scores.size} sphere views, "
                             f"view space needs index {viewspace.sphere_ids.max()}")
        view_scores = view_scores[viewspace.sphere_ids]
    if view_scores.size != viewspace.view_count:
        raise ValueError(f"Detection carries {view_scores.size} view scores, view space has {viewspace.view_count}")
    inplane_scores = np.asarray(detection.inplane_scores, dtype=np.float64)
    if inplane_scores.size != viewspace.inplane_count:
        raise ValueError(f"Detection carries {inplane_scores.size} in-plane scores, "
                         f"view space has {viewspace.inplane_count}")

    views = _stable_top(view_scores, views_parsed)
    inplanes = _stable_top(inplane_scores, inplanes_parsed)
    combinations = [(view_id, inplane_id) for view_id in views for inplane_id in inplanes]
    products = np.array([view_scores[v] * inplane_scores[r] for v, r in combinations])

    hypotheses = []
    for index in _stable_top(products, len(combinations)):
        view_id, inplane_id = combinations[index]
        pose = lift(detection.box, int(view_id), int(inplane_id), table, cam)
        hypotheses.append(Hypothesis(pose, int(view_id), int(inplane_id), float(products[index])))
    logger.debug("Pool for prior %d: %d hypotheses", detection.prior_id, len(hypotheses))
    return HypothesisPool(detection, hypotheses)
