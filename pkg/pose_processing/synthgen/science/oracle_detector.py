import numpy as np

from pose_processing.anchors.models import Detection
from pose_processing.geometry.boxes import clip_boxes
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.synthgen.models import Annotation, OracleNoise
from pose_processing.viewspace.models import ViewSpace
from pose_processing.viewspace.science.view_assignment import wrapped_angle_difference

VIEW_NEIGHBOURS = 4
INPLANE_NEIGHBOURS = 2
NEIGHBOUR_MASS = 0.5
MIN_ORACLE_SCORE = 0.05
FALSE_POSITIVE_MAX_SCORE = 0.5


def view_neighbours(viewspace: ViewSpace, view_id: int) -> np.ndarray:
    closeness = viewspace.views @ viewspace.views[view_id]
    order = np.lexsort((np.arange(viewspace.view_count), -closeness))
    return order[order != view_id][:VIEW_NEIGHBOURS]


def inplane_neighbours(viewspace: ViewSpace, inplane_id: int) -> np.ndarray:
    distance = np.abs(wrapped_angle_difference(viewspace.inplane_bins, viewspace.inplane_bins[inplane_id]))
    order = np.lexsort((np.arange(viewspace.inplane_count), distance))
    return order[order != inplane_id][:INPLANE_NEIGHBOURS]


def peaked_scores(count: int, truth: int, neighbours: np.ndarray, confusion_rate: float,
                  rng: np.random.Generator) -> np.ndarray:
    """Probability vector peaked at the truth. With probability confusion_rate one neighbour outranks it, so the
    truth always stays within the two best entries."""
    weights = np.zeros(count)
    weights[truth] = 1.0
    weights[neighbours] = confusion_rate * NEIGHBOUR_MASS * rng.uniform(0, 1, len(neighbours))
    confused = rng.uniform() < confusion_rate
    if confused and len(neighbours):
        weights[neighbours[rng.integers(len(neighbours))]] = 1.0 + NEIGHBOUR_MASS * rng.uniform()
    return weights / weights.sum()


def _detection(index: int, class_id: int, score: float, class_count: int, box: np.ndarray,
               view_scores: np.ndarray, inplane_scores: np.ndarray) -> Detection:
    class_scores = np.zeros(class_count)
    class_scores[class_id] = score
    class_scores[0] = 1.0 - score
    return Detection(index, class_scores, view_scores, inplane_scores, np.zeros(4), box)


def jitter_box(box: np.ndarray, sigma: float, rng: np.random.Generator, cam: CameraIntrinsics) -> np.ndarray:
    jittered = clip_boxes(box + rng.normal(0, sigma, 4), cam.width, cam.height)
    return np.array([min(jittered[0], jittered[2]), min(jittered[1], jittered[3]),
                     max(jittered[0], jittered[2]), max(jittered[1], jittered[3])])


def oracle_detector(annotations: list[Annotation], noise: OracleNoise, rng: np.random.Generator,
                    viewspaces: dict[int, ViewSpace], class_count: int, cam: CameraIntrinsics) -> list[Detection]:
    """Stand-in for the network: one detection per visible instance, highest score first.

    class_count includes the background class.
    """
    detections = []
    for annotation in annotations:
        if not annotation.visible:
            continue
        viewspace = viewspaces[annotation.class_id]
        box = jitter_box(annotation.box, noise.box_jitter_px, rng, cam)
        score = float(np.clip(1.0 - abs(rng.normal(0, noise.score_noise)), MIN_ORACLE_SCORE, 1.0))
        view_scores = peaked_scores(viewspace.view_count, annotation.view_id,
                                    view_neighbours(viewspace, annotation.view_id), noise.confusion_rate, rng)
        inplane_scores = peaked_scores(viewspace.inplane_count, annotation.inplane_id,
                                       inplane_neighbours(viewspace, annotation.inplane_id), noise.confusion_rate,
                                       rng)
        detections.append(_detection(len(detections), annotation.class_id, score, class_count, box, view_scores,
                                     inplane_scores))

    if rng.uniform() < noise.false_positive_rate:
        class_ids = sorted(viewspaces)
        class_id = class_ids[rng.integers(len(class_ids))]
        viewspace = viewspaces[class_id]
        size = rng.uniform(20, min(cam.width, cam.height) / 3, 2)
        corner = rng.uniform(0, 1, 2) * ([cam.width, cam.height] - size)
        box = np.concatenate([corner, corner + size])
        view_scores = peaked_scores(viewspace.view_count, int(rng.integers(viewspace.view_count)), np.array([], int),
                                    0.0, rng)
        inplane_scores = peaked_scores(viewspace.inplane_count, int(rng.integers(viewspace.inplane_count)),
                                       np.array([], int), 0.0, rng)
        score = rng.uniform(MIN_ORACLE_SCORE, FALSE_POSITIVE_MAX_SCORE)
        detections.append(_detection(len(detections), class_id, score, class_count, box, view_scores, inplane_scores))

    order = np.lexsort((np.arange(len(detections)), [-detection.score for detection in detections]))
    return [detections[index] for index in order]
