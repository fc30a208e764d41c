import numpy as np

from pose_processing.anchors.models import PriorConfig, BoxLabel, TrainingTargets
from pose_processing.anchors.science.matching import match_priors
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.synthgen.models import Annotation


def make_training_targets(annotations: list[Annotation], priors: np.ndarray, prior_cfg: PriorConfig,
                          cam: CameraIntrinsics) -> TrainingTargets:
    """Prior targets for the visible instances, with boxes rescaled from the camera image to the detector input."""
    scale = np.array([prior_cfg.image_width / cam.width, prior_cfg.image_height / cam.height] * 2)
    labels = [BoxLabel(annotation.box * scale, annotation.class_id, annotation.view_id, annotation.inplane_id)
              for annotation in annotations if annotation.visible]
    return match_priors(priors, labels)
