import dataclasses
from pathlib import Path
from typing import Union

import numpy as np

from pose_processing.anchors.models import Detection, PriorConfig
from pose_processing.anchors.score_files import read_score_tensors
from pose_processing.anchors.science.detections import decode_detections
from pose_processing.errors import DataError
from pose_processing.geometry.boxes import clip_boxes
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.synthgen.models import SyntheticFrame, OracleNoise
from pose_processing.synthgen.science.oracle_detector import oracle_detector
from pose_processing.viewspace.models import ViewSpace

ORACLE_STREAM = 1


def oracle_rng(seed: int, frame_index: int) -> np.random.Generator:
    """Independent of the stream that generated the frame itself."""
    return np.random.default_rng([seed, frame_index, ORACLE_STREAM])


def oracle_frame_detections(frame: SyntheticFrame, noise: OracleNoise, viewspaces: dict[int, ViewSpace],
                            class_count: int, cam: CameraIntrinsics, seed: int) -> list[Detection]:
    return oracle_detector(frame.annotations, noise, oracle_rng(seed, frame.frame_index), viewspaces, class_count,
                           cam)


def score_file_path(directory: Union[str, Path], frame_index: int) -> Path:
    return Path(directory) / f"{frame_index:06d}.json"


def external_frame_detections(directory: Union[str, Path], frame_index: int, priors: np.ndarray,
                              prior_cfg: PriorConfig, score_threshold: float,
                              cam: CameraIntrinsics) -> list[Detection]:
    """Decodes a stored score tensor and maps its boxes from the detector input back to the camera image."""
    path = score_file_path(directory, frame_index)
    predictions, full_sphere_views = read_score_tensors(path)
    if predictions.prior_count != len(priors):
        raise DataError(f"Score file {path} holds {predictions.prior_count} priors, the prior configuration "
                        f"generates {len(priors)}")
    detections = decode_detections(priors, predictions, prior_cfg.image_width, prior_cfg.image_height,
                                   score_threshold, full_sphere_views)
    scale = np.array([cam.width / prior_cfg.image_width, cam.height / prior_cfg.image_height] * 2)
    return [dataclasses.replace(detection, box=clip_boxes(detection.box * scale, cam.width, cam.height))
            for detection in detections]
