import logging
from pathlib import Path
from typing import Union

from pose_processing.errors import DataError
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.synthgen.models import SyntheticFrame, Annotation
from pose_processing.utils import write_json, read_json, write_color_ppm, write_depth_pgm, read_color_ppm, \
    read_depth_pgm

logger = logging.getLogger(__name__)

FRAMES_DIRECTORY = "frames"
MANIFEST_FILE = "manifest.json"


def frame_stem(directory: Union[str, Path], frame_index: int) -> Path:
    return Path(directory) / FRAMES_DIRECTORY / f"{frame_index:06d}"


def write_frame(directory: Union[str, Path], frame: SyntheticFrame) -> Path:
    stem = frame_stem(directory, frame.frame_index)
    write_color_ppm(stem.with_suffix(".ppm"), frame.image)
    write_depth_pgm(stem.with_suffix(".depth.pgm"), frame.depth)
    return write_json(stem.with_suffix(".json"),
                      {"frame": frame.frame_index, "annotations": [a.to_json() for a in frame.annotations]})


def write_dataset(directory: Union[str, Path], frames: list[SyntheticFrame], manifest: dict) -> Path:
    """Frames as frames/NNNNNN.ppm, .depth.pgm and .json next to a manifest echoing how they were made."""
    for frame in frames:
        write_frame(directory, frame)
    manifest_path = write_json(Path(directory) / MANIFEST_FILE,
                               {**manifest, "frame_indices": [frame.frame_index for frame in frames]})
    logger.info("Wrote %d frames to %s", len(frames), directory)
    return manifest_path


def read_manifest(directory: Union[str, Path]) -> dict:
    manifest = read_json(Path(directory) / MANIFEST_FILE)
    if "frame_indices" not in manifest or "camera" not in manifest:
        raise DataError(f"Dataset manifest in {directory} lacks frame indices or camera")
    return manifest


def read_camera(directory: Union[str, Path]) -> CameraIntrinsics:
    return CameraIntrinsics.from_json(read_manifest(directory)["camera"])


def read_annotations(directory: Union[str, Path], frame_index: int) -> list[Annotation]:
    content = read_json(frame_stem(directory, frame_index).with_suffix(".json"))
    try:
        return [Annotation.from_json(annotation) for annotation in content["annotations"]]
    except (KeyError, TypeError) as e:
        raise DataError(f"Malformed annotations for frame {frame_index} in {directory}: {e}")


def read_frame(directory: Union[str, Path], frame_index: int) -> SyntheticFrame:
    stem = frame_stem(directory, frame_index)
    image = read_color_ppm(stem.with_suffix(".ppm"))
    depth = read_depth_pgm(stem.with_suffix(".depth.pgm"))
    return SyntheticFrame(frame_index, image, depth, read_annotations(directory, frame_index))
