import logging
from typing import Optional

import numpy as np

from pose_processing.constants import MIN_BOX_DIAGONAL_PIXELS
from pose_processing.geometry.boxes import box_diagonal
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.pose import Pose, backproject
from pose_processing.raster.models import RenderBuffers
from pose_processing.raster.science.rasterizer import render
from pose_processing.synthgen.models import SceneSpec, SceneObject, SyntheticFrame, Annotation
from pose_processing.synthgen.science.backgrounds import procedural_background, background_files, user_background
from pose_processing.utils import parallel_map
from pose_processing.viewspace.models import SymmetryClass
from pose_processing.viewspace.science.view_assignment import view_rotation, assign_view_inplane, model_axis_rotation

logger = logging.getLogger(__name__)


def sample_instance_pose(scene_object: SceneObject, spec: SceneSpec, cam: CameraIntrinsics,
                         rng: np.random.Generator) -> Pose:
    """Random view cell and in-plane angle, centroid at a random depth over the central image region.

    Symmetric models are also turned about their axis so ground-truth azimuths cover the whole circle.
    """
    viewspace = scene_object.viewspace
    view = viewspace.views[rng.integers(viewspace.view_count)]
    inplane = rng.uniform(viewspace.inplane_bins.min(), viewspace.inplane_bins.max())
    rotation = view_rotation(view, inplane)
    if viewspace.symmetry == SymmetryClass.SYMMETRIC:
        rotation = rotation @ model_axis_rotation(rng.uniform(0.0, 360.0))
    elif viewspace.symmetry == SymmetryClass.SEMI_SYMMETRIC:
        rotation = rotation @ model_axis_rotation(180.0 * rng.integers(2))
    margin = spec.centroid_margin
    pixel = (rng.uniform(margin, 1 - margin) * cam.width, rng.uniform(margin, 1 - margin) * cam.height)
    centroid = backproject(pixel, rng.uniform(*spec.z_range), cam)
    return Pose.from_matrix(rotation, centroid - rotation @ scene_object.mesh.centroid)


def place_instance(scene_object: SceneObject, spec: SceneSpec, cam: CameraIntrinsics,
                   rng: np.random.Generator) -> Optional[RenderBuffers]:
    for _ in range(spec.placement_attempts):
        buffers = render(scene_object.mesh, sample_instance_pose(scene_object, spec, cam, rng), cam)
        box = buffers.bounding_box()
        if box is not None and box_diagonal(box) >= MIN_BOX_DIAGONAL_PIXELS:
            return buffers
    logger.warning("Could not place %s after %d attempts", scene_object.entry.name, spec.placement_attempts)
    return None


def composite(background: np.ndarray, renders: list[RenderBuffers]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nearest surface wins per pixel. Returns the image, the depth and the index of the visible instance (-1 for
    background)."""
    image = background.copy()
    depth = np.zeros(background.shape[:2])
    owner = np.full(background.shape[:2], -1, dtype=np.int64)
    if not renders:
        return image, depth, owner
    depths = np.stack([np.where(buffers.mask, buffers.depth, np.inf) for buffers in renders])
    nearest = np.argmin(depths, axis=0)
    covered = np.isfinite(np.min(depths, axis=0))
    owner[covered] = nearest[covered]
    for index, buffers in enumerate(renders):
        visible = owner == index
        image[visible] = buffers.color[visible]
        depth[visible] = buffers.depth[visible]
    return image, depth, owner


def occlusion_fractions(renders: list[RenderBuffers], owner: np.ndarray) -> list[float]:
    """Hidden share of each instance's full mask."""
    fractions = []
    for index, buffers in enumerate(renders):
        total = np.count_nonzero(buffers.mask)
        fractions.append(1.0 - np.count_nonzero(buffers.mask & (owner == index)) / total)
    return fractions


def adjust_brightness_contrast(image: np.ndarray, brightness: float, contrast: float) -> np.ndarray:
    return np.clip((image - 0.5) * contrast + 0.5 + brightness, 0.0, 1.0)


def generate_scene(spec: SceneSpec, objects: list[SceneObject], cam: CameraIntrinsics,
                   frame_index: int = 0) -> SyntheticFrame:
    """Renders randomly posed instances over a background. Frames depend only on the seed and frame index."""
    rng = np.random.default_rng([spec.seed, frame_index])
    height, width = cam.shape
    if spec.background_directory is not None:
        background = user_background(rng, background_files(spec.background_directory), height, width)
    else:
        background = procedural_background(rng, height, width, spec.background_rectangles)

    placed, renders = [], []
    for _ in range(rng.integers(spec.instance_range[0], spec.instance_range[1] + 1)):
        scene_object = objects[rng.integers(len(objects))]
        buffers = place_instance(scene_object, spec, cam, rng)
        if buffers is not None:
            placed.append(scene_object)
            renders.append(buffers)

    image, depth, owner = composite(background, renders)
    image = adjust_brightness_contrast(image, rng.uniform(*spec.brightness_range), rng.uniform(*spec.contrast_range))

    annotations = []
    for scene_object, buffers, occlusion in zip(placed, renders, occlusion_fractions(renders, owner)):
        view_id, inplane_id = assign_view_inplane(buffers.pose.rotation_matrix, scene_object.viewspace)
        annotations.append(Annotation(scene_object.entry.class_id, scene_object.entry.name, buffers.pose,
                                      buffers.bounding_box(), view_id, inplane_id, occlusion))
    logger.debug("Frame %d: %d instances", frame_index, len(annotations))
    return SyntheticFrame(frame_index, image, depth, annotations)


def generate_frames(spec: SceneSpec, objects: list[SceneObject], cam: CameraIntrinsics, frame_count: int,
                    threads: int = 1) -> list[SyntheticFrame]:
    def generate(frame_index: int) -> SyntheticFrame:
        return generate_scene(spec, objects, cam, frame_index)

    return parallel_map(generate, range(frame_count), threads)
