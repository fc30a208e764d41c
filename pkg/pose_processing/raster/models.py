from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from pose_processing.geometry.boxes import mask_bounding_box
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.pose import Pose


@dataclass(frozen=True, eq=False)
class RenderBuffers:
    color: np.ndarray
    depth: np.ndarray
    mask: np.ndarray
    normals: np.ndarray
    face_index: np.ndarray
    pose: Pose
    camera: CameraIntrinsics
    behind_camera: bool = False

    @classmethod
    def empty(cls, pose: Pose, camera: CameraIntrinsics, behind_camera: bool = False) -> RenderBuffers:
        height, width = camera.shape
        return cls(np.zeros((height, width, 3)), np.zeros((height, width)), np.zeros((height, width), dtype=bool),
                   np.zeros((height, width, 3)), np.full((height, width), -1, dtype=np.int64), pose, camera,
                   behind_camera)

    @property
    def visible(self) -> bool:
        return bool(self.mask.any())

    def bounding_box(self) -> Optional[np.ndarray]:
        return mask_bounding_box(self.mask)


@dataclass(frozen=True, eq=False)
class ContourPoints:
    """Boundary pixels of a rendered mask with their model-frame points and outward image normals."""
    pixels: np.ndarray
    model_points: np.ndarray
    normals: np.ndarray

    def __len__(self) -> int:
        return len(self.pixels)

    @property
    def pixel_centers(self) -> np.ndarray:
        return self.pixels + 0.5

    def subsample(self, max_points: int) -> ContourPoints:
        if len(self) <= max_points:
            return self
        indices = np.linspace(0, len(self) - 1, max_points).round().astype(int)
        return ContourPoints(self.pixels[indices], self.model_points[indices], self.normals[indices])
