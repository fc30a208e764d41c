from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial.transform import Rotation

from pose_processing.geometry.camera import CameraIntrinsics


def canonical_quaternion(q) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    norm = np.linalg.norm(q)
    if norm == 0:
        raise ValueError("Quaternion must be non-zero")
    q = q / norm
    nonzero = np.flatnonzero(np.abs(q) > 1e-15)
    if q[nonzero[0]] < 0:
        q = -q
    return q


@dataclass(frozen=True, eq=False)
class Pose:
    """Rigid transform taking model-frame points (meters) into the camera frame.

    rotation is a unit quaternion (w, x, y, z) stored with w >= 0.
    """
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rotation", canonical_quaternion(self.rotation))
        translation = np.asarray(self.translation, dtype=np.float64).reshape(3)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls) -> Pose:
        return cls(np.array([1.0, 0.0, 0.0, 0.0]), np.zeros(3))

    @classmethod
    def from_rotation(cls, rotation: Rotation, translation=(0.0, 0.0, 0.0)) -> Pose:
        x, y, z, w = rotation.as_quat()
        return cls(np.array([w, x, y, z]), np.asarray(translation, dtype=np.float64))

    @classmethod
    def from_matrix(cls, rotation_matrix: np.ndarray, translation=(0.0, 0.0, 0.0)) -> Pose:
        return cls.from_rotation(Rotation.from_matrix(rotation_matrix), translation)

    @cached_property
    def scipy_rotation(self) -> Rotation:
        w, x, y, z = self.rotation
        return Rotation.from_quat([x, y, z, w])

    @cached_property
    def rotation_matrix(self) -> np.ndarray:
        return self.scipy_rotation.as_matrix()

    @property
    def matrix(self) -> np.ndarray:
        matrix = np.eye(4)
        matrix[:3, :3] = self.rotation_matrix
        matrix[:3, 3] = self.translation
        return matrix

    def compose(self, other: Pose) -> Pose:
        rotation = self.scipy_rotation * other.scipy_rotation
        translation = self.rotation_matrix @ other.translation + self.translation
        return Pose.from_rotation(rotation, translation)

    def inverse(self) -> Pose:
        inverse_rotation = self.scipy_rotation.inv()
        return Pose.from_rotation(inverse_rotation, -(inverse_rotation.as_matrix() @ self.translation))

    def transform_points(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        return points @ self.rotation_matrix.T + self.translation

    def apply_twist(self, twist: np.ndarray) -> Pose:
        """Left-multiplies an increment (rotation vector, translation) expressed in the camera frame."""
        increment = Rotation.from_rotvec(np.asarray(twist[:3], dtype=np.float64))
        rotation = increment * self.scipy_rotation
        translation = increment.apply(self.translation) + np.asarray(twist[3:], dtype=np.float64)
        return Pose.from_rotation(rotation, translation)

    def rotation_angle_to(self, other: Pose) -> float:
        relative = self.scipy_rotation.inv() * other.scipy_rotation
        return float(np.degrees(relative.magnitude()))

    def translation_distance_to(self, other: Pose) -> float:
        return float(np.linalg.norm(self.translation - other.translation))

    def to_json(self) -> dict:
        return {"q": self.rotation.tolist(), "t": self.translation.tolist()}

    @classmethod
    def from_json(cls, content: dict) -> Pose:
        return cls(np.array(content["q"], dtype=np.float64), np.array(content["t"], dtype=np.float64))


def transform(pose: Pose, point) -> np.ndarray:
    return pose.transform_points(np.asarray(point, dtype=np.float64))


def project_points(points: np.ndarray, cam: CameraIntrinsics) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    z = points[..., 2]
    if np.any(z <= 0):
        raise ValueError("Cannot project points with non-positive depth")
    u = cam.fx * points[..., 0] / z + cam.cx
    v = cam.fy * points[..., 1] / z + cam.cy
    return np.stack([u, v], axis=-1)


def project(point, cam: CameraIntrinsics) -> np.ndarray:
    return project_points(np.asarray(point, dtype=np.float64).reshape(3), cam)


def backproject_pixels(pixels: np.ndarray, depths, cam: CameraIntrinsics) -> np.ndarray:
    pixels = np.asarray(pixels, dtype=np.float64)
    depths = np.asarray(depths, dtype=np.float64)
    if np.any(depths <= 0):
        raise ValueError("Cannot back-project with non-positive depth")
    x = (pixels[..., 0] - cam.cx) * depths / cam.fx
    y = (pixels[..., 1] - cam.cy) * depths / cam.fy
    return np.stack([x, y, np.broadcast_to(depths, x.shape)], axis=-1)


def backproject(pixel, depth: float, cam: CameraIntrinsics) -> np.ndarray:
    return backproject_pixels(np.asarray(pixel, dtype=np.float64).reshape(2), depth, cam)


def projection_jacobians(points: np.ndarray, cam: CameraIntrinsics) -> np.ndarray:
    """Jacobians (N, 2, 6) of pixel positions w.r.t. a camera-frame twist (rotation vector, translation)."""
    x, y, z = points[:, 0], points[:, 1], points[:, 2]
    inverse_z = 1.0 / z
    d_pixel_d_point = np.zeros((len(points), 2, 3))
    d_pixel_d_point[:, 0, 0] = cam.fx * inverse_z
    d_pixel_d_point[:, 0, 2] = -cam.fx * x * inverse_z ** 2
    d_pixel_d_point[:, 1, 1] = cam.fy * inverse_z
    d_pixel_d_point[:, 1, 2] = -cam.fy * y * inverse_z ** 2

    d_point_d_twist = np.zeros((len(points), 3, 6))
    d_point_d_twist[:, :, :3] = -skew(points)
    d_point_d_twist[:, :, 3:] = np.eye(3)
    return d_pixel_d_point @ d_point_d_twist


def skew(vectors: np.ndarray) -> np.ndarray:
    vectors = np.atleast_2d(vectors)
    matrices = np.zeros((len(vectors), 3, 3))
    matrices[:, 0, 1] = -vectors[:, 2]
    matrices[:, 0, 2] = vectors[:, 1]
    matrices[:, 1, 0] = vectors[:, 2]
    matrices[:, 1, 2] = -vectors[:, 0]
    matrices[:, 2, 0] = -vectors[:, 1]
    matrices[:, 2, 1] = vectors[:, 0]
    return matrices
