from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pose_processing.constants import LINEMOD_FX, LINEMOD_FY, LINEMOD_CX, LINEMOD_CY, LINEMOD_WIDTH, \
    LINEMOD_HEIGHT
from pose_processing.errors import ConfigurationError


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ConfigurationError(f"Focal lengths must be positive, got fx={self.fx} fy={self.fy}")
        if not 0 <= self.cx < self.width or not 0 <= self.cy < self.height:
            raise ConfigurationError(
                f"Principal point ({self.cx}, {self.cy}) outside image {self.width}x{self.height}")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx],
                         [0.0, self.fy, self.cy],
                         [0.0, 0.0, 1.0]])

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width

    def pixel_centers(self) -> tuple[np.ndarray, np.ndarray]:
        columns, rows = np.meshgrid(np.arange(self.width) + 0.5, np.arange(self.height) + 0.5)
        return columns, rows

    def to_json(self) -> dict:
        return {"fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy,
                "width": self.width, "height": self.height}

    @classmethod
    def from_json(cls, content: dict) -> CameraIntrinsics:
        try:
            return cls(float(content["fx"]), float(content["fy"]), float(content["cx"]), float(content["cy"]),
                       int(content["width"]), int(content["height"]))
        except KeyError as e:
            raise ConfigurationError(f"Camera intrinsics missing field {e}")

    @classmethod
    def linemod(cls) -> CameraIntrinsics:
        return cls(LINEMOD_FX, LINEMOD_FY, LINEMOD_CX, LINEMOD_CY, LINEMOD_WIDTH, LINEMOD_HEIGHT)
