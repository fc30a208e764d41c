from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field, asdict, fields
from functools import cached_property
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy import ndimage

from pose_processing.constants import REFINE_ROUNDS, REFINE_INNER_ITERATIONS, ICP_ROUNDS, \
    EDGE_SEARCH_RADIUS_PIXELS, GEMAN_MCCLURE_SCALE_PIXELS, ICP_DEPTH_GATE_METERS, ICP_NORMAL_GATE_DEGREES, \
    MAX_STEP_HALVINGS, MAX_CONTOUR_POINTS, GATE_ANNEALING_ROUNDS
from pose_processing.errors import ConfigurationError
from pose_processing.geometry.pose import Pose


@dataclass(frozen=True, eq=False)
class EdgeMap:
    """Scene gradient magnitude, unit gradient orientation (x, y) and the thresholded edge mask."""
    magnitude: np.ndarray
    orientation: np.ndarray
    mask: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    @property
    def edge_count(self) -> int:
        return int(self.mask.sum())

    @cached_property
    def nearest_edge(self) -> tuple[np.ndarray, np.ndarray]:
        """Distance from every pixel to the closest edge pixel and that pixel's (row, column) index."""
        if not self.mask.any():
            return np.full(self.shape, np.inf), np.zeros((2,) + self.shape, dtype=np.int64)
        return ndimage.distance_transform_edt(~self.mask, return_indices=True)


class RefinementMode(enum.Enum):
    NONE = "none"
    EDGES = "edges"
    ICP = "icp"
    BOTH = "both"

    @classmethod
    def parse(cls, value: str) -> RefinementMode:
        try:
            return cls(value.lower())
        except ValueError:
            raise ConfigurationError(f"Unknown refinement mode {value!r}, expected one of {[m.value for m in cls]}")

    @property
    def uses_depth(self) -> bool:
        return self in (RefinementMode.ICP, RefinementMode.BOTH)


@dataclass(frozen=True)
class RefineConfig:
    rounds: int = REFINE_ROUNDS
    inner_iterations: int = REFINE_INNER_ITERATIONS
    icp_rounds: int = ICP_ROUNDS
    search_radius_px: int = EDGE_SEARCH_RADIUS_PIXELS
    gm_scale: float = GEMAN_MCCLURE_SCALE_PIXELS
    icp_depth_gate: float = ICP_DEPTH_GATE_METERS
    icp_normal_gate: float = ICP_NORMAL_GATE_DEGREES
    max_step_halvings: int = MAX_STEP_HALVINGS
    max_contour_points: int = MAX_CONTOUR_POINTS
    gate_annealing_rounds: int = GATE_ANNEALING_ROUNDS
    verification_depth_gate: Optional[float] = None

    def __post_init__(self):
        for config_field in fields(self):
            value = getattr(self, config_field.name)
            if config_field.name in ("max_step_halvings", "gate_annealing_rounds"):
                if value < 0:
                    raise ConfigurationError(f"{config_field.name} must not be negative, got {value}")
            elif value is not None and value <= 0:
                raise ConfigurationError(f"{config_field.name} must be positive, got {value}")
        if self.icp_normal_gate >= 90:
            raise ConfigurationError(f"Normal gate must be below 90 degrees, got {self.icp_normal_gate}")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, content: dict) -> RefineConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(content) - known
        if unknown:
            raise ConfigurationError(f"Unknown refinement settings {sorted(unknown)}")
        return cls(**content)


@dataclass
class RefinementResult:
    pose: Pose
    residual: float
    skipped: bool = False
    method: str = ""
    trace: list[float] = field(default_factory=list)
    step_objectives: list[list[float]] = field(default_factory=list)

    def write_trace_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["method", "round", "residual"])
            for round_index, residual in enumerate(self.trace):
                writer.writerow([self.method, round_index, f"{residual:.9g}"])
        return path


@dataclass
class PoolRefinement:
    """Outcome of refining a hypothesis pool: the selected pose and the refinement records of every hypothesis,
    in pool order."""
    pose: Pose
    score: float
    best_index: int
    results: list[list[RefinementResult]] = field(default_factory=list)

    @property
    def best_results(self) -> list[RefinementResult]:
        return self.results[self.best_index] if self.results else []
