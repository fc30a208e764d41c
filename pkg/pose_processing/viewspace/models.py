from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from pose_processing.constants import DEFAULT_ICOSPHERE_LEVEL, DEFAULT_INPLANE_RANGE_DEGREES
from pose_processing.errors import ConfigurationError


class SymmetryClass(enum.Enum):
    NONE = "none"
    SEMI_SYMMETRIC = "semi_symmetric"
    SYMMETRIC = "symmetric"

    @classmethod
    def parse(cls, value: str) -> SymmetryClass:
        try:
            return cls(value.lower())
        except ValueError:
            raise ConfigurationError(
                f"Unknown symmetry class {value!r}, expected one of {[s.value for s in cls]}")


@dataclass(frozen=True, eq=False)
class ViewSpace:
    views: np.ndarray
    inplane_bins: np.ndarray
    symmetry: SymmetryClass
    subdivision_level: int
    hemisphere_only: bool = True
    sphere_ids: np.ndarray = None

    def __post_init__(self):
        views = np.asarray(self.views, dtype=np.float64).reshape(-1, 3)
        object.__setattr__(self, "views", views)
        object.__setattr__(self, "inplane_bins", np.asarray(self.inplane_bins, dtype=np.float64))
        if self.sphere_ids is None:
            object.__setattr__(self, "sphere_ids", np.arange(len(views)))
        else:
            object.__setattr__(self, "sphere_ids", np.asarray(self.sphere_ids, dtype=np.int64))

    @property
    def view_count(self) -> int:
        return len(self.views)

    @property
    def inplane_count(self) -> int:
        return len(self.inplane_bins)

    @property
    def cell_count(self) -> int:
        return self.view_count * self.inplane_count

    def to_json(self) -> dict:
        return {
            "level": self.subdivision_level,
            "views": self.views.tolist(),
            "inplane": self.inplane_bins.tolist(),
            "symmetry": self.symmetry.value,
            "hemisphere": self.hemisphere_only,
            "sphere_ids": self.sphere_ids.tolist(),
        }

    @classmethod
    def from_json(cls, content: dict) -> ViewSpace:
        try:
            return cls(np.array(content["views"]), np.array(content["inplane"]),
                       SymmetryClass.parse(content["symmetry"]), int(content["level"]),
                       bool(content.get("hemisphere", True)), content.get("sphere_ids"))
        except KeyError as e:
            raise ConfigurationError(f"View space JSON missing field {e}")


@dataclass(frozen=True)
class ViewSpaceConfig:
    level: int = DEFAULT_ICOSPHERE_LEVEL
    hemisphere_only: bool = True
    inplane_range: tuple[float, float, float] = DEFAULT_INPLANE_RANGE_DEGREES

    @classmethod
    def from_json(cls, content: dict) -> ViewSpaceConfig:
        return cls(int(content.get("level", DEFAULT_ICOSPHERE_LEVEL)), bool(content.get("hemisphere_only", True)),
                   tuple(content.get("inplane_range", DEFAULT_INPLANE_RANGE_DEGREES)))

    def to_json(self) -> dict:
        return {"level": self.level, "hemisphere_only": self.hemisphere_only,
                "inplane_range": list(self.inplane_range)}
