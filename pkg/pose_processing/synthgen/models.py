from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional, Union

import numpy as np

from pose_processing.errors import ConfigurationError, DataError
from pose_processing.geometry.mesh import TriMesh, read_ply, make_primitive
from pose_processing.geometry.pose import Pose
from pose_processing.viewspace.models import SymmetryClass, ViewSpace


@dataclass(frozen=True)
class ModelEntry:
    """One object model: a PLY file relative to the config, or a primitive description such as
    {"type": "box", "extents": [0.1, 0.07, 0.05]}."""
    name: str
    class_id: int
    symmetry: SymmetryClass = SymmetryClass.NONE
    ply_path: Optional[str] = None
    primitive: Optional[dict] = None

    def __post_init__(self):
        if self.class_id < 1:
            raise ConfigurationError(f"Model {self.name} needs a class id of at least 1, got {self.class_id}")
        if (self.ply_path is None) == (self.primitive is None):
            raise ConfigurationError(f"Model {self.name} needs exactly one of ply_path and primitive")

    def load_mesh(self, base_directory: Union[str, Path] = ".") -> TriMesh:
        if self.ply_path is not None:
            return read_ply(Path(base_directory) / self.ply_path)
        try:
            return make_primitive(self.primitive)
        except (KeyError, ValueError) as e:
            raise ConfigurationError(f"Invalid primitive for model {self.name}: {e}")

    def to_json(self) -> dict:
        content = {"name": self.name, "class_id": self.class_id, "symmetry": self.symmetry.value}
        if self.ply_path is not None:
            content["ply_path"] = self.ply_path
        else:
            content["primitive"] = self.primitive
        return content

    @classmethod
    def from_json(cls, content: dict) -> ModelEntry:
        try:
            return cls(content["name"], int(content["class_id"]),
                       SymmetryClass.parse(content.get("symmetry", SymmetryClass.NONE.value)),
                       content.get("ply_path"), content.get("primitive"))
        except KeyError as e:
            raise ConfigurationError(f"Model entry missing field {e}")


@dataclass(frozen=True, eq=False)
class SceneObject:
    entry: ModelEntry
    mesh: TriMesh
    viewspace: ViewSpace


@dataclass(frozen=True)
class SceneSpec:
    instance_range: tuple[int, int] = (1, 3)
    z_range: tuple[float, float] = (0.4, 1.2)
    centroid_margin: float = 0.1
    brightness_range: tuple[float, float] = (-0.1, 0.1)
    contrast_range: tuple[float, float] = (0.8, 1.2)
    background_directory: Optional[str] = None
    background_rectangles: int = 8
    placement_attempts: int = 20
    seed: int = 0

    def __post_init__(self):
        for name in ("instance_range", "z_range", "brightness_range", "contrast_range"):
            value = tuple(getattr(self, name))
            object.__setattr__(self, name, value)
            if len(value) != 2 or value[0] > value[1]:
                raise ConfigurationError(f"{name} must be an ordered (min, max) pair, got {value}")
        if self.z_range[0] <= 0:
            raise ConfigurationError(f"Scene depth range must be positive, got {self.z_range}")
        if self.instance_range[0] < 1:
            raise ConfigurationError(f"Scenes need at least one instance, got {self.instance_range}")
        if self.contrast_range[0] <= 0:
            raise ConfigurationError(f"Contrast factors must be positive, got {self.contrast_range}")
        if not 0 <= self.centroid_margin < 0.5:
            raise ConfigurationError(f"Centroid margin must lie in [0, 0.5), got {self.centroid_margin}")

    def to_json(self) -> dict:
        content = {}
        for spec_field in fields(self):
            value = getattr(self, spec_field.name)
            content[spec_field.name] = list(value) if isinstance(value, tuple) else value
        return content

    @classmethod
    def from_json(cls, content: dict) -> SceneSpec:
        known = {f.name for f in fields(cls)}
        unknown = set(content) - known
        if unknown:
            raise ConfigurationError(f"Unknown scene settings {sorted(unknown)}")
        return cls(**content)


@dataclass(frozen=True)
class OracleNoise:
    box_jitter_px: float = 0.0
    confusion_rate: float = 0.0
    score_noise: float = 0.0
    false_positive_rate: float = 0.0

    def __post_init__(self):
        if self.box_jitter_px < 0 or self.score_noise < 0:
            raise ConfigurationError(f"Noise levels must not be negative: {self}")
        if not 0 <= self.confusion_rate <= 1 or not 0 <= self.false_positive_rate <= 1:
            raise ConfigurationError(f"Rates must lie in [0, 1]: {self}")

    def to_json(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_json(cls, content: dict) -> OracleNoise:
        known = {f.name for f in fields(cls)}
        unknown = set(content) - known
        if unknown:
            raise ConfigurationError(f"Unknown oracle noise settings {sorted(unknown)}")
        return cls(**content)


@dataclass
class Annotation:
    class_id: int
    model_name: str
    pose: Pose
    box: np.ndarray
    view_id: int
    inplane_id: int
    occlusion: float

    @property
    def visible(self) -> bool:
        return self.occlusion < 1.0

    def to_json(self) -> dict:
        return {"class_id": self.class_id, "model": self.model_name, "pose": self.pose.to_json(),
                "box": self.box.tolist(), "view_id": self.view_id, "inplane_id": self.inplane_id,
                "occlusion": self.occlusion}

    @classmethod
    def from_json(cls, content: dict) -> Annotation:
        try:
            return cls(int(content["class_id"]), content["model"], Pose.from_json(content["pose"]),
                       np.array(content["box"], dtype=np.float64), int(content["view_id"]),
                       int(content["inplane_id"]), float(content["occlusion"]))
        except (KeyError, TypeError, ValueError) as e:
            raise DataError(f"Malformed annotation: {e}")


@dataclass(eq=False)
class SyntheticFrame:
    frame_index: int
    image: np.ndarray
    depth: np.ndarray
    annotations: list[Annotation] = field(default_factory=list)
