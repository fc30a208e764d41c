from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
from uncertainties import UFloat
from uncertainties.unumpy import nominal_values, std_devs

from pose_processing.anchors.models import PriorConfig, default_prior_config
from pose_processing.constants import DEFAULT_VIEWS_PARSED, DEFAULT_INPLANES_PARSED, NMS_IOU_THRESHOLD, \
    CANONICAL_DISTANCE_METERS
from pose_processing.errors import ConfigurationError, DataError
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.pose import Pose
from pose_processing.models import DataProduct, DataProductVariable
from pose_processing.refinement.models import RefineConfig, RefinementMode, PoolRefinement
from pose_processing.synthgen.models import ModelEntry, OracleNoise, SceneSpec
from pose_processing.utils import read_json, write_json
from pose_processing.viewspace.models import ViewSpaceConfig, SymmetryClass

DEFAULT_SWEEP_PARSE_COUNTS = ((1, 1), (1, 3), (3, 1), (3, 3), (5, 5))
DEFAULT_FRAME_COUNT = 10
DEFAULT_DETECTION_SCORE_THRESHOLD = 0.1

VIEWS_PARSED_VAR_NAME = "views_parsed"
INPLANES_PARSED_VAR_NAME = "inplanes_parsed"
SWEEP_ADD_VAR_NAME = "add"
SWEEP_ADD_UNCERTAINTY_VAR_NAME = "add_delta"
SWEEP_VSS_VAR_NAME = "vss"
SWEEP_VSS_UNCERTAINTY_VAR_NAME = "vss_delta"
SWEEP_POSE_COUNT_VAR_NAME = "pose_count"
REFINEMENT_VAR_NAME = "refinement"


class DetectorMode(enum.Enum):
    ORACLE = "oracle"
    EXTERNAL = "external"

    @classmethod
    def parse(cls, value: str) -> DetectorMode:
        try:
            return cls(value.lower())
        except ValueError:
            raise ConfigurationError(f"Unknown detector mode {value!r}, expected one of {[m.value for m in cls]}")


@dataclass(frozen=True)
class PipelinePaths:
    meshes: Path = Path(".")
    dataset: Path = Path("dataset")
    tables: Path = Path("tables")
    scores: Path = Path("scores")
    output: Path = Path("output")
    traces: Optional[Path] = None

    def resolved(self, base_directory: Union[str, Path]) -> PipelinePaths:
        """Mesh files are looked up next to the configuration file; working directories stay relative to the
        current directory."""
        return dataclasses.replace(self, meshes=Path(base_directory) / self.meshes)

    def to_json(self) -> dict:
        values = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        return {name: str(value) for name, value in values.items() if value is not None}

    @classmethod
    def from_json(cls, content: dict) -> PipelinePaths:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(content) - known
        if unknown:
            raise ConfigurationError(f"Unknown paths {sorted(unknown)}")
        return cls(**{name: Path(value) for name, value in content.items() if value is not None})


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one experiment needs, loaded from a single JSON file."""
    models: tuple[ModelEntry, ...]
    camera: CameraIntrinsics = field(default_factory=CameraIntrinsics.linemod)
    viewspace: ViewSpaceConfig = field(default_factory=ViewSpaceConfig)
    priors: PriorConfig = field(default_factory=default_prior_config)
    refine: RefineConfig = field(default_factory=RefineConfig)
    oracle_noise: OracleNoise = field(default_factory=OracleNoise)
    scene: SceneSpec = field(default_factory=SceneSpec)
    paths: PipelinePaths = field(default_factory=PipelinePaths)
    views_parsed: int = DEFAULT_VIEWS_PARSED
    inplanes_parsed: int = DEFAULT_INPLANES_PARSED
    detector: DetectorMode = DetectorMode.ORACLE
    refinement: RefinementMode = RefinementMode.BOTH
    detection_score_threshold: float = DEFAULT_DETECTION_SCORE_THRESHOLD
    nms_iou: float = NMS_IOU_THRESHOLD
    canonical_distance: float = CANONICAL_DISTANCE_METERS
    sweep_parse_counts: tuple[tuple[int, int], ...] = DEFAULT_SWEEP_PARSE_COUNTS
    frame_count: int = DEFAULT_FRAME_COUNT
    threads: int = 1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "sweep_parse_counts",
                           tuple((int(v), int(r)) for v, r in self.sweep_parse_counts))
        if self.scene.seed != self.seed:
            object.__setattr__(self, "scene", dataclasses.replace(self.scene, seed=self.seed))

        if len(self.models) == 0:
            raise ConfigurationError("Configuration lists no models")
        class_ids = [entry.class_id for entry in self.models]
        names = [entry.name for entry in self.models]
        if len(set(class_ids)) != len(class_ids) or len(set(names)) != len(names):
            raise ConfigurationError(f"Model names and class ids must be unique, got {names} / {class_ids}")
        for views, inplanes in ((self.views_parsed, self.inplanes_parsed),) + self.sweep_parse_counts:
            if views < 1 or inplanes < 1:
                raise ConfigurationError(f"Parse counts must be at least 1, got V={views} R={inplanes}")
        if self.threads < 1:
            raise ConfigurationError(f"Thread count must be at least 1, got {self.threads}")
        if self.frame_count < 1:
            raise ConfigurationError(f"Frame count must be at least 1, got {self.frame_count}")
        if not 0 < self.detection_score_threshold <= 1 or not 0 < self.nms_iou <= 1:
            raise ConfigurationError(f"Score and NMS thresholds must lie in (0, 1], got "
                                     f"{self.detection_score_threshold} and {self.nms_iou}")
        if self.canonical_distance <= 0:
            raise ConfigurationError(f"Canonical distance must be positive, got {self.canonical_distance}")

    @property
    def class_count(self) -> int:
        """Foreground classes plus background."""
        return max(entry.class_id for entry in self.models) + 1

    @property
    def symmetric_classes(self) -> frozenset:
        return frozenset(entry.class_id for entry in self.models if entry.symmetry != SymmetryClass.NONE)

    def model(self, class_id: int) -> Optional[ModelEntry]:
        return next((entry for entry in self.models if entry.class_id == class_id), None)

    def with_overrides(self, seed: Optional[int] = None, threads: Optional[int] = None,
                       refinement: Optional[str] = None, detector: Optional[str] = None,
                       output: Optional[Union[str, Path]] = None,
                       traces: Optional[Union[str, Path]] = None) -> PipelineConfig:
        changes = {}
        if seed is not None:
            changes["seed"] = seed
        if threads is not None:
            changes["threads"] = threads
        if refinement is not None:
            changes["refinement"] = RefinementMode.parse(refinement)
        if detector is not None:
            changes["detector"] = DetectorMode.parse(detector)
        if output is not None:
            changes["paths"] = dataclasses.replace(self.paths, output=Path(output))
        if traces is not None:
            changes["paths"] = dataclasses.replace(changes.get("paths", self.paths), traces=Path(traces))
        return dataclasses.replace(self, **changes)

    def check_files(self):
        for entry in self.models:
            if entry.ply_path is not None and not (self.paths.meshes / entry.ply_path).exists():
                raise ConfigurationError(f"Mesh file {self.paths.meshes / entry.ply_path} for {entry.name} not found")
        if self.scene.background_directory is not None and not Path(self.scene.background_directory).is_dir():
            raise ConfigurationError(f"Background directory {self.scene.background_directory} not found")

    def to_json(self) -> dict:
        return {
            "models": [entry.to_json() for entry in self.models],
            "camera": self.camera.to_json(),
            "viewspace": self.viewspace.to_json(),
            "priors": self.priors.to_json(),
            "refine": self.refine.to_json(),
            "oracle_noise": self.oracle_noise.to_json(),
            "scene": self.scene.to_json(),
            "paths": self.paths.to_json(),
            "views_parsed": self.views_parsed,
            "inplanes_parsed": self.inplanes_parsed,
            "detector": self.detector.value,
            "refinement": self.refinement.value,
            "detection_score_threshold": self.detection_score_threshold,
            "nms_iou": self.nms_iou,
            "canonical_distance": self.canonical_distance,
            "sweep_parse_counts": [list(counts) for counts in self.sweep_parse_counts],
            "frame_count": self.frame_count,
            "threads": self.threads,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, content: dict, base_directory: Union[str, Path] = ".") -> PipelineConfig:
        content = dict(content)
        try:
            models = [ModelEntry.from_json(entry) for entry in content.pop("models")]
        except KeyError:
            raise ConfigurationError("Configuration lists no models")
        nested = {
            "camera": CameraIntrinsics.from_json,
            "viewspace": ViewSpaceConfig.from_json,
            "priors": PriorConfig.from_json,
            "refine": RefineConfig.from_json,
            "oracle_noise": OracleNoise.from_json,
            "scene": SceneSpec.from_json,
            "paths": PipelinePaths.from_json,
        }
        settings = {}
        for name, parse in nested.items():
            if name in content:
                settings[name] = parse(content.pop(name))
        if "detector" in content:
            settings["detector"] = DetectorMode.parse(content.pop("detector"))
        if "refinement" in content:
            settings["refinement"] = RefinementMode.parse(content.pop("refinement"))

        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(content) - known
        if unknown:
            raise ConfigurationError(f"Unknown configuration settings {sorted(unknown)}")
        settings["paths"] = settings.get("paths", PipelinePaths()).resolved(base_directory)
        scene = settings.get("scene")
        if scene is not None and scene.background_directory is not None:
            settings["scene"] = dataclasses.replace(
                scene, background_directory=str(Path(base_directory) / scene.background_directory))
        try:
            return cls(models, **settings, **content)
        except TypeError as e:
            raise ConfigurationError(f"Invalid configuration: {e}")

    @classmethod
    def from_file(cls, file_path: Union[str, Path]) -> PipelineConfig:
        file_path = Path(file_path)
        if not file_path.exists():
            raise ConfigurationError(f"Configuration file {file_path} not found")
        try:
            content = read_json(file_path)
        except DataError as e:
            raise ConfigurationError(str(e))
        config = cls.from_json(content, file_path.parent)
        config.check_files()
        return config


@dataclass
class PoseEstimate:
    """Refinement records stay in memory; results.json carries only the selected pose."""
    class_id: int
    score: float
    box: np.ndarray
    pose: Pose
    view_id: int
    inplane_id: int
    verification_score: float
    hypothesis_count: int
    refinement: Optional[PoolRefinement] = field(default=None, repr=False, compare=False)

    def to_json(self) -> dict:
        return {"class_id": self.class_id, "score": self.score, "box": self.box.tolist(),
                "pose": self.pose.to_json(), "view_id": self.view_id, "inplane_id": self.inplane_id,
                "verification_score": self.verification_score, "hypothesis_count": self.hypothesis_count}

    @classmethod
    def from_json(cls, content: dict) -> PoseEstimate:
        return cls(int(content["class_id"]), float(content["score"]), np.array(content["box"], dtype=np.float64),
                   Pose.from_json(content["pose"]), int(content["view_id"]), int(content["inplane_id"]),
                   float(content["verification_score"]), int(content["hypothesis_count"]))


@dataclass
class FrameResult:
    frame_index: int
    estimates: list[PoseEstimate] = field(default_factory=list)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {"frame": self.frame_index, "estimates": [estimate.to_json() for estimate in self.estimates]}


def write_results(directory: Union[str, Path], results: list[FrameResult], cfg: PipelineConfig) -> Path:
    """Poses go to results.json and wall-clock times to timings.json, so reruns reproduce results.json exactly."""
    directory = Path(directory)
    write_json(directory / "timings.json",
               {"frames": [{"frame": result.frame_index, "seconds": result.seconds} for result in results],
                "total_seconds": sum(result.seconds for result in results)})
    return write_json(directory / "results.json", {
        "seed": cfg.seed,
        "detector": cfg.detector.value,
        "refinement": cfg.refinement.value,
        "views_parsed": cfg.views_parsed,
        "inplanes_parsed": cfg.inplanes_parsed,
        "frames": [result.to_json() for result in results],
    })


def read_results(path: Union[str, Path]) -> list[FrameResult]:
    content = read_json(path)
    try:
        return [FrameResult(int(frame["frame"]), [PoseEstimate.from_json(e) for e in frame["estimates"]])
                for frame in content["frames"]]
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"Malformed results file {path}: {e}")


@dataclass
class ParsingSweep(DataProduct):
    """Pose accuracy as the number of parsed views and in-plane bins grows."""
    views_parsed: np.ndarray
    inplanes_parsed: np.ndarray
    pose_count: np.ndarray
    add: np.ndarray[UFloat]
    vss: np.ndarray[UFloat]
    refinement: str

    def to_data_product_variables(self) -> list[DataProductVariable]:
        return [
            DataProductVariable(VIEWS_PARSED_VAR_NAME, self.views_parsed),
            DataProductVariable(INPLANES_PARSED_VAR_NAME, self.inplanes_parsed),
            DataProductVariable(SWEEP_POSE_COUNT_VAR_NAME, self.pose_count),
            DataProductVariable(SWEEP_ADD_VAR_NAME, nominal_values(self.add)),
            DataProductVariable(SWEEP_ADD_UNCERTAINTY_VAR_NAME, std_devs(self.add)),
            DataProductVariable(SWEEP_VSS_VAR_NAME, nominal_values(self.vss)),
            DataProductVariable(SWEEP_VSS_UNCERTAINTY_VAR_NAME, std_devs(self.vss)),
            DataProductVariable(REFINEMENT_VAR_NAME, self.refinement, record_varying=False),
        ]
