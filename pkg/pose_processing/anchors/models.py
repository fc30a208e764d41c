from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from pose_processing.errors import ConfigurationError

DEFAULT_IMAGE_SIZE = 299
DEFAULT_FEATURE_MAPS = (71, 35, 17, 9, 5, 3)
DEFAULT_SHAPES_PER_SCALE = (3, 3, 6, 6, 6, 6)
MIN_PRIOR_SIZE = 0.1
MAX_PRIOR_SIZE = 0.9


@dataclass(frozen=True)
class PriorScale:
    map_width: int
    map_height: int
    shapes: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if self.map_width <= 0 or self.map_height <= 0:
            raise ConfigurationError(f"Feature map must be non-empty, got {self.map_width}x{self.map_height}")
        if len(self.shapes) == 0 or any(size <= 0 or aspect <= 0 for size, aspect in self.shapes):
            raise ConfigurationError(f"Prior shapes must be positive (size, aspect) pairs, got {self.shapes}")

    @property
    def box_count(self) -> int:
        return self.map_width * self.map_height * len(self.shapes)


@dataclass(frozen=True)
class PriorConfig:
    image_width: int
    image_height: int
    scales: tuple[PriorScale, ...]

    @property
    def box_count(self) -> int:
        return sum(scale.box_count for scale in self.scales)

    def to_json(self) -> dict:
        return {"image_width": self.image_width, "image_height": self.image_height,
                "scales": [{"map_width": s.map_width, "map_height": s.map_height,
                            "shapes": [list(shape) for shape in s.shapes]} for s in self.scales]}

    @classmethod
    def from_json(cls, content: dict) -> PriorConfig:
        try:
            scales = tuple(PriorScale(int(s["map_width"]), int(s["map_height"]),
                                      tuple((float(size), float(aspect)) for size, aspect in s["shapes"]))
                           for s in content["scales"])
            return cls(int(content["image_width"]), int(content["image_height"]), scales)
        except ConfigurationError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid prior configuration: {e}")


def scale_shapes(size: float, next_size: float, shape_count: int) -> tuple[tuple[float, float], ...]:
    if shape_count == 3:
        return (size, 1.0), (size, 2.0), (size, 0.5)
    if shape_count == 6:
        return ((size, 1.0), (size, 2.0), (size, 0.5), (size, 3.0), (size, 1.0 / 3.0),
                (float(np.sqrt(size * next_size)), 1.0))
    raise ConfigurationError(f"Only 3 or 6 shapes per location are supported, got {shape_count}")


def default_prior_config(image_size: int = DEFAULT_IMAGE_SIZE,
                         feature_maps: tuple[int, ...] = DEFAULT_FEATURE_MAPS,
                         shapes_per_scale: tuple[int, ...] = DEFAULT_SHAPES_PER_SCALE) -> PriorConfig:
    """Six-scale lattice with sizes spaced linearly between 0.1 and 0.9 of the image.

    The default maps and shape counts give 21222 priors on a 299x299 input.
    """
    sizes = np.linspace(MIN_PRIOR_SIZE, MAX_PRIOR_SIZE, len(feature_maps))
    next_sizes = np.append(sizes[1:], 1.0)
    scales = tuple(PriorScale(map_size, map_size, scale_shapes(float(size), float(next_size), count))
                   for map_size, size, next_size, count in zip(feature_maps, sizes, next_sizes, shapes_per_scale))
    return PriorConfig(image_size, image_size, scales)


@dataclass(frozen=True)
class BoxLabel:
    box: np.ndarray
    class_id: int
    view_id: int
    inplane_id: int


@dataclass(eq=False)
class PriorPredictions:
    """Raw per-prior detector outputs: corner offsets plus class, view and in-plane logits."""
    offsets: np.ndarray
    class_logits: np.ndarray
    view_logits: np.ndarray
    inplane_logits: np.ndarray

    @property
    def prior_count(self) -> int:
        return len(self.offsets)

    def as_records(self) -> np.ndarray:
        return np.hstack([self.offsets, self.class_logits, self.view_logits, self.inplane_logits])

    @classmethod
    def from_records(cls, records: np.ndarray, class_count: int, view_count: int,
                     inplane_count: int) -> PriorPredictions:
        split = np.cumsum([4, class_count, view_count])
        offsets, classes, views, inplanes = np.split(records, split, axis=1)
        if inplanes.shape[1] != inplane_count:
            raise ValueError(f"Expected {4 + class_count + view_count + inplane_count} values per prior, "
                             f"got {records.shape[1]}")
        return cls(offsets, classes, views, inplanes)

    @classmethod
    def zeros(cls, prior_count: int, class_count: int, view_count: int, inplane_count: int) -> PriorPredictions:
        return cls(np.zeros((prior_count, 4)), np.zeros((prior_count, class_count)),
                   np.zeros((prior_count, view_count)), np.zeros((prior_count, inplane_count)))


@dataclass(eq=False)
class TrainingTargets:
    labels: np.ndarray
    view_ids: np.ndarray
    inplane_ids: np.ndarray
    offsets: np.ndarray
    matched_gt: np.ndarray
    best_iou: np.ndarray
    negatives: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def prior_count(self) -> int:
        return len(self.labels)

    @property
    def positives(self) -> np.ndarray:
        return np.flatnonzero(self.labels > 0)


@dataclass(frozen=True, eq=False)
class Detection:
    prior_id: int
    class_scores: np.ndarray
    view_scores: np.ndarray
    inplane_scores: np.ndarray
    offsets: np.ndarray
    box: np.ndarray
    full_sphere_views: bool = False

    @property
    def class_id(self) -> int:
        return int(np.argmax(self.class_scores[1:])) + 1

    @property
    def score(self) -> float:
        return float(self.class_scores[self.class_id])

    def to_json(self) -> dict:
        return {"prior_id": int(self.prior_id), "class_id": self.class_id, "score": self.score,
                "box": self.box.tolist(), "class_scores": self.class_scores.tolist(),
                "view_scores": self.view_scores.tolist(), "inplane_scores": self.inplane_scores.tolist()}
