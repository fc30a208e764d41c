from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional, Union

import numpy as np
import trimesh
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist

from pose_processing.errors import DataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TriMesh:
    vertices: np.ndarray
    faces: np.ndarray
    colors: Optional[np.ndarray] = None

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if len(vertices) == 0:
            raise ValueError("Mesh has no vertices")
        if faces.size and (faces.min() < 0 or faces.max() >= len(vertices)):
            raise ValueError(f"Face indices out of range for {len(vertices)} vertices")
        if np.all(np.ptp(vertices, axis=0) == 0):
            raise ValueError("Mesh vertices are all coincident")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "faces", faces)
        if self.colors is not None:
            colors = np.asarray(self.colors, dtype=np.float64).reshape(-1, 3)
            if len(colors) != len(vertices):
                raise ValueError(f"Expected {len(vertices)} vertex colors, got {len(colors)}")
            object.__setattr__(self, "colors", np.clip(colors, 0.0, 1.0))

    @cached_property
    def diameter(self) -> float:
        candidates = self.vertices
        if len(candidates) > 64:
            try:
                candidates = candidates[ConvexHull(candidates).vertices]
            except QhullError:
                pass
        return float(np.max(pdist(candidates)))

    @cached_property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def face_colors(self) -> np.ndarray:
        if self.colors is None:
            return np.full((len(self.faces), 3), 0.7)
        return self.colors[self.faces].mean(axis=1)

    def to_trimesh(self) -> trimesh.Trimesh:
        vertex_colors = None
        if self.colors is not None:
            vertex_colors = np.round(self.colors * 255).astype(np.uint8)
        return trimesh.Trimesh(vertices=self.vertices, faces=self.faces, vertex_colors=vertex_colors, process=False)

    @classmethod
    def from_trimesh(cls, mesh: trimesh.Trimesh) -> TriMesh:
        colors = None
        if mesh.visual.kind == "vertex":
            colors = np.asarray(mesh.visual.vertex_colors)[:, :3] / 255.0
        return cls(np.array(mesh.vertices), np.array(mesh.faces), colors)


def read_ply(path: Union[str, Path]) -> TriMesh:
    path = Path(path)
    if not path.exists():
        raise DataError(f"Missing mesh file {path}")
    try:
        loaded = trimesh.load(path, file_type="ply", process=False, force="mesh")
    except Exception as e:
        raise DataError(f"Could not read PLY mesh {path}: {e}")
    mesh = TriMesh.from_trimesh(loaded)
    logger.info("Loaded %s: %d vertices, %d faces, diameter %.4f m",
                path.name, len(mesh.vertices), len(mesh.faces), mesh.diameter)
    return mesh


def write_ply(path: Union[str, Path], mesh: TriMesh) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mesh.to_trimesh().export(path, file_type="ply", encoding="ascii")
    return path


def _with_color(mesh: trimesh.Trimesh, color) -> TriMesh:
    colors = None
    if color is not None:
        colors = np.tile(np.asarray(color, dtype=np.float64), (len(mesh.vertices), 1))
    return TriMesh(np.array(mesh.vertices), np.array(mesh.faces), colors)


def make_box(extents, color=None) -> TriMesh:
    return _with_color(trimesh.creation.box(extents=extents), color)


def make_sphere(radius: float, subdivisions: int = 3, color=None) -> TriMesh:
    return _with_color(trimesh.creation.icosphere(subdivisions=subdivisions, radius=radius), color)


def make_cylinder(radius: float, height: float, sections: int = 32, color=None) -> TriMesh:
    return _with_color(trimesh.creation.cylinder(radius=radius, height=height, sections=sections), color)


def make_primitive(description: dict) -> TriMesh:
    kind = description.get("type")
    color = description.get("color")
    if kind == "box":
        return make_box(description["extents"], color)
    if kind == "sphere":
        return make_sphere(description["radius"], description.get("subdivisions", 3), color)
    if kind == "cylinder":
        return make_cylinder(description["radius"], description["height"], description.get("sections", 32), color)
    raise ValueError(f"Unknown primitive type: {kind}")
