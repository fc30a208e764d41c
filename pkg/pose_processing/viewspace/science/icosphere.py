import logging

import numpy as np

from pose_processing.constants import ICOSPHERE_MAX_LEVEL, VIEW_TOLERANCE
from pose_processing.errors import ConfigurationError
from pose_processing.viewspace.models import SymmetryClass, ViewSpace

logger = logging.getLogger(__name__)

GOLDEN_RATIO = (1.0 + np.sqrt(5.0)) / 2.0

ICOSAHEDRON_FACES = np.array([
    [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
    [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
    [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
    [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
])


def icosahedron_vertices() -> np.ndarray:
    t = GOLDEN_RATIO
    vertices = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=np.float64)
    return vertices / np.linalg.norm(vertices, axis=1, keepdims=True)


def _subdivide(vertices: list, faces: np.ndarray) -> np.ndarray:
    midpoints = {}

    def midpoint(a: int, b: int) -> int:
        key = (min(a, b), max(a, b))
        if key not in midpoints:
            middle = vertices[a] + vertices[b]
            vertices.append(middle / np.linalg.norm(middle))
            midpoints[key] = len(vertices) - 1
        return midpoints[key]

    new_faces = []
    for a, b, c in faces:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        new_faces.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]])
    return np.array(new_faces)


def build_icosphere(level: int) -> np.ndarray:
    """Vertices of a subdivided icosahedron, 10 * 4**level + 2 unit vectors in a fixed order."""
    if not 0 <= level <= ICOSPHERE_MAX_LEVEL:
        raise ConfigurationError(f"Icosphere level must be between 0 and {ICOSPHERE_MAX_LEVEL}, got {level}")
    vertices = list(icosahedron_vertices())
    faces = ICOSAHEDRON_FACES
    for _ in range(level):
        faces = _subdivide(vertices, faces)
    return np.array(vertices)


def inplane_bins(min_deg: float, max_deg: float, step_deg: float) -> np.ndarray:
    if step_deg <= 0 or max_deg < min_deg:
        raise ConfigurationError(f"Invalid in-plane range ({min_deg}, {max_deg}, {step_deg})")
    count = (max_deg - min_deg) / step_deg
    if abs(count - round(count)) > 1e-9:
        raise ConfigurationError(f"In-plane step {step_deg} does not divide range [{min_deg}, {max_deg}]")
    return min_deg + step_deg * np.arange(int(round(count)) + 1)


def symmetry_filter(views: np.ndarray, hemisphere_only: bool, symmetry: SymmetryClass) -> np.ndarray:
    keep = np.ones(len(views), dtype=bool)
    if hemisphere_only:
        keep &= views[:, 2] >= -VIEW_TOLERANCE
    if symmetry in (SymmetryClass.SEMI_SYMMETRIC, SymmetryClass.SYMMETRIC):
        keep &= views[:, 1] >= -VIEW_TOLERANCE
    if symmetry == SymmetryClass.SYMMETRIC:
        keep &= np.abs(views[:, 0]) <= VIEW_TOLERANCE
    return keep


def build_viewspace(level: int, hemisphere_only: bool, symmetry: SymmetryClass,
                    inplane: tuple[float, float, float]) -> ViewSpace:
    sphere = build_icosphere(level)
    bins = inplane_bins(*inplane)
    sphere_ids = np.flatnonzero(symmetry_filter(sphere, hemisphere_only, symmetry))
    if len(sphere_ids) == 0:
        raise ConfigurationError(
            f"No views left for level {level}, hemisphere_only={hemisphere_only}, symmetry={symmetry.value}")
    logger.debug("View space level %d (%s): %d of %d views, %d in-plane bins",
                 level, symmetry.value, len(sphere_ids), len(sphere), len(bins))
    return ViewSpace(sphere[sphere_ids], bins, symmetry, level, hemisphere_only, sphere_ids)
