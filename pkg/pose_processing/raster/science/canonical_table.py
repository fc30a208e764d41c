from __future__ import annotations

import logging
from pathlib import Path
from typing import Union

import numpy as np

from pose_processing.constants import CANONICAL_DISTANCE_METERS
from pose_processing.errors import ConfigurationError, DataError
from pose_processing.geometry.boxes import box_center, box_diagonal
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.mesh import TriMesh
from pose_processing.geometry.pose import Pose, project
from pose_processing.raster.science.rasterizer import render
from pose_processing.utils import parallel_map, read_json, write_json
from pose_processing.viewspace.models import ViewSpace
from pose_processing.viewspace.science.view_assignment import cell_rotation

logger = logging.getLogger(__name__)


class CanonicalTable:
    def __init__(self, z_r: float, viewspace: ViewSpace, camera: CameraIntrinsics, mesh_centroid: np.ndarray,
                 boxes: np.ndarray, centroid_offsets: np.ndarray):
        self.z_r = z_r
        self.viewspace = viewspace
        self.camera = camera
        self.mesh_centroid = np.asarray(mesh_centroid, dtype=np.float64)
        self.boxes = np.asarray(boxes, dtype=np.float64).reshape(viewspace.view_count, viewspace.inplane_count, 4)
        self.diagonals = box_diagonal(self.boxes)
        self.centroid_offsets = np.asarray(centroid_offsets, dtype=np.float64).reshape(self.boxes.shape[:2] + (2,))
        if np.any(self.diagonals <= 0):
            raise ConfigurationError("Canonical table contains degenerate boxes")

    @property
    def entry_count(self) -> int:
        return self.viewspace.cell_count

    def canonical_pose(self, view_id: int, inplane_id: int) -> Pose:
        return Pose.from_matrix(cell_rotation(self.viewspace, view_id, inplane_id), (0.0, 0.0, self.z_r))

    def lookup(self, view_id: int, inplane_id: int) -> tuple[np.ndarray, float, np.ndarray]:
        return self.boxes[view_id, inplane_id], float(self.diagonals[view_id, inplane_id]), \
            self.centroid_offsets[view_id, inplane_id]

    def to_json(self) -> dict:
        entries = []
        for view_id in range(self.viewspace.view_count):
            for inplane_id in range(self.viewspace.inplane_count):
                entries.append({
                    "key": [view_id, inplane_id],
                    "box": self.boxes[view_id, inplane_id].tolist(),
                    "diagonal": float(self.diagonals[view_id, inplane_id]),
                    "centroid_offset": self.centroid_offsets[view_id, inplane_id].tolist(),
                })
        return {"z_r": self.z_r, "camera": self.camera.to_json(), "viewspace": self.viewspace.to_json(),
                "mesh_centroid": self.mesh_centroid.tolist(), "entries": entries}

    def to_file(self, file_path: Union[str, Path]) -> Path:
        return write_json(file_path, self.to_json())

    @classmethod
    def from_json(cls, content: dict) -> CanonicalTable:
        try:
            viewspace = ViewSpace.from_json(content["viewspace"])
            boxes = np.zeros((viewspace.view_count, viewspace.inplane_count, 4))
            offsets = np.zeros((viewspace.view_count, viewspace.inplane_count, 2))
            if len(content["entries"]) != viewspace.cell_count:
                raise DataError(f"Canonical table has {len(content['entries'])} entries, "
                                f"expected {viewspace.cell_count}")
            for entry in content["entries"]:
                view_id, inplane_id = entry["key"]
                boxes[view_id, inplane_id] = entry["box"]
                offsets[view_id, inplane_id] = entry["centroid_offset"]
            table = cls(float(content["z_r"]), viewspace, CameraIntrinsics.from_json(content["camera"]),
                        np.array(content["mesh_centroid"]), boxes, offsets)
        except (KeyError, IndexError, TypeError) as e:
            raise DataError(f"Malformed canonical table: {e}")
        return table

    @classmethod
    def from_file(cls, file_path: Union[str, Path]) -> CanonicalTable:
        return cls.from_json(read_json(file_path))


def precompute_canonical(mesh: TriMesh, vs: ViewSpace, cam: CameraIntrinsics,
                         z_r: float = CANONICAL_DISTANCE_METERS, threads: int = 1) -> CanonicalTable:
    if mesh.diameter >= 2 * z_r:
        raise ConfigurationError(
            f"Mesh diameter {mesh.diameter:.3f} m does not fit at canonical distance {z_r} m")

    cells = [(view_id, inplane_id) for view_id in range(vs.view_count) for inplane_id in range(vs.inplane_count)]

    def measure_cell(cell: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
        pose = Pose.from_matrix(cell_rotation(vs, *cell), (0.0, 0.0, z_r))
        box = render(mesh, pose, cam).bounding_box()
        if box is None:
            raise ConfigurationError(f"Empty canonical render at view {cell[0]}, in-plane bin {cell[1]}")
        centroid_pixel = project(pose.transform_points(mesh.centroid), cam)
        return box, centroid_pixel - box_center(box)

    measurements = parallel_map(measure_cell, cells, threads)
    logger.info("Precomputed %d canonical cells at z_r=%.3f m", len(cells), z_r)

    boxes = np.array([box for box, _ in measurements])
    offsets = np.array([offset for _, offset in measurements])
    return CanonicalTable(z_r, vs, cam, mesh.centroid, boxes, offsets)
