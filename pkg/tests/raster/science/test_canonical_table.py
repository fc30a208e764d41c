import numpy as np

from pose_processing.errors import ConfigurationError, DataError
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.mesh import make_sphere, make_box
from pose_processing.geometry.pose import project
from pose_processing.raster.science.canonical_table import precompute_canonical, CanonicalTable
from pose_processing.raster.science.rasterizer import render
from pose_processing.viewspace.models import SymmetryClass
from pose_processing.viewspace.science.icosphere import build_viewspace
from tests.temp_file_test_case import TempFileTestCase


class TestCanonicalTable(TempFileTestCase):
    def setUp(self) -> None:
        super().setUp()
        self.cam = CameraIntrinsics(300, 300, 80, 60, 160, 120)
        self.vs = build_viewspace(0, False, SymmetryClass.NONE, (-10, 10, 10))

    def test_entry_count_for_level_three_hemisphere(self):
        vs = build_viewspace(3, True, SymmetryClass.NONE, (-45, 45, 5))
        tiny_cam = CameraIntrinsics(40, 40, 16, 12, 32, 24)

        table = precompute_canonical(make_box([0.1, 0.08, 0.06]), vs, tiny_cam, threads=4)

        self.assertEqual(6403, table.entry_count)
        self.assertEqual((337, 19, 4), table.boxes.shape)
        self.assertTrue(np.all(table.diagonals > 0))

    def test_sphere_diagonal_is_view_independent(self):
        table = precompute_canonical(make_sphere(0.05, subdivisions=3), self.vs, self.cam)

        self.assertLessEqual(np.max(np.abs(table.diagonals - np.median(table.diagonals))), 1.0)

    def test_centered_symmetric_mesh_has_small_centroid_offset(self):
        table = precompute_canonical(make_sphere(0.05, subdivisions=2), self.vs, self.cam)

        self.assertLessEqual(np.max(np.abs(table.centroid_offsets)), 1.0)

    def test_entries_match_direct_render(self):
        mesh = make_box([0.12, 0.05, 0.08])
        table = precompute_canonical(mesh, self.vs, self.cam, z_r=0.5)

        for view_id, inplane_id in [(0, 0), (5, 1), (11, 2)]:
            with self.subTest(view=view_id, inplane=inplane_id):
                pose = table.canonical_pose(view_id, inplane_id)
                box = render(mesh, pose, self.cam).bounding_box()
                expected_offset = project(pose.translation, self.cam) - (box[:2] + box[2:]) / 2
                stored_box, diagonal, offset = table.lookup(view_id, inplane_id)
                np.testing.assert_array_equal(box, stored_box)
                self.assertAlmostEqual(np.hypot(box[2] - box[0], box[3] - box[1]), diagonal)
                np.testing.assert_allclose(expected_offset, offset, atol=1e-9)

    def test_parallel_matches_serial(self):
        mesh = make_box([0.12, 0.05, 0.08])
        serial = precompute_canonical(mesh, self.vs, self.cam, threads=1)
        parallel = precompute_canonical(mesh, self.vs, self.cam, threads=3)

        np.testing.assert_array_equal(serial.boxes, parallel.boxes)
        np.testing.assert_array_equal(serial.centroid_offsets, parallel.centroid_offsets)

    def test_rejects_mesh_too_large_for_canonical_distance(self):
        with self.assertRaises(ConfigurationError):
            precompute_canonical(make_box([0.8, 0.8, 0.8]), self.vs, self.cam)

    def test_rejects_cells_with_empty_masks(self):
        offset_cam = CameraIntrinsics(300, 300, 1, 1, 2, 2)
        with self.assertRaises(ConfigurationError) as context:
            precompute_canonical(make_box([0.001, 0.001, 0.001]), self.vs, offset_cam)
        self.assertIn("view", str(context.exception))

    def test_file_roundtrip(self):
        table = precompute_canonical(make_box([0.12, 0.05, 0.08]), self.vs, self.cam)
        path = table.to_file(self.temp_directory / "canonical.json")

        restored = CanonicalTable.from_file(path)

        self.assertEqual(table.z_r, restored.z_r)
        self.assertEqual(table.camera, restored.camera)
        np.testing.assert_array_equal(table.boxes, restored.boxes)
        np.testing.assert_array_equal(table.centroid_offsets, restored.centroid_offsets)
        np.testing.assert_array_equal(table.viewspace.views, restored.viewspace.views)

    def test_missing_or_malformed_file(self):
        with self.assertRaises(DataError):
            CanonicalTable.from_file(self.temp_directory / "missing.json")
        with self.assertRaises(DataError):
            CanonicalTable.from_json({"z_r": 0.5})
