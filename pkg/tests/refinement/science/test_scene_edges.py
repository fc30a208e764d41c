import unittest

import numpy as np

from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.mesh import make_box
from pose_processing.geometry.pose import Pose
from pose_processing.raster.science.contour import mask_boundary
from pose_processing.raster.science.rasterizer import render
from pose_processing.refinement.science.scene_edges import scene_edges
from pose_processing.viewspace.science.view_assignment import view_rotation


class TestSceneEdges(unittest.TestCase):
    def test_constant_image_has_no_edges(self):
        for value in [0.0, 0.4, 1.0]:
            with self.subTest(value):
                edges = scene_edges(np.full((30, 40, 3), value))
                self.assertEqual(0, edges.edge_count)
                np.testing.assert_array_equal(0.0, edges.orientation)

    def test_vertical_step_edge(self):
        image = np.zeros((20, 20))
        image[:, 10:] = 1.0

        edges = scene_edges(image)

        columns = np.flatnonzero(edges.mask.any(axis=0))
        self.assertTrue(set(columns) <= set(range(7, 13)))
        self.assertTrue(edges.mask[:, 9].all() and edges.mask[:, 10].all())
        np.testing.assert_allclose(edges.orientation[edges.mask, 0], 1.0, atol=1e-6)
        np.testing.assert_allclose(edges.orientation[edges.mask, 1], 0.0, atol=1e-6)

    def test_orientations_are_unit_on_edges(self):
        rng = np.random.default_rng(1)
        edges = scene_edges(rng.uniform(0, 1, (40, 50, 3)))

        np.testing.assert_allclose(np.linalg.norm(edges.orientation[edges.mask], axis=1), 1.0)
        np.testing.assert_array_equal(0.0, edges.orientation[~edges.mask])

    def test_integer_images_are_scaled(self):
        rng = np.random.default_rng(2)
        image = rng.integers(0, 256, (30, 30, 3)).astype(np.uint8)

        np.testing.assert_allclose(scene_edges(image / 255.0).magnitude, scene_edges(image).magnitude)

    def test_rendered_contour_is_covered_by_edges(self):
        camera = CameraIntrinsics.linemod()
        mesh = make_box((0.1, 0.07, 0.05))
        view = np.array([0.5, -0.4, 0.75]) / np.linalg.norm([0.5, -0.4, 0.75])
        buffers = render(mesh, Pose.from_matrix(view_rotation(view, 10.0), (0.01, -0.02, 0.6)), camera)

        edges = scene_edges(buffers.color)

        contour = mask_boundary(buffers.mask)
        distances, _ = edges.nearest_edge
        self.assertGreaterEqual(np.mean(distances[contour] <= 2.0), 0.8)


if __name__ == '__main__':
    unittest.main()
