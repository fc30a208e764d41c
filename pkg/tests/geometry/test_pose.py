import unittest

import numpy as np
from scipy.spatial.transform import Rotation

from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.pose import Pose, project, backproject, transform, project_points, \
    backproject_pixels, projection_jacobians


class TestPose(unittest.TestCase):
    def setUp(self) -> None:
        self.cam = CameraIntrinsics(500, 500, 320, 240, 640, 480)
        self.rng = np.random.default_rng(7)

    def random_pose(self) -> Pose:
        return Pose.from_rotation(Rotation.random(random_state=self.rng.integers(1_000_000)),
                                  self.rng.uniform(-1, 1, 3))

    def test_project(self):
        test_cases = [
            ("optical axis", [0, 0, 1], [320, 240]),
            ("pinhole offset", [0.1, 0, 0.5], [420, 240]),
            ("below axis", [0, 0.2, 2], [320, 290]),
        ]
        for name, point, expected in test_cases:
            with self.subTest(name):
                np.testing.assert_allclose(project(point, self.cam), expected)

    def test_backproject(self):
        test_cases = [
            ("principal point", [320, 240], 2, [0, 0, 2]),
            ("inverse of project", [420, 240], 0.5, [0.1, 0, 0.5]),
        ]
        for name, pixel, depth, expected in test_cases:
            with self.subTest(name):
                np.testing.assert_allclose(backproject(pixel, depth, self.cam), expected, atol=1e-12)

    def test_project_rejects_non_positive_depth(self):
        for z in [0.0, -1.0]:
            with self.subTest(z):
                with self.assertRaises(ValueError):
                    project([0.1, 0.1, z], self.cam)
                with self.assertRaises(ValueError):
                    backproject([10, 10], z, self.cam)

    def test_project_backproject_roundtrip(self):
        points = np.column_stack([self.rng.uniform(-1, 1, (100, 2)), self.rng.uniform(0.1, 3, 100)])
        pixels = project_points(points, self.cam)
        np.testing.assert_allclose(backproject_pixels(pixels, points[:, 2], self.cam), points, atol=1e-9)

        columns, rows = np.meshgrid(np.arange(0, 640, 37.5), np.arange(0, 480, 41.0))
        grid = np.stack([columns.ravel(), rows.ravel()], axis=-1)
        reprojected = project_points(backproject_pixels(grid, np.ones(len(grid)), self.cam), self.cam)
        np.testing.assert_allclose(reprojected, grid, atol=1e-9)

    def test_transform(self):
        quarter_turn = Pose.from_rotation(Rotation.from_euler("z", 90, degrees=True))
        test_cases = [
            ("identity", Pose.identity(), [1, 2, 3], [1, 2, 3]),
            ("pure translation", Pose(np.array([1, 0, 0, 0]), np.array([0, 0, 0.5])), [0, 0, 0], [0, 0, 0.5]),
            ("quarter turn about z", quarter_turn, [1, 0, 0], [0, 1, 0]),
        ]
        for name, pose, point, expected in test_cases:
            with self.subTest(name):
                np.testing.assert_allclose(transform(pose, point), expected, atol=1e-9)

    def test_quaternion_is_canonical_and_normalized(self):
        pose = Pose(np.array([-2.0, 0.0, 0.0, 0.0]), np.zeros(3))
        np.testing.assert_allclose(pose.rotation, [1, 0, 0, 0])

        for _ in range(50):
            composed = self.random_pose().compose(self.random_pose())
            self.assertAlmostEqual(1.0, np.linalg.norm(composed.rotation), delta=1e-9)
            self.assertGreaterEqual(composed.rotation[0], 0.0)

    def test_rotation_matrix_is_orthonormal(self):
        for _ in range(50):
            matrix = self.random_pose().rotation_matrix
            np.testing.assert_allclose(matrix.T @ matrix, np.eye(3), atol=1e-9)
            self.assertAlmostEqual(1.0, np.linalg.det(matrix), delta=1e-9)

    def test_compose_with_inverse_is_identity(self):
        for _ in range(50):
            pose = self.random_pose()
            for product in [pose.compose(pose.inverse()), pose.inverse().compose(pose)]:
                self.assertLess(product.rotation_angle_to(Pose.identity()), 1e-6)
                self.assertLess(np.linalg.norm(product.translation), 1e-9)

    def test_compose_matches_sequential_transform(self):
        for _ in range(50):
            a, b = self.random_pose(), self.random_pose()
            point = self.rng.uniform(-1, 1, 3)
            np.testing.assert_allclose(transform(a.compose(b), point), transform(a, transform(b, point)), atol=1e-9)

    def test_apply_twist_left_multiplies_increment(self):
        pose = self.random_pose()
        twist = np.array([0.01, -0.02, 0.03, 0.004, 0.005, -0.006])
        increment = Pose.from_rotation(Rotation.from_rotvec(twist[:3]), twist[3:])

        updated = pose.apply_twist(twist)

        expected = increment.compose(pose)
        np.testing.assert_allclose(updated.rotation, expected.rotation, atol=1e-12)
        np.testing.assert_allclose(updated.translation, expected.translation, atol=1e-12)

    def test_projection_jacobians_match_finite_differences(self):
        points = np.array([[0.05, -0.02, 0.6], [-0.1, 0.07, 0.9]])
        jacobians = projection_jacobians(points, self.cam)
        h = 1e-6
        for k in range(6):
            twist = np.zeros(6)
            twist[k] = h
            plus = Pose.identity().apply_twist(twist).transform_points(points)
            minus = Pose.identity().apply_twist(-twist).transform_points(points)
            numeric = (project_points(plus, self.cam) - project_points(minus, self.cam)) / (2 * h)
            np.testing.assert_allclose(jacobians[:, :, k], numeric, rtol=1e-5, atol=1e-4)

    def test_json_roundtrip(self):
        pose = self.random_pose()
        content = pose.to_json()
        self.assertEqual({"q", "t"}, set(content))

        restored = Pose.from_json(content)

        np.testing.assert_array_equal(pose.rotation, restored.rotation)
        np.testing.assert_array_equal(pose.translation, restored.translation)


if __name__ == '__main__':
    unittest.main()
