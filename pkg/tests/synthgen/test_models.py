import unittest

import numpy as np

from pose_processing.errors import ConfigurationError, DataError
from pose_processing.geometry.mesh import make_box, write_ply
from pose_processing.geometry.pose import Pose
from pose_processing.synthgen.models import ModelEntry, SceneSpec, OracleNoise, Annotation
from pose_processing.viewspace.models import SymmetryClass
from tests.temp_file_test_case import TempFileTestCase


class TestModelEntry(TempFileTestCase):
    def test_primitive_mesh(self):
        entry = ModelEntry("box", 1, primitive={"type": "box", "extents": [0.1, 0.07, 0.05]})

        mesh = entry.load_mesh()

        np.testing.assert_allclose([0.1, 0.07, 0.05], np.ptp(mesh.vertices, axis=0))

    def test_ply_mesh_relative_to_base_directory(self):
        write_ply(self.temp_directory / "meshes" / "box.ply", make_box((0.1, 0.07, 0.05)))
        entry = ModelEntry("box", 2, SymmetryClass.SEMI_SYMMETRIC, ply_path="meshes/box.ply")

        mesh = entry.load_mesh(self.temp_directory)

        self.assertEqual(8, len(mesh.vertices))

    def test_missing_ply(self):
        with self.assertRaises(DataError):
            ModelEntry("box", 1, ply_path="missing.ply").load_mesh(self.temp_directory)

    def test_invalid_entries(self):
        cases = [
            ("background class", lambda: ModelEntry("box", 0, primitive={"type": "box", "extents": [1, 1, 1]})),
            ("no source", lambda: ModelEntry("box", 1)),
            ("two sources", lambda: ModelEntry("box", 1, ply_path="a.ply", primitive={"type": "box"})),
            ("bad primitive", lambda: ModelEntry("cone", 1, primitive={"type": "cone"}).load_mesh()),
            ("missing field", lambda: ModelEntry.from_json({"name": "box"})),
        ]
        for name, build in cases:
            with self.subTest(name):
                with self.assertRaises(ConfigurationError):
                    build()

    def test_json_round_trip(self):
        for entry in [ModelEntry("can", 3, SymmetryClass.SYMMETRIC, primitive={"type": "cylinder", "radius": 0.03,
                                                                                "height": 0.1}),
                      ModelEntry("duck", 1, ply_path="duck.ply")]:
            with self.subTest(entry.name):
                self.assertEqual(entry, ModelEntry.from_json(entry.to_json()))


class TestSceneSpec(unittest.TestCase):
    def test_json_round_trip(self):
        spec = SceneSpec(instance_range=(2, 4), z_range=(0.5, 0.9), seed=12, background_directory="backgrounds")

        self.assertEqual(spec, SceneSpec.from_json(spec.to_json()))
        self.assertEqual([0.5, 0.9], spec.to_json()["z_range"])

    def test_invalid_specs(self):
        cases = [
            ("non-positive depth", {"z_range": (0.0, 1.0)}),
            ("reversed depth", {"z_range": (1.0, 0.5)}),
            ("no instances", {"instance_range": (0, 2)}),
            ("zero contrast", {"contrast_range": (0.0, 1.0)}),
            ("margin too wide", {"centroid_margin": 0.5}),
        ]
        for name, settings in cases:
            with self.subTest(name):
                with self.assertRaises(ConfigurationError):
                    SceneSpec(**settings)

    def test_unknown_settings(self):
        with self.assertRaises(ConfigurationError):
            SceneSpec.from_json({"flips": True})


class TestOracleNoise(unittest.TestCase):
    def test_invalid_noise(self):
        for settings in [{"box_jitter_px": -1.0}, {"confusion_rate": 1.5}, {"false_positive_rate": -0.1},
                         {"score_noise": -0.2}]:
            with self.subTest(settings):
                with self.assertRaises(ConfigurationError):
                    OracleNoise(**settings)

    def test_json_round_trip(self):
        noise = OracleNoise(4.0, 0.3, 0.1, 0.05)
        self.assertEqual(noise, OracleNoise.from_json(noise.to_json()))


class TestAnnotation(unittest.TestCase):
    def test_json_round_trip(self):
        annotation = Annotation(2, "can", Pose.from_matrix(np.eye(3), (0.1, 0.0, 0.6)),
                                np.array([10.0, 20.0, 50.0, 80.0]), 5, 7, 0.25)

        restored = Annotation.from_json(annotation.to_json())

        self.assertEqual((2, "can", 5, 7, 0.25), (restored.class_id, restored.model_name, restored.view_id,
                                                  restored.inplane_id, restored.occlusion))
        np.testing.assert_array_equal(annotation.box, restored.box)
        np.testing.assert_array_equal(annotation.pose.translation, restored.pose.translation)
        self.assertTrue(restored.visible)

    def test_malformed(self):
        with self.assertRaises(DataError):
            Annotation.from_json({"class_id": 1})


if __name__ == '__main__':
    unittest.main()
