import numpy as np

from pose_processing.errors import DataError
from pose_processing.synthgen.dataset import write_dataset, read_frame, read_manifest, read_camera, frame_stem
from pose_processing.synthgen.models import SceneSpec
from pose_processing.synthgen.science.scene_generation import generate_frames
from tests.synthgen.science.test_scene_generation import scene_objects
from tests.temp_file_test_case import TempFileTestCase
from tests.test_helpers import small_camera


class TestDataset(TempFileTestCase):
    def setUp(self) -> None:
        super().setUp()
        self.camera = small_camera()
        self.spec = SceneSpec(instance_range=(1, 2), seed=6)
        self.frames = generate_frames(self.spec, scene_objects(), self.camera, 2)
        self.manifest = {"seed": 6, "camera": self.camera.to_json(), "scene": self.spec.to_json()}

    def test_round_trip(self):
        write_dataset(self.temp_directory, self.frames, self.manifest)

        for frame in self.frames:
            restored = read_frame(self.temp_directory, frame.frame_index)
            np.testing.assert_allclose(frame.image, restored.image, atol=0.5 / 255 + 1e-12)
            np.testing.assert_allclose(frame.depth, restored.depth, atol=0.5e-4 + 1e-12)
            self.assertEqual([a.to_json() for a in frame.annotations], [a.to_json() for a in restored.annotations])

    def test_layout_and_manifest(self):
        write_dataset(self.temp_directory, self.frames, self.manifest)

        self.assertTrue((self.temp_directory / "frames" / "000001.ppm").exists())
        self.assertTrue((self.temp_directory / "frames" / "000001.depth.pgm").exists())
        self.assertTrue((self.temp_directory / "frames" / "000001.json").exists())
        self.assertEqual([0, 1], read_manifest(self.temp_directory)["frame_indices"])
        self.assertEqual(self.camera, read_camera(self.temp_directory))
        self.assertEqual(self.temp_directory / "frames" / "000012", frame_stem(self.temp_directory, 12))

    def test_rewrite_is_byte_identical(self):
        first = write_dataset(self.temp_directory / "a", self.frames, self.manifest)
        second = write_dataset(self.temp_directory / "b", generate_frames(self.spec, scene_objects(), self.camera, 2),
                               self.manifest)

        for name in ["000000.ppm", "000000.depth.pgm", "000000.json", "000001.ppm"]:
            with self.subTest(name):
                self.assertEqual((first.parent / "frames" / name).read_bytes(),
                                 (second.parent / "frames" / name).read_bytes())
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_missing_data(self):
        write_dataset(self.temp_directory, self.frames[:1], self.manifest)
        cases = [
            ("no manifest", lambda: read_manifest(self.temp_directory / "elsewhere")),
            ("no frame", lambda: read_frame(self.temp_directory, 3)),
        ]
        for name, read in cases:
            with self.subTest(name):
                with self.assertRaises(DataError):
                    read()

    def test_manifest_without_camera(self):
        write_dataset(self.temp_directory, self.frames[:1], {"seed": 6})

        with self.assertRaises(DataError):
            read_manifest(self.temp_directory)
