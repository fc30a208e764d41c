import json

import numpy as np

from pose_processing.anchors.models import PriorPredictions
from pose_processing.anchors.score_files import write_score_tensors, read_score_tensors
from pose_processing.errors import DataError
from tests.temp_file_test_case import TempFileTestCase


class TestScoreFiles(TempFileTestCase):
    def setUp(self) -> None:
        super().setUp()
        rng = np.random.default_rng(3)
        self.predictions = PriorPredictions(rng.normal(size=(5, 4)), rng.normal(size=(5, 3)),
                                            rng.normal(size=(5, 7)), rng.normal(size=(5, 2)))

    def test_roundtrip_at_float32_precision(self):
        header_path = write_score_tensors(self.temp_directory / "scores.json", self.predictions,
                                          full_sphere_views=True)

        predictions, full_sphere = read_score_tensors(header_path)

        self.assertTrue(full_sphere)
        self.assertEqual(5 * (4 + 3 + 7 + 2) * 4, (self.temp_directory / "scores.bin").stat().st_size)
        for name in ["offsets", "class_logits", "view_logits", "inplane_logits"]:
            np.testing.assert_allclose(getattr(self.predictions, name), getattr(predictions, name), rtol=1e-6)

    def test_header_describes_layout(self):
        header_path = write_score_tensors(self.temp_directory / "scores.json", self.predictions)
        with open(header_path) as f:
            header = json.load(f)

        self.assertEqual({"prior_count": 5, "class_count": 3, "view_count": 7, "inplane_count": 2,
                          "dtype": "<f4", "layout": "prior-major", "full_sphere_views": False,
                          "data_file": "scores.bin",
                          "order": ["offsets", "class_logits", "view_logits", "inplane_logits"]}, header)

    def test_data_errors(self):
        header_path = write_score_tensors(self.temp_directory / "scores.json", self.predictions)
        header = json.loads(header_path.read_text())

        test_cases = [
            ("missing key", {k: v for k, v in header.items() if k != "view_count"}),
            ("wrong prior count", {**header, "prior_count": 6}),
            ("missing data", {**header, "data_file": "absent.bin"}),
            ("unknown order", {**header, "order": ["class_logits", "offsets"]}),
        ]
        for name, content in test_cases:
            with self.subTest(name):
                broken = self.temp_directory / "broken.json"
                broken.write_text(json.dumps(content))
                with self.assertRaises(DataError):
                    read_score_tensors(broken)

    def test_missing_header(self):
        with self.assertRaises(DataError):
            read_score_tensors(self.temp_directory / "absent.json")
