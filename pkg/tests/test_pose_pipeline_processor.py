import logging
from unittest import TestCase
from unittest.mock import patch

from pose_pipeline_processor import pose_pipeline_processor, DEFAULT_CONFIG_PATH
from pose_processing.errors import ConfigurationError, DataError
from pose_processing.models import InputMetadata


class TestPosePipelineProcessorCommandLine(TestCase):
    def tearDown(self) -> None:
        logging.getLogger().handlers.clear()

    @patch('pose_pipeline_processor.PosePipelineProcessor')
    @patch('pose_pipeline_processor.PipelineConfig')
    def test_runs_the_processor_with_overridden_config(self, mock_config_class, mock_processor_class):
        mock_config = mock_config_class.from_file.return_value
        mock_overridden_config = mock_config.with_overrides.return_value
        mock_overridden_config.seed = 42

        exit_code = pose_pipeline_processor(["run", "--config", "experiment.json", "--seed", "42", "--threads", "3",
                                             "--refine", "icp", "--detector", "external", "--out", "results",
                                             "--trace-dir", "traces"])

        self.assertEqual(0, exit_code)
        mock_config_class.from_file.assert_called_once_with("experiment.json")
        mock_config.with_overrides.assert_called_once_with(42, 3, "icp", "external", "results", "traces")
        mock_processor_class.assert_called_once_with(mock_overridden_config, InputMetadata("run", 42, "v001"))
        mock_processor_class.return_value.process.assert_called_once_with()

    @patch('pose_pipeline_processor.PosePipelineProcessor')
    @patch('pose_pipeline_processor.PipelineConfig')
    def test_defaults(self, mock_config_class, mock_processor_class):
        mock_config = mock_config_class.from_file.return_value
        mock_config.with_overrides.return_value.seed = 0

        pose_pipeline_processor(["gen-data", "--version", "v007"])

        mock_config_class.from_file.assert_called_once_with(str(DEFAULT_CONFIG_PATH))
        mock_config.with_overrides.assert_called_once_with(None, None, None, None, None, None)
        mock_processor_class.assert_called_once_with(mock_config.with_overrides.return_value,
                                                     InputMetadata("gen-data", 0, "v007"))

    @patch('pose_pipeline_processor.PosePipelineProcessor')
    @patch('pose_pipeline_processor.PipelineConfig')
    def test_exit_codes(self, mock_config_class, mock_processor_class):
        mock_config_class.from_file.return_value.with_overrides.return_value.seed = 0
        cases = [
            ("configuration error", ConfigurationError("Missing canonical table"), 2),
            ("data error", DataError("Missing image"), 3),
        ]
        for name, error, expected_exit_code in cases:
            with self.subTest(name):
                mock_processor_class.return_value.process.side_effect = error
                with self.assertLogs("pose_pipeline_processor", level="ERROR") as logs:
                    exit_code = pose_pipeline_processor(["run"])
                self.assertEqual(expected_exit_code, exit_code)
                self.assertIn(str(error), logs.output[0])

    def test_rejects_unknown_commands_and_modes(self):
        cases = [["train"], ["run", "--refine", "gradient"], ["run", "--detector", "cnn"]]
        for argv in cases:
            with self.subTest(argv):
                with self.assertRaises(SystemExit):
                    pose_pipeline_processor(argv)
