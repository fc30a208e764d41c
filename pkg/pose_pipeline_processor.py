import argparse
import logging
import sys
from pathlib import Path

import pose_processing
from pose_processing.errors import ConfigurationError, DataError
from pose_processing.models import InputMetadata
from pose_processing.pipeline.models import PipelineConfig
from pose_processing.pipeline.pipeline_processor import PosePipelineProcessor, COMMANDS

DEFAULT_CONFIG_PATH = Path(pose_processing.__file__).parent / "config" / "default_pipeline_config.json"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
EXIT_CONFIGURATION_ERROR = 2
EXIT_DATA_ERROR = 3

logger = logging.getLogger(__name__)


def pose_pipeline_processor(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Detect, lift, refine and evaluate 6D object poses.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", default=str(DEFAULT_CONFIG_PATH))
    parser.add_argument("--seed", type=int, required=False)
    parser.add_argument("--threads", type=int, required=False)
    parser.add_argument("--refine", choices=["none", "edges", "icp", "both"], required=False)
    parser.add_argument("--detector", choices=["oracle", "external"], required=False)
    parser.add_argument("--out", required=False, help="Directory for results, tables and plots.")
    parser.add_argument("--trace-dir", required=False, help="Directory for per-round refinement residuals of `run`.")
    parser.add_argument("--version", default="v001", help="Version tag of the written products.")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, format=LOG_FORMAT)

    try:
        config = PipelineConfig.from_file(args.config).with_overrides(args.seed, args.threads, args.refine,
                                                                        args.detector, args.out, args.trace_dir)
        input_metadata = InputMetadata(args.command, config.seed, args.version)
        processor = PosePipelineProcessor(config, input_metadata)
        processor.process()
    except ConfigurationError as e:
        logger.error("Configuration error: %s", e)
        return EXIT_CONFIGURATION_ERROR
    except DataError as e:
        logger.error("Data error: %s", e)
        return EXIT_DATA_ERROR
    return 0


if __name__ == '__main__':
    sys.exit(pose_pipeline_processor())
