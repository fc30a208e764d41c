import logging
from pathlib import Path

from pose_processing.anchors.models import Detection
from pose_processing.anchors.science.priors import generate_priors
from pose_processing.errors import ConfigurationError, DataError
from pose_processing.metrics.models import write_pose_outcomes_csv
from pose_processing.metrics.science.curve_plot import plot_detection_curves
from pose_processing.metrics.science.evaluation import evaluate, EvaluationReport
from pose_processing.pipeline.models import PipelineConfig, FrameResult, DetectorMode, write_results, read_results
from pose_processing.pipeline.pipeline_dependencies import PipelineDependencies, viewspace_path, \
    canonical_table_path
from pose_processing.pipeline.science.detection_sources import oracle_frame_detections, external_frame_detections
from pose_processing.pipeline.science.frame_pipeline import estimate_frame, to_eval_record
from pose_processing.pipeline.science.parsing_sweep import sweep_parsing
from pose_processing.processor import Processor
from pose_processing.raster.science.canonical_table import precompute_canonical
from pose_processing.refinement.science.convergence_plot import plot_convergence
from pose_processing.synthgen.dataset import write_dataset, read_frame, read_manifest, read_camera, \
    read_annotations
from pose_processing.synthgen.models import SyntheticFrame
from pose_processing.synthgen.science.scene_generation import generate_frames
from pose_processing.synthgen.science.validation import validate_annotations
from pose_processing.utils import parallel_map, write_json, save_data

logger = logging.getLogger(__name__)

COMMANDS = ["viewspace", "canonical", "gen-data", "run", "eval", "sweep"]
RESULTS_FILE = "results.json"
DETECTION_SWEEP_FILE = "detection_sweep.csv"
POSE_OUTCOMES_FILE = "pose_outcomes.csv"
DETECTION_PLOT_FILE = "detection_curves.png"


class PosePipelineProcessor(Processor):
    dependencies: PipelineConfig

    def process(self):
        command = self.input_metadata.command
        if command == "viewspace":
            return self.process_viewspace()
        if command == "canonical":
            return self.process_canonical()
        if command == "gen-data":
            return self.process_gen_data()
        if command == "run":
            return self.process_run()
        if command == "eval":
            return self.process_eval()
        if command == "sweep":
            return self.process_sweep()
        raise NotImplementedError(f"Unknown command {command}, expected one of {COMMANDS}")

    @property
    def config(self) -> PipelineConfig:
        return self.dependencies

    def process_viewspace(self) -> list[Path]:
        dependencies = PipelineDependencies.fetch_dependencies(self.config, with_tables=False)
        paths = []
        for entry in self.config.models:
            viewspace = dependencies.objects[entry.class_id].viewspace
            paths.append(write_json(viewspace_path(self.config, entry), viewspace.to_json()))
            logger.info("%s (%s): %d views x %d in-plane bins = %d cells", entry.name, entry.symmetry.value,
                        viewspace.view_count, viewspace.inplane_count, viewspace.cell_count)
        return paths

    def process_canonical(self) -> list[Path]:
        dependencies = PipelineDependencies.fetch_dependencies(self.config, with_tables=False)
        paths = []
        for entry in self.config.models:
            scene_object = dependencies.objects[entry.class_id]
            table = precompute_canonical(scene_object.mesh, scene_object.viewspace, self.config.camera,
                                         self.config.canonical_distance, self.config.threads)
            paths.append(table.to_file(canonical_table_path(self.config, entry)))
        return paths

    def process_gen_data(self) -> Path:
        cfg = self.config
        dependencies = PipelineDependencies.fetch_dependencies(cfg, with_tables=False)
        frames = generate_frames(cfg.scene, list(dependencies.objects.values()), cfg.camera, cfg.frame_count,
                                 cfg.threads)
        problems = [problem for frame in frames
                    for problem in validate_annotations(frame, dependencies.objects, cfg.camera)]
        if problems:
            raise DataError(f"{len(problems)} generated annotations failed validation, first: {problems[0]}")
        manifest = {"seed": cfg.seed, "camera": cfg.camera.to_json(), "scene": cfg.scene.to_json(),
                    "models": [entry.to_json() for entry in cfg.models]}
        return write_dataset(cfg.paths.dataset, frames, manifest)

    def read_dataset(self) -> list[SyntheticFrame]:
        camera = read_camera(self.config.paths.dataset)
        if camera != self.config.camera:
            raise ConfigurationError(f"Dataset {self.config.paths.dataset} was generated with camera {camera}, "
                                     f"configuration has {self.config.camera}")
        frame_indices = read_manifest(self.config.paths.dataset)["frame_indices"]
        return parallel_map(lambda index: read_frame(self.config.paths.dataset, index), frame_indices,
                            self.config.threads)

    def detect(self, frames: list[SyntheticFrame], dependencies: PipelineDependencies) -> list[list[Detection]]:
        cfg = self.config
        if cfg.detector == DetectorMode.ORACLE:
            return [oracle_frame_detections(frame, cfg.oracle_noise, dependencies.viewspaces, cfg.class_count,
                                            cfg.camera, cfg.seed) for frame in frames]
        priors = generate_priors(cfg.priors)
        return [external_frame_detections(cfg.paths.scores, frame.frame_index, priors, cfg.priors,
                                          cfg.detection_score_threshold, cfg.camera) for frame in frames]

    def process_run(self) -> Path:
        cfg = self.config
        dependencies = PipelineDependencies.fetch_dependencies(cfg)
        frames = self.read_dataset()
        detections = self.detect(frames, dependencies)

        def estimate(index: int) -> FrameResult:
            return estimate_frame(frames[index], detections[index], dependencies.objects, dependencies.tables, cfg)

        results = parallel_map(estimate, range(len(frames)), cfg.threads)
        logger.info("Estimated %d poses in %d frames (detector %s, refinement %s)",
                    sum(len(result.estimates) for result in results), len(results), cfg.detector.value,
                    cfg.refinement.value)
        if cfg.paths.traces is not None:
            self.write_traces(results)
        return write_results(cfg.paths.output, results, cfg)

    def write_traces(self, results: list[FrameResult]) -> list[Path]:
        """One residual CSV per refinement step and one convergence plot per estimate, for the selected
        hypothesis."""
        directory = self.config.paths.traces
        paths = []
        for result in results:
            for estimate_index, estimate in enumerate(result.estimates):
                if estimate.refinement is None or not estimate.refinement.best_results:
                    continue
                stem = f"{result.frame_index:06d}_{estimate_index:02d}"
                for step in estimate.refinement.best_results:
                    paths.append(step.write_trace_csv(directory / f"{stem}_{step.method}.csv"))
                paths.append(plot_convergence(estimate.refinement.best_results, directory / f"{stem}.png"))
        logger.info("Wrote %d refinement trace files to %s", len(paths), directory)
        return paths

    def process_eval(self) -> EvaluationReport:
        cfg = self.config
        dependencies = PipelineDependencies.fetch_dependencies(cfg, with_tables=False)
        results = read_results(cfg.paths.output / RESULTS_FILE)
        annotations = {index: read_annotations(cfg.paths.dataset, index)
                       for index in read_manifest(cfg.paths.dataset)["frame_indices"]}
        missing = [result.frame_index for result in results if result.frame_index not in annotations]
        if missing:
            raise DataError(f"Results refer to frames {missing} that are not in the dataset")
        records = [to_eval_record(result, annotations[result.frame_index]) for result in results]

        meshes = {class_id: scene_object.mesh for class_id, scene_object in dependencies.objects.items()}
        report = evaluate(records, meshes, cfg.camera, self.input_metadata.to_product_metadata("summary"),
                          cfg.symmetric_classes, threads=cfg.threads)
        report.detection.write_csv(cfg.paths.output / DETECTION_SWEEP_FILE)
        write_pose_outcomes_csv(cfg.paths.output / POSE_OUTCOMES_FILE, report.outcomes)
        save_data(report.summary, cfg.paths.output)
        plot_detection_curves(report.detection, cfg.paths.output / DETECTION_PLOT_FILE)
        return report

    def process_sweep(self) -> Path:
        cfg = self.config
        dependencies = PipelineDependencies.fetch_dependencies(cfg)
        frames = self.read_dataset()
        detections = self.detect(frames, dependencies)
        sweep = sweep_parsing(frames, detections, dependencies.objects, dependencies.tables, cfg,
                              self.input_metadata.to_product_metadata("parsing"))
        return save_data(sweep, cfg.paths.output)
