import dataclasses

from pose_processing.errors import ConfigurationError
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.pipeline.pipeline_dependencies import PipelineDependencies, canonical_table_path, \
    viewspace_path
from pose_processing.raster.science.canonical_table import precompute_canonical
from pose_processing.viewspace.models import SymmetryClass
from tests.temp_file_test_case import TempFileTestCase
from tests.test_helpers import small_pipeline_config


class TestPipelineDependencies(TempFileTestCase):
    def setUp(self) -> None:
        super().setUp()
        self.config = small_pipeline_config(self.temp_directory)

    def write_tables(self, dependencies: PipelineDependencies, camera: CameraIntrinsics):
        for entry in self.config.models:
            scene_object = dependencies.objects[entry.class_id]
            precompute_canonical(scene_object.mesh, scene_object.viewspace, camera).to_file(
                canonical_table_path(self.config, entry))

    def test_objects_follow_model_symmetry(self):
        dependencies = PipelineDependencies.fetch_dependencies(self.config, with_tables=False)

        self.assertEqual([1, 2], sorted(dependencies.objects))
        self.assertEqual(SymmetryClass.NONE, dependencies.viewspaces[1].symmetry)
        self.assertEqual(SymmetryClass.SYMMETRIC, dependencies.viewspaces[2].symmetry)
        self.assertLess(dependencies.viewspaces[2].view_count, dependencies.viewspaces[1].view_count)
        self.assertEqual(19, dependencies.viewspaces[1].inplane_count)
        self.assertEqual({}, dependencies.tables)

    def test_missing_canonical_table_names_the_command(self):
        with self.assertRaises(ConfigurationError) as context:
            PipelineDependencies.fetch_dependencies(self.config)

        self.assertIn("canonical_box.json", str(context.exception))
        self.assertIn("'canonical' command", str(context.exception))

    def test_loads_tables(self):
        dependencies = PipelineDependencies.fetch_dependencies(self.config, with_tables=False)
        self.write_tables(dependencies, self.config.camera)

        loaded = PipelineDependencies.fetch_dependencies(self.config)

        self.assertEqual([1, 2], sorted(loaded.tables))
        self.assertEqual(dependencies.viewspaces[2].cell_count, loaded.tables[2].entry_count)

    def test_stale_tables(self):
        dependencies = PipelineDependencies.fetch_dependencies(self.config, with_tables=False)
        self.write_tables(dependencies, self.config.camera)
        cases = [
            ("other camera", dict(camera=CameraIntrinsics(320.0, 320.0, 160.0, 120.0, 320, 240))),
            ("other view space",
             dict(viewspace=dataclasses.replace(self.config.viewspace, inplane_range=(-45, 45, 15)))),
            ("other distance", dict(canonical_distance=0.6)),
        ]
        for name, changes in cases:
            with self.subTest(name):
                with self.assertRaises(ConfigurationError):
                    PipelineDependencies.fetch_dependencies(dataclasses.replace(self.config, **changes))

    def test_artifact_paths(self):
        box = self.config.model(1)

        self.assertEqual(self.temp_directory / "tables" / "canonical_box.json",
                         canonical_table_path(self.config, box))
        self.assertEqual(self.temp_directory / "tables" / "viewspace_box.json", viewspace_path(self.config, box))
