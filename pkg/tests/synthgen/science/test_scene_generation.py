import numpy as np

from pose_processing.errors import DataError
from pose_processing.geometry.mesh import make_box, make_cylinder
from pose_processing.geometry.pose import Pose
from pose_processing.raster.science.rasterizer import render
from pose_processing.synthgen.models import SceneSpec, SceneObject, ModelEntry
from pose_processing.synthgen.science.backgrounds import value_noise, procedural_background
from pose_processing.synthgen.science.scene_generation import generate_scene, generate_frames, composite, \
    occlusion_fractions, adjust_brightness_contrast
from pose_processing.synthgen.science.validation import validate_annotations
from pose_processing.utils import write_color_ppm
from pose_processing.viewspace.models import SymmetryClass
from pose_processing.viewspace.science.icosphere import build_viewspace
from pose_processing.viewspace.science.view_assignment import assign_view_inplane, viewing_direction
from tests.temp_file_test_case import TempFileTestCase
from tests.test_helpers import small_camera


def scene_objects() -> list[SceneObject]:
    box = ModelEntry("box", 1, primitive={"type": "box", "extents": [0.1, 0.07, 0.05]})
    can = ModelEntry("can", 2, SymmetryClass.SYMMETRIC, primitive={"type": "cylinder", "radius": 0.03,
                                                                    "height": 0.08})
    return [SceneObject(box, make_box((0.1, 0.07, 0.05), color=(0.9, 0.4, 0.2)),
                        build_viewspace(1, True, SymmetryClass.NONE, (-45, 45, 5))),
            SceneObject(can, make_cylinder(0.03, 0.08, color=(0.2, 0.5, 0.9)),
                        build_viewspace(1, True, SymmetryClass.SYMMETRIC, (-45, 45, 5)))]


class TestSceneGeneration(TempFileTestCase):
    def setUp(self) -> None:
        super().setUp()
        self.camera = small_camera()
        self.objects = scene_objects()

    def test_same_seed_gives_identical_frames(self):
        spec = SceneSpec(instance_range=(2, 4), seed=3)

        first = generate_scene(spec, self.objects, self.camera, 5)
        second = generate_scene(spec, self.objects, self.camera, 5)
        other = generate_scene(spec, self.objects, self.camera, 6)

        np.testing.assert_array_equal(first.image, second.image)
        np.testing.assert_array_equal(first.depth, second.depth)
        self.assertEqual([a.to_json() for a in first.annotations], [a.to_json() for a in second.annotations])
        self.assertFalse(np.array_equal(first.image, other.image))

    def test_single_instance_matches_direct_render(self):
        spec = SceneSpec(instance_range=(1, 1), brightness_range=(0.0, 0.0), contrast_range=(1.0, 1.0), seed=1)

        frame = generate_scene(spec, self.objects, self.camera)

        annotation, = frame.annotations
        scene_object = next(o for o in self.objects if o.entry.class_id == annotation.class_id)
        buffers = render(scene_object.mesh, annotation.pose, self.camera)
        np.testing.assert_array_equal(buffers.bounding_box(), annotation.box)
        np.testing.assert_allclose(buffers.color[buffers.mask], frame.image[buffers.mask], atol=1e-12)
        np.testing.assert_array_equal(buffers.depth[buffers.mask], frame.depth[buffers.mask])
        np.testing.assert_array_equal(0.0, frame.depth[~buffers.mask])
        self.assertEqual(0.0, annotation.occlusion)
        self.assertEqual(assign_view_inplane(annotation.pose.rotation_matrix, scene_object.viewspace),
                         (annotation.view_id, annotation.inplane_id))

    def test_instances_lie_in_depth_range_and_central_region(self):
        spec = SceneSpec(instance_range=(3, 3), z_range=(0.5, 0.8), seed=4)
        for frame in generate_frames(spec, self.objects, self.camera, 5):
            for annotation in frame.annotations:
                scene_object = next(o for o in self.objects if o.entry.class_id == annotation.class_id)
                centroid = annotation.pose.transform_points(scene_object.mesh.centroid[None])[0]
                self.assertTrue(0.5 <= centroid[2] <= 0.8)
                column = self.camera.fx * centroid[0] / centroid[2] + self.camera.cx
                self.assertTrue(0.1 * self.camera.width - 1e-6 <= column <= 0.9 * self.camera.width + 1e-6)

    def test_occlusion_matches_pixel_count(self):
        mesh = make_box((0.1, 0.1, 0.1))
        near = render(mesh, Pose.from_matrix(np.eye(3), (0.0, 0.0, 0.5)), self.camera)
        far = render(mesh, Pose.from_matrix(np.eye(3), (0.05, 0.02, 0.7)), self.camera)

        image, depth, owner = composite(np.zeros((240, 320, 3)), [far, near])
        fractions = occlusion_fractions([far, near], owner)

        expected = np.count_nonzero(far.mask & near.mask) / np.count_nonzero(far.mask)
        self.assertGreater(expected, 0.0)
        self.assertAlmostEqual(expected, fractions[0], delta=1e-12)
        self.assertEqual(0.0, fractions[1])
        np.testing.assert_array_equal(near.depth[near.mask], depth[near.mask])

    def test_generated_annotations_validate(self):
        spec = SceneSpec(instance_range=(2, 3), seed=8)
        objects = {o.entry.class_id: o for o in self.objects}
        for frame in generate_frames(spec, self.objects, self.camera, 4, threads=2):
            with self.subTest(frame.frame_index):
                self.assertEqual([], validate_annotations(frame, objects, self.camera))

    def test_validator_reports_inconsistent_annotations(self):
        spec = SceneSpec(instance_range=(1, 1), seed=2)
        objects = {o.entry.class_id: o for o in self.objects}
        frame = generate_scene(spec, self.objects, self.camera)
        frame.annotations[0].box = frame.annotations[0].box + 1
        frame.annotations[0].view_id += 1
        frame.annotations[0].occlusion = 1.5

        problems = validate_annotations(frame, objects, self.camera)

        self.assertEqual(3, len(problems))

    def test_symmetric_models_turn_about_their_axis(self):
        spec = SceneSpec(instance_range=(3, 3), seed=6)
        azimuths = []
        for frame in generate_frames(spec, [self.objects[1]], self.camera, 6):
            for annotation in frame.annotations:
                view = viewing_direction(annotation.pose.rotation_matrix)
                azimuths.append(np.degrees(np.arctan2(view[1], view[0])))

        self.assertGreater(len(azimuths), 10)
        self.assertGreater(np.ptp(azimuths), 180.0)

    def test_threads_do_not_change_frames(self):
        spec = SceneSpec(instance_range=(1, 3), seed=5)

        serial = generate_frames(spec, self.objects, self.camera, 3)
        threaded = generate_frames(spec, self.objects, self.camera, 3, threads=3)

        for first, second in zip(serial, threaded):
            np.testing.assert_array_equal(first.image, second.image)

    def test_user_backgrounds(self):
        directory = self.temp_directory / "backgrounds"
        write_color_ppm(directory / "flat.ppm", np.full((60, 80, 3), 0.2))
        spec = SceneSpec(instance_range=(1, 1), brightness_range=(0.0, 0.0), contrast_range=(1.0, 1.0),
                         background_directory=str(directory))

        frame = generate_scene(spec, self.objects, self.camera)

        background = frame.depth == 0
        np.testing.assert_allclose(round(0.2 * 255) / 255, frame.image[background], atol=1e-12)

    def test_missing_background_directory(self):
        spec = SceneSpec(background_directory=str(self.temp_directory / "missing"))
        with self.assertRaises(DataError):
            generate_scene(spec, self.objects, self.camera)

    def test_procedural_background(self):
        rng = np.random.default_rng(0)
        noise = value_noise(rng, 240, 320)
        background = procedural_background(rng, 240, 320, 5)

        self.assertEqual((240, 320, 3), noise.shape)
        self.assertEqual(0.0, noise.min())
        self.assertEqual(1.0, noise.max())
        self.assertTrue(np.all((0 <= background) & (background <= 1)))

    def test_brightness_and_contrast(self):
        image = np.array([[[0.0, 0.5, 1.0]]])
        np.testing.assert_allclose([[[0.0, 0.6, 1.0]]], adjust_brightness_contrast(image, 0.1, 1.0))
        np.testing.assert_allclose([[[0.0, 0.5, 1.0]]], adjust_brightness_contrast(image, 0.0, 2.0))
        np.testing.assert_allclose([[[0.25, 0.5, 0.75]]], adjust_brightness_contrast(image, 0.0, 0.5))
