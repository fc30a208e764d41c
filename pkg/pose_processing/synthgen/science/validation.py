import numpy as np

from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.raster.science.rasterizer import render
from pose_processing.synthgen.models import SyntheticFrame, SceneObject
from pose_processing.viewspace.science.view_assignment import assign_view_inplane


def validate_annotations(frame: SyntheticFrame, objects: dict[int, SceneObject], cam: CameraIntrinsics) -> list[str]:
    """Re-derives every annotation from its pose and returns a description of each disagreement."""
    problems = []
    for index, annotation in enumerate(frame.annotations):
        label = f"frame {frame.frame_index} instance {index}"
        scene_object = objects.get(annotation.class_id)
        if scene_object is None:
            problems.append(f"{label}: unknown class {annotation.class_id}")
            continue
        box = render(scene_object.mesh, annotation.pose, cam).bounding_box()
        if box is None or not np.array_equal(box, annotation.box):
            problems.append(f"{label}: box {annotation.box.tolist()} is not the tight mask box {box}")
        ids = assign_view_inplane(annotation.pose.rotation_matrix, scene_object.viewspace)
        if ids != (annotation.view_id, annotation.inplane_id):
            problems.append(f"{label}: ids {(annotation.view_id, annotation.inplane_id)} should be {ids}")
        if not 0.0 <= annotation.occlusion <= 1.0:
            problems.append(f"{label}: occlusion {annotation.occlusion} outside [0, 1]")
    return problems
