import numpy as np

from pose_processing.constants import ADD_DIAMETER_FRACTION, POSE_IOU_THRESHOLD
from pose_processing.geometry.camera import CameraIntrinsics
from pose_processing.geometry.mesh import TriMesh
from pose_processing.geometry.pose import Pose
from pose_processing.metrics.science.detection_metrics import box_iou
from pose_processing.raster.science.rasterizer import render


def pose_iou2d(gt: Pose, est: Pose, mesh: TriMesh, cam: CameraIntrinsics) -> tuple[float, bool]:
    """Overlap of the tight boxes around both rendered masks; correct above one half."""
    gt_box = render(mesh, gt, cam).bounding_box()
    est_box = render(mesh, est, cam).bounding_box()
    if gt_box is None or est_box is None:
        return 0.0, False
    ratio = box_iou(gt_box, est_box)
    return ratio, ratio > POSE_IOU_THRESHOLD


def mask_iou(first: np.ndarray, second: np.ndarray) -> float:
    union = np.count_nonzero(first | second)
    if union == 0:
        return 0.0
    return np.count_nonzero(first & second) / union


def vss(gt: Pose, est: Pose, mesh: TriMesh, cam: CameraIntrinsics) -> float:
    """Visual surface similarity as intersection over union of the two rendered masks."""
    return mask_iou(render(mesh, gt, cam).mask, render(mesh, est, cam).mask)


def add(gt: Pose, est: Pose, mesh: TriMesh) -> tuple[float, bool]:
    distances = np.linalg.norm(gt.transform_points(mesh.vertices) - est.transform_points(mesh.vertices), axis=1)
    value = float(np.mean(distances))
    return value, value < ADD_DIAMETER_FRACTION * mesh.diameter
