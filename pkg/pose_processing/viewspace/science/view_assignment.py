import numpy as np
from scipy.spatial.transform import Rotation

from pose_processing.constants import VIEW_TOLERANCE
from pose_processing.viewspace.models import ViewSpace, SymmetryClass

POLE_TOLERANCE = 1e-9
ARC_AZIMUTH_DEGREES = 90.0


def base_view_rotation(view: np.ndarray) -> np.ndarray:
    """Rotation whose camera sits at +view on the sphere looking at the origin.

    Image "up" is world +z projected into the view plane, or +y when looking along the z axis.
    """
    view = np.asarray(view, dtype=np.float64)
    z_axis = -view
    up = np.array([0.0, 0.0, 1.0]) - view[2] * view
    if np.linalg.norm(up) < POLE_TOLERANCE:
        up = np.array([0.0, 1.0, 0.0]) - view[1] * view
    up /= np.linalg.norm(up)
    y_axis = -up
    x_axis = np.cross(y_axis, z_axis)
    return np.vstack([x_axis, y_axis, z_axis])


def inplane_rotation(inplane_deg: float) -> np.ndarray:
    return Rotation.from_euler("z", inplane_deg, degrees=True).as_matrix()


def view_rotation(view: np.ndarray, inplane_deg: float) -> np.ndarray:
    return inplane_rotation(inplane_deg) @ base_view_rotation(view)


def viewing_direction(rotation: np.ndarray) -> np.ndarray:
    return -np.asarray(rotation)[2, :]


def wrapped_angle_difference(a, b):
    return (np.asarray(a) - np.asarray(b) + 180.0) % 360.0 - 180.0


def residual_roll(rotation: np.ndarray, view: np.ndarray) -> float:
    """Angle of the optical-axis rotation closest to rotation @ base_view_rotation(view).T."""
    roll = np.asarray(rotation) @ base_view_rotation(view).T
    return float(np.degrees(np.arctan2(roll[1, 0] - roll[0, 1], roll[0, 0] + roll[1, 1])))


def model_axis_rotation(angle_deg: float) -> np.ndarray:
    return Rotation.from_euler("z", angle_deg, degrees=True).as_matrix()


def symmetry_representative(rotation: np.ndarray, symmetry: SymmetryClass) -> np.ndarray:
    """Equivalent rotation, up to a turn about the model z axis, whose viewing direction lies in the kept views.

    Symmetric models are turned onto the x = 0, y >= 0 arc. At the poles the turn instead removes the roll.
    Semi-symmetric models are turned by half a revolution when they are seen from y < 0.
    """
    rotation = np.asarray(rotation, dtype=np.float64)
    view = viewing_direction(rotation)
    if symmetry == SymmetryClass.SEMI_SYMMETRIC:
        return rotation @ model_axis_rotation(180.0) if view[1] < -VIEW_TOLERANCE else rotation
    if symmetry != SymmetryClass.SYMMETRIC:
        return rotation

    if np.hypot(view[0], view[1]) < VIEW_TOLERANCE:
        pole = np.array([0.0, 0.0, np.sign(view[2])])
        roll = residual_roll(rotation, pole)
        candidates = [rotation @ model_axis_rotation(roll), rotation @ model_axis_rotation(-roll)]
        return min(candidates, key=lambda candidate: abs(residual_roll(candidate, pole)))
    azimuth = np.degrees(np.arctan2(view[1], view[0]))
    return rotation @ model_axis_rotation(azimuth - ARC_AZIMUTH_DEGREES)


def assign_view_inplane(rotation: np.ndarray, vs: ViewSpace) -> tuple[int, int]:
    rotation = symmetry_representative(rotation, vs.symmetry)
    view_id = int(np.argmax(vs.views @ viewing_direction(rotation)))
    roll = residual_roll(rotation, vs.views[view_id])
    inplane_id = int(np.argmin(np.abs(wrapped_angle_difference(roll, vs.inplane_bins))))
    return view_id, inplane_id


def cell_rotation(vs: ViewSpace, view_id: int, inplane_id: int) -> np.ndarray:
    return view_rotation(vs.views[view_id], vs.inplane_bins[inplane_id])
