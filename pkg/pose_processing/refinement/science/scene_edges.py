import numpy as np
from scipy import ndimage

from pose_processing.constants import EDGE_SMOOTHING_SIGMA_PIXELS
from pose_processing.refinement.models import EdgeMap

LUMINANCE_WEIGHTS = np.array([0.299, 0.587, 0.114])


def luminance(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image)
    values = image.astype(np.float64)
    if np.issubdtype(image.dtype, np.integer):
        values /= np.iinfo(image.dtype).max
    if values.ndim == 3:
        return values @ LUMINANCE_WEIGHTS
    return values


def scene_edges(image: np.ndarray, smoothing_sigma: float = EDGE_SMOOTHING_SIGMA_PIXELS) -> EdgeMap:
    """Sobel gradients of the smoothed luminance; edges are magnitudes at or above mean + 1 std of the
    non-zero magnitudes."""
    smoothed = ndimage.gaussian_filter(luminance(image), sigma=smoothing_sigma) if smoothing_sigma > 0 \
        else luminance(image)
    gradient_x = ndimage.sobel(smoothed, axis=1)
    gradient_y = ndimage.sobel(smoothed, axis=0)
    magnitude = np.hypot(gradient_x, gradient_y)

    nonzero = magnitude > 1e-9
    mask = np.zeros(magnitude.shape, dtype=bool)
    if nonzero.any():
        values = magnitude[nonzero]
        mask = nonzero & (magnitude >= values.mean() + values.std())

    orientation = np.zeros(magnitude.shape + (2,))
    orientation[mask, 0] = gradient_x[mask] / magnitude[mask]
    orientation[mask, 1] = gradient_y[mask] / magnitude[mask]
    return EdgeMap(magnitude, orientation, mask)
