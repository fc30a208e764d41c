from pathlib import Path
from typing import Union

import numpy as np
from scipy import ndimage

from pose_processing.errors import DataError
from pose_processing.utils import read_background_image

BACKGROUND_SUFFIXES = {".png", ".jpg", ".jpeg", ".ppm", ".bmp"}
NOISE_OCTAVES = 4
BASE_GRID_CELLS = 4


def value_noise(rng: np.random.Generator, height: int, width: int, octaves: int = NOISE_OCTAVES) -> np.ndarray:
    """Sum of bilinearly upsampled random color grids, each octave twice as fine and half as strong."""
    noise = np.zeros((height, width, 3))
    for octave in range(octaves):
        cells = BASE_GRID_CELLS * 2 ** octave
        grid = rng.uniform(0, 1, (cells, cells, 3))
        upsampled = ndimage.zoom(grid, (height / cells, width / cells, 1), order=1, mode="nearest", grid_mode=True)
        noise += 0.5 ** octave * upsampled[:height, :width]
    noise -= noise.min()
    return noise / max(noise.max(), 1e-12)


def draw_rectangles(image: np.ndarray, rng: np.random.Generator, count: int) -> np.ndarray:
    image = image.copy()
    height, width = image.shape[:2]
    for _ in range(count):
        x1, x2 = np.sort(rng.integers(0, width, 2))
        y1, y2 = np.sort(rng.integers(0, height, 2))
        image[y1:y2 + 1, x1:x2 + 1] = rng.uniform(0, 1, 3)
    return image


def procedural_background(rng: np.random.Generator, height: int, width: int, rectangles: int) -> np.ndarray:
    return draw_rectangles(value_noise(rng, height, width), rng, rectangles)


def background_files(directory: Union[str, Path]) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"Background directory {directory} does not exist")
    files = sorted(path for path in directory.iterdir() if path.suffix.lower() in BACKGROUND_SUFFIXES)
    if not files:
        raise DataError(f"No background images in {directory}")
    return files


def user_background(rng: np.random.Generator, files: list[Path], height: int, width: int) -> np.ndarray:
    return read_background_image(files[rng.integers(len(files))], width, height)
