import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Union, Callable, Iterable

import numpy as np
from PIL import Image

from pose_processing.constants import DEPTH_UNITS_PER_METER, MAX_PERSISTED_DEPTH_UNITS
from pose_processing.errors import DataError
from pose_processing.models import DataProduct


def to_json_compatible(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {k: to_json_compatible(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json_compatible(v) for v in value]
    return value


def write_json(path: Union[str, Path], content) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(to_json_compatible(content), f, indent=2)
        f.write("\n")
    return path


def read_json(path: Union[str, Path]):
    path = Path(path)
    if not path.exists():
        raise DataError(f"Missing file {path}")
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise DataError(f"Malformed JSON in {path}: {e}")


def logical_file_id(data: DataProduct) -> str:
    metadata = data.input_metadata
    return f"pose_{metadata.command}_{metadata.descriptor}_seed{metadata.seed}_{metadata.version}"


def save_data(data: DataProduct, directory: Union[str, Path]) -> Path:
    file_path = Path(directory) / f"{logical_file_id(data)}.json"
    content = {"Logical_file_id": logical_file_id(data)}
    for variable in data.to_data_product_variables():
        content[variable.name] = variable.value
    write_json(file_path, content)
    return file_path


def write_color_ppm(path: Union[str, Path], color: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pixels = np.clip(np.round(color * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(pixels, mode="RGB").save(path, format="PPM")
    return path


def write_mask_pgm(path: Union[str, Path], mask: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pixels = np.where(mask, 255, 0).astype(np.uint8)
    Image.fromarray(pixels, mode="L").save(path, format="PPM")
    return path


def depth_to_units(depth: np.ndarray) -> np.ndarray:
    units = np.round(depth * DEPTH_UNITS_PER_METER)
    return np.clip(units, 0, MAX_PERSISTED_DEPTH_UNITS).astype(np.int32)


def write_depth_pgm(path: Union[str, Path], depth: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(depth_to_units(depth), mode="I").save(path, format="PPM")
    return path


def _open_image(path: Union[str, Path]) -> Image.Image:
    path = Path(path)
    if not path.exists():
        raise DataError(f"Missing image {path}")
    return Image.open(path)


def read_color_ppm(path: Union[str, Path]) -> np.ndarray:
    with _open_image(path) as image:
        return np.asarray(image.convert("RGB"), dtype=np.float64) / 255.0


def read_mask_pgm(path: Union[str, Path]) -> np.ndarray:
    with _open_image(path) as image:
        return np.asarray(image) > 127


def read_depth_pgm(path: Union[str, Path]) -> np.ndarray:
    with _open_image(path) as image:
        units = np.asarray(image, dtype=np.float64)
    return units / DEPTH_UNITS_PER_METER


def read_background_image(path: Union[str, Path], width: int, height: int) -> np.ndarray:
    with _open_image(path) as image:
        resized = image.convert("RGB").resize((width, height), Image.Resampling.BILINEAR)
        return np.asarray(resized, dtype=np.float64) / 255.0


def parallel_map(function: Callable, items: Iterable, threads: int = 1) -> list:
    """Applies function to every item, results in input order regardless of completion order."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(function, items))
