from pathlib import Path
from typing import Union

import numpy as np

from pose_processing.anchors.models import PriorPredictions
from pose_processing.errors import DataError
from pose_processing.utils import read_json, write_json

SCORE_TENSOR_DTYPE = "<f4"
RECORD_ORDER = ["offsets", "class_logits", "view_logits", "inplane_logits"]


def write_score_tensors(header_path: Union[str, Path], predictions: PriorPredictions,
                        full_sphere_views: bool = False) -> Path:
    """Writes one (4 + C + V + R) float record per prior to a .bin file described by a JSON header."""
    header_path = Path(header_path)
    data_path = header_path.with_suffix(".bin")
    header = {
        "prior_count": predictions.prior_count,
        "class_count": predictions.class_logits.shape[1],
        "view_count": predictions.view_logits.shape[1],
        "inplane_count": predictions.inplane_logits.shape[1],
        "dtype": SCORE_TENSOR_DTYPE,
        "order": RECORD_ORDER,
        "layout": "prior-major",
        "full_sphere_views": full_sphere_views,
        "data_file": data_path.name,
    }
    write_json(header_path, header)
    predictions.as_records().astype(SCORE_TENSOR_DTYPE).tofile(data_path)
    return header_path


def read_score_tensors(header_path: Union[str, Path]) -> tuple[PriorPredictions, bool]:
    header_path = Path(header_path)
    header = read_json(header_path)
    try:
        data_path = header_path.parent / header["data_file"]
        counts = [header["class_count"], header["view_count"], header["inplane_count"]]
        prior_count = header["prior_count"]
        dtype = np.dtype(header["dtype"])
        if header.get("order", RECORD_ORDER) != RECORD_ORDER:
            raise DataError(f"Unsupported record order {header['order']} in {header_path}")
    except (KeyError, TypeError) as e:
        raise DataError(f"Malformed score tensor header {header_path}: {e}")
    if not data_path.exists():
        raise DataError(f"Missing score tensor data {data_path}")

    values = np.fromfile(data_path, dtype=dtype)
    record_length = 4 + sum(counts)
    if values.size != prior_count * record_length:
        raise DataError(f"Score tensor {data_path} holds {values.size} values, "
                        f"expected {prior_count} x {record_length}")
    records = values.reshape(prior_count, record_length).astype(np.float64)
    return PriorPredictions.from_records(records, *counts), bool(header.get("full_sphere_views", False))
