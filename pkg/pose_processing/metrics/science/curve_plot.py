from pathlib import Path
from typing import Union

from matplotlib import pyplot as plt

from pose_processing.metrics.models import DetectionScores


def plot_detection_curves(scores: DetectionScores, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig = plt.figure()
    plt.plot(scores.thresholds, scores.precision, label="Precision")
    plt.plot(scores.thresholds, scores.recall, label="Recall")
    plt.plot(scores.thresholds, scores.f1, label="F1")
    plt.xlabel("Score threshold")
    plt.ylim(0, 1.05)
    plt.title(f"AP {scores.average_precision:.3f}")
    plt.legend()
    plt.savefig(path)
    plt.close(fig)
    return path
