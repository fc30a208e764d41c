from pathlib import Path
from typing import Union

from matplotlib import pyplot as plt

from pose_processing.refinement.models import RefinementResult


def plot_convergence(results: list[RefinementResult], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig = plt.figure()
    for index, result in enumerate(results):
        if result.trace:
            plt.plot(range(len(result.trace)), result.trace, marker="o", label=f"{result.method} {index}")
    plt.xlabel("Correspondence round")
    plt.ylabel("Residual")
    if any(result.trace for result in results):
        plt.legend()
    plt.savefig(path)
    plt.close(fig)
    return path
