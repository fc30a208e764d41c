from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from pose_processing.anchors.models import Detection
from pose_processing.geometry.pose import Pose


@dataclass
class Hypothesis:
    pose: Pose
    view_id: int
    inplane_id: int
    prior_score: float
    refined_pose: Optional[Pose] = None
    residual: Optional[float] = None
    skipped: bool = False
    verification_score: Optional[float] = None

    @property
    def final_pose(self) -> Pose:
        return self.refined_pose if self.refined_pose is not None else self.pose

    def to_json(self) -> dict:
        content = {"view_id": self.view_id, "inplane_id": self.inplane_id, "prior_score": self.prior_score,
                   "pose": self.pose.to_json()}
        if self.refined_pose is not None:
            content["refined_pose"] = self.refined_pose.to_json()
            content["residual"] = self.residual
            content["skipped"] = self.skipped
        if self.verification_score is not None:
            content["verification_score"] = self.verification_score
        return content


@dataclass
class HypothesisPool:
    """Poses lifted from the most confident view and in-plane ids of one detection."""
    detection: Detection
    hypotheses: list[Hypothesis] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.hypotheses)

    def to_json(self) -> dict:
        return {"detection": self.detection.to_json(),
                "hypotheses": [hypothesis.to_json() for hypothesis in self.hypotheses]}
