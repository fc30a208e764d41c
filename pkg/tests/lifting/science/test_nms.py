import unittest

import numpy as np

from pose_processing.lifting.science.nms import nms
from tests.test_helpers import make_detection


def greedy_oracle(boxes, scores, classes, threshold):
    def iou(a, b):
        width = max(0.0, min(a[2], b[2]) - max(a[0], b[0]))
        height = max(0.0, min(a[3], b[3]) - max(a[1], b[1]))
        intersection = width * height
        return intersection / ((a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - intersection)

    remaining = sorted(range(len(boxes)), key=lambda i: (-scores[i], i))
    keep = []
    while remaining:
        best = remaining.pop(0)
        keep.append(best)
        remaining = [i for i in remaining if classes[i] != classes[best] or iou(boxes[i], boxes[best]) <= threshold]
    return keep


class TestNms(unittest.TestCase):
    def test_single_detection(self):
        detection = make_detection(0, [10, 10, 50, 50], 0.7)
        self.assertEqual([detection], nms([detection]))

    def test_empty(self):
        self.assertEqual([], nms([]))

    def test_identical_boxes_keep_highest_score(self):
        low = make_detection(0, [10, 10, 50, 50], 0.8)
        high = make_detection(1, [10, 10, 50, 50], 0.9)
        self.assertEqual([high], nms([low, high]))

    def test_other_classes_are_not_suppressed(self):
        first = make_detection(0, [10, 10, 50, 50], 0.9, class_id=1)
        second = make_detection(1, [10, 10, 50, 50], 0.8, class_id=2)
        self.assertEqual([first, second], nms([second, first]))

    def test_threshold_is_exclusive(self):
        first = make_detection(0, [0, 0, 10, 10], 0.9)
        second = make_detection(1, [0, 0, 10, 4.5], 0.8)
        self.assertEqual(2, len(nms([first, second], iou_threshold=0.45)))
        self.assertEqual(1, len(nms([first, second], iou_threshold=0.44)))

    def test_chain_of_overlapping_boxes(self):
        scores = [0.5, 0.9, 0.6, 0.8, 0.7]
        boxes = [[10 * i, 0, 10 * i + 20, 20] for i in range(5)]
        detections = [make_detection(i, box, score) for i, (box, score) in enumerate(zip(boxes, scores))]

        expected = greedy_oracle(boxes, scores, [1] * 5, 0.3)
        self.assertEqual(expected, [d.prior_id for d in nms(detections, iou_threshold=0.3)])

    def test_random_sets_match_oracle_and_are_idempotent(self):
        rng = np.random.default_rng(21)
        for trial in range(30):
            with self.subTest(trial):
                count = int(rng.integers(1, 25))
                corners = rng.uniform(0, 100, (count, 2))
                boxes = np.hstack([corners, corners + rng.uniform(5, 60, (count, 2))])
                scores = rng.uniform(0.1, 1.0, count)
                classes = rng.integers(1, 3, count)
                detections = [make_detection(i, boxes[i], scores[i], class_id=int(classes[i]))
                              for i in range(count)]

                kept = nms(detections)

                self.assertEqual(greedy_oracle(boxes, scores, classes, 0.45), [d.prior_id for d in kept])
                self.assertEqual(kept, nms(kept))


if __name__ == '__main__':
    unittest.main()
