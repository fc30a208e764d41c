CANONICAL_DISTANCE_METERS = 0.5

ICOSPHERE_MAX_LEVEL = 5
VIEW_TOLERANCE = 1e-6

DEFAULT_INPLANE_RANGE_DEGREES = (-45, 45, 5)
DEFAULT_ICOSPHERE_LEVEL = 3

POSITIVE_IOU_THRESHOLD = 0.5
HARD_NEGATIVE_RATIO = 2
SMOOTH_L1_TRANSITION = 1.0

LOSS_WEIGHT_FIT = 1.5
LOSS_WEIGHT_VIEW = 2.5
LOSS_WEIGHT_INPLANE = 1.5

NMS_IOU_THRESHOLD = 0.45
MIN_BOX_DIAGONAL_PIXELS = 2.0
DEFAULT_VIEWS_PARSED = 3
DEFAULT_INPLANES_PARSED = 3

GEMAN_MCCLURE_SCALE_PIXELS = 5.0
EDGE_SEARCH_RADIUS_PIXELS = 20
ICP_DEPTH_GATE_METERS = 0.02
ICP_NORMAL_GATE_DEGREES = 45.0
MIN_CORRESPONDENCES = 6

DEPTH_UNITS_PER_METER = 10_000
MAX_PERSISTED_DEPTH_UNITS = 65_535

ADD_DIAMETER_FRACTION = 0.1
POSE_IOU_THRESHOLD = 0.5

# LineMOD Kinect intrinsics at 640x480
LINEMOD_FX = 572.4114
LINEMOD_FY = 573.5704
LINEMOD_CX = 325.2611
LINEMOD_CY = 242.0490
LINEMOD_WIDTH = 640
LINEMOD_HEIGHT = 480

REFINE_ROUNDS = 5
REFINE_INNER_ITERATIONS = 10
ICP_ROUNDS = 10
MAX_STEP_HALVINGS = 3
MAX_CONTOUR_POINTS = 400
GATE_ANNEALING_ROUNDS = 2
EDGE_SMOOTHING_SIGMA_PIXELS = 1.0
EDGE_ORIENTATION_AGREEMENT = 0.5
VERIFY_EDGE_DISTANCE_PIXELS = 1.0

DETECTION_IOU_THRESHOLD = 0.5
SCORE_THRESHOLD_COUNT = 20
