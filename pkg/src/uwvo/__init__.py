"""Visual odometry with transmission-weighted optical flow for underwater sequences."""

from .errors import (
    CheiralityError,
    DegenerateGeometryError,
    DegenerateInputError,
    ParameterError,
    ParseError,
    RankDeficiencyError,
    ShapeError,
    UwvoError,
)
from .flow import FlowParams, estimate_flow, flow_epe, warp_image, weight_flow
from .geometry import (
    CameraIntrinsics,
    PoseBackendMode,
    RansacParams,
    RelativeMotion,
    decompose_essential,
    estimate_essential,
    flow_to_correspondences,
    recover_motion,
)
from .imaging import (
    HazeParams,
    NormalizationParams,
    apply_degradation,
    estimate_ambient,
    estimate_transmission,
    invert,
    normalize_transmission,
    restore_radiance,
)
from .trajectory import Trajectory, ate, compose_trajectory, load_tum, rte, save_tum, trajectory_length, umeyama_align

__version__ = "0.1.0"
