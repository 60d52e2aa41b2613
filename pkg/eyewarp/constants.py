# eyewarp/constants.py
"""
Default constants for eyewarp.
All tunable values are centralised here so they can be overridden via RunConfig
without touching internal logic.
"""

import math

# ---------------------------------------------------------------------------
# Asset format
# ---------------------------------------------------------------------------
ASSET_SCHEMA_VERSION: int = 1
"""Version written into, and required from, every asset manifest."""

N_FACE_VERTICES: int = 229
"""Vertices in one face part. Both parts together expose 2 * 229 indices."""

N_SHAPE_MODES: int = 16
N_TEXTURE_MODES: int = 8
N_LANDMARKS: int = 25

DEFAULT_TEXTURE_SIZE: int = 512
"""Side length of the face texture map in texels."""

LANDMARK_SEMANTICS: tuple[str, ...] = (
    *(f"brow_left_{i}" for i in range(5)),
    *(f"brow_right_{i}" for i in range(5)),
    *(f"nose_{i}" for i in range(3)),
    *(f"lid_left_{i}" for i in range(6)),
    *(f"lid_right_{i}" for i in range(6)),
)
"""Tracked landmark order: eyebrows, nose, eyelids."""

# ---------------------------------------------------------------------------
# Eyeball geometry (mm)
# ---------------------------------------------------------------------------
SCLERA_RADIUS: float = 12.0
CORNEA_RADIUS: float = 8.0
LIMBUS_RADIUS: float = 6.0

IRIS_PLANE_Z: float = math.sqrt(SCLERA_RADIUS**2 - LIMBUS_RADIUS**2)
"""Height of the limbus circle above the eyeball center."""

CORNEA_OFFSET: float = IRIS_PLANE_Z - math.sqrt(CORNEA_RADIUS**2 - LIMBUS_RADIUS**2)
"""Distance from the eyeball center to the cornea sphere center, along the optical axis."""

LIMBUS_RHO: float = math.asin(LIMBUS_RADIUS / SCLERA_RADIUS) / math.pi
"""Polar uv radius of the limbus (1/6)."""

EYEBALL_SEGMENTS: int = 24
"""Azimuthal segments of the eyeball tessellation."""

CORNEAL_REFRACTIVE_INDEX: float = 1.376

IRIS_SCALE_RANGE: tuple[float, float] = (0.5, 2.0)
"""Open guard interval for beta_iris."""

# ---------------------------------------------------------------------------
# Anthropometric defaults
# ---------------------------------------------------------------------------
DEFAULT_IOD_MM: float = 63.0
IOD_RANGE_MM: tuple[float, float] = (40.0, 90.0)
DEFAULT_DISTANCE_MM: float = 500.0
"""Default camera-to-face distance used for theta_T."""

EYELID_GUARD_RAD: float = math.radians(35.0)
GAZE_LIMIT_RAD: float = math.radians(60.0)

DEFAULT_IRIS_COLOR: float = 0.8
DEFAULT_SCLERA_TINT: float = 0.95
DEFAULT_AMBIENT: float = 0.6
DEFAULT_DIRECTIONAL: float = 0.4

# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------
AO_MIN: float = 0.3
AO_BAND: float = 0.15
"""Width of the eyelid occlusion falloff in eyeball uv units."""

AO_MIN_POINTS: int = 10
"""Lid polynomial fits with fewer projected points are skipped."""

SPECULAR_WEIGHT: float = 0.25
N_REFLECTION_MAPS: int = 5
REFLECTION_MAP_SHAPE: tuple[int, int] = (32, 64)

NEAR_PLANE_MM: float = 1e-3
RASTER_CHUNK: int = 2_000_000
"""Maximum candidate pixel/triangle pairs evaluated at once."""

FOCAL_PER_WIDTH: float = 3.8
"""default_camera() focal length in units of image width."""

# ---------------------------------------------------------------------------
# Energy
# ---------------------------------------------------------------------------
ROBUST_T: float = 0.09
LAMBDA_LDMKS: float = 20.0
LAMBDA_GEO: float = 0.01
LAMBDA_TEX: float = 0.01
LAMBDA_POSE: float = 0.1
IMAGE_WEIGHT: float = 1.0

# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------
MAX_ITERATIONS: int = 20
ETA_INITIAL: float = 1.0
ETA_DECAY: float = 0.9
DAMPING_FACTOR: float = 1e-3
"""Initial Levenberg-Marquardt damping on the column-scaled normal equations."""
DAMPING_GROWTH: float = 10.0
DAMPING_MIN: float = 1e-9
CONVERGENCE_THRESHOLD: float = 1e-4
MAX_STEP_RETRIES: int = 8

STEP_PCA: float = 0.05
STEP_ANGLE_RAD: float = math.radians(0.5)
STEP_MM: float = 0.5
STEP_COLOR: float = 0.02

# ---------------------------------------------------------------------------
# Redirection
# ---------------------------------------------------------------------------
SEAM_SIGMA_PX: float = 1.5
SEAM_BAND_PX: float = 3.0

# ---------------------------------------------------------------------------
# Benchmark
# ---------------------------------------------------------------------------
BENCH_PITCH_RANGE_DEG: float = 15.0
BENCH_YAW_RANGE_DEG: float = 20.0
BENCH_MIN_CHANGE_DEG: float = 5.0

ROUND_TRIP_GAZE_DEG: float = 10.0
ROUND_TRIP_TRANSLATION_MM: float = 5.0
ROUND_TRIP_LID_DEG: float = 5.0
ROUND_TRIP_REPORT_ITERATION: int = 4
"""Iteration at which the round-trip report samples E_img and E_ldmks."""
