"""
LPStream: Configuration

Defaults come from the environment (optionally a .env file in the working
directory). Everything here is a plain dict or constant; the CLI and the
pipeline read from it, library code takes explicit arguments.
"""

import os

from dotenv import load_dotenv

load_dotenv()

# "sketch" is accepted as a synonym of the randomized backend.
_BACKEND = os.getenv("LPSTREAM_BACKEND", "exact")

# ============================================================
# Run defaults
# ============================================================

DEFAULT_RUN_SETTINGS = {
    "seed": int(os.getenv("LPSTREAM_SEED", "0")),
    "backend": "randomized" if _BACKEND == "sketch" else _BACKEND,
    "iteration_factor": float(os.getenv("LPSTREAM_ITERATION_FACTOR", "20")),
    "log_level": os.getenv("LPSTREAM_LOG_LEVEL", "INFO"),
    "log_file": os.getenv("LPSTREAM_LOG_FILE") or None,
}

# ============================================================
# Sketch profiles
# ============================================================

# Accuracy of the sampling-pass estimators and samplers on the randomized
# backend.
RANDOMIZED_PROFILE = {
    "zeta": 0.25,
    "delta": 0.01,
}

# Estimator accuracy inside the violator check (the 1 ± 1/4 of its test).
CHECK_ZETA = 0.25
CHECK_DELTA = 0.01

# ============================================================
# Verify mode
# ============================================================

VERIFY_LIMITS = {
    "max_points": 2000,
    "max_dim": 4,
    "sdp_dim": 2,
}

# Delta of the integer input lattice {-Δ..Δ}^d when the caller does not declare one.
DEFAULT_DELTA_BOUND = 1 << 20
