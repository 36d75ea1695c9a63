"""
Bundled experiment fixtures.
Each fixture is a JSON experiment config stored next to this module.
"""

import json
from pathlib import Path
from typing import Any, Dict, List

FIXTURE_DIR = Path(__file__).parent / "fixtures"

FIXTURES = {
    "gabor16": "Gaussian Gabor system on Z_16 (a = b = 2), raised-cosine partition, E sweep over l^1, l^2, l^inf",
    "gabor32": "Gaussian Gabor system on Z_32 (a = b = 4); error certificate along U radii 2, 4, 8, 16",
    "theta16": "gabor16 with theta_gamma = (0.6 + 0.3 cos) eta_gamma and the matching multiplier inversion",
    "gabor8_modulation": "Full-lattice Gabor system on Z_8 driving the modulation-norm harness",
    "block8": "Block atoms chi_[2k, 2k+2) on Z_8 with the alternating sign mask",
    "delta8": "Orthonormal delta atoms on Z_8",
    "localized65": "Exponentially localized frame on Z restricted to [-32, 32], polynomial weight (1 + |x|)^2",
}


def get_available_fixtures() -> List[str]:
    """Get list of bundled fixture names"""
    return sorted(FIXTURES)


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise KeyError(f"Unknown fixture: {name}")
    return FIXTURE_DIR / f"{name}.json"


def load_fixture(name: str) -> Dict[str, Any]:
    """Raw config document of a bundled fixture"""
    return json.loads(fixture_path(name).read_text(encoding="utf-8"))
