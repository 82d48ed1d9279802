"""
Quadrisecant Toolkit Configuration
Defaults for enumeration, tracing, output and the run catalogue
"""
import os
import json
from pathlib import Path
from dotenv import load_dotenv
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, Optional

# Load environment variables
BASE_DIR = Path(__file__).parent
load_dotenv(BASE_DIR / ".env")

# Project paths
LOG_DIR = Path(os.getenv("QS_LOG_DIR", str(BASE_DIR / "logs")))
OUTPUT_DIR = Path(os.getenv("QS_OUTPUT_DIR", "runs"))
CATALOG_PATH = os.getenv("QS_CATALOG_PATH", "")  # empty = catalogue disabled

# ============================================
# Reproducibility
# ============================================
DEFAULT_SEED = int(os.getenv("QS_SEED", "0"))
DEFAULT_WORKERS = int(os.getenv("QS_WORKERS", "1"))
REPORT_SCHEMA_VERSION = 1
LINK_FORMAT_VERSION = 1

# ============================================
# Link model
# ============================================
# Default perturbation magnitude as a fraction of the link diameter
PERTURB_FRACTION = os.getenv("QS_PERTURB_FRACTION", "1e-6")
# Decimal digits kept when rationalizing trigonometric preset samples
PRESET_DIGITS = int(os.getenv("QS_PRESET_DIGITS", "14"))

# ============================================
# Stabbing engine
# ============================================
KEY_DIGITS = int(os.getenv("QS_KEY_DIGITS", "9"))  # rounding of t in dedup keys
PREFILTER_SLACK = float(os.getenv("QS_PREFILTER_SLACK", "1e-6"))  # float window before exact solve
BATCH_SIZE = int(os.getenv("QS_BATCH_SIZE", "2048"))  # quadruples per worker task

# ============================================
# Obstruction tracing
# ============================================
DEFAULT_SAMPLES = int(os.getenv("QS_SAMPLES", "8"))  # samples per edge
DIAGONAL_MARGIN = float(os.getenv("QS_DIAGONAL_MARGIN", "0.001"))  # chart units
REFINE_CAP = int(os.getenv("QS_REFINE_CAP", "12"))  # bisections before step-size failure
STEP_BOUND = float(os.getenv("QS_STEP_BOUND", "0.05"))  # max chart jump between samples
CLEAR_ARC_REFINEMENTS = int(os.getenv("QS_CLEAR_ARC_REFINEMENTS", "2"))

# ============================================
# Winding numbers
# ============================================
INTEGRALITY_TOL = float(os.getenv("QS_INTEGRALITY_TOL", "1e-6"))


@dataclass
class RunConfig:
    """Effective configuration of one CLI run (written as the run manifest)"""
    subcommand: str
    flags: Dict[str, Any] = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    workers: int = DEFAULT_WORKERS
    output_dir: str = str(OUTPUT_DIR)
    strict: bool = False
    key_digits: int = KEY_DIGITS
    prefilter_slack: float = PREFILTER_SLACK
    diagonal_margin: float = DIAGONAL_MARGIN
    schema_version: int = REPORT_SCHEMA_VERSION

    def to_manifest(self) -> str:
        """Canonical JSON text; identical configs give identical bytes"""
        return json.dumps(asdict(self), sort_keys=True, indent=2, default=str) + "\n"

    @classmethod
    def from_manifest(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))

    def write(self, directory: Optional[Path] = None) -> Path:
        """Write manifest.json into the output directory"""
        target = Path(directory or self.output_dir)
        target.mkdir(parents=True, exist_ok=True)
        path = target / "manifest.json"
        path.write_text(self.to_manifest(), encoding="utf-8")
        return path


def print_config():
    """Print current configuration"""
    print("\n" + "=" * 50)
    print("[INFO] QUADRISECANT TOOLKIT CONFIGURATION")
    print("=" * 50)
    print(f"  Seed: {DEFAULT_SEED}   Workers: {DEFAULT_WORKERS}")
    print(f"  Output dir: {OUTPUT_DIR}")
    print(f"  Logs: {LOG_DIR}")
    print(f"  Perturbation: {PERTURB_FRACTION} x diameter")
    print(f"  Dedup key digits: {KEY_DIGITS}   Prefilter slack: {PREFILTER_SLACK}")
    print(f"  Samples/edge: {DEFAULT_SAMPLES}   Diagonal margin: {DIAGONAL_MARGIN}")
    if not CATALOG_PATH:
        print("[WARN]  Run catalogue disabled (set QS_CATALOG_PATH or pass --catalog)")
    else:
        print(f"  Catalogue: {CATALOG_PATH}")
    print("=" * 50 + "\n")


if __name__ == "__main__":
    print_config()
