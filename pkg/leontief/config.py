import os
from pathlib import Path

from dotenv import load_dotenv

# Load .env from project root
_project_root = Path(__file__).parent.parent
load_dotenv(_project_root / ".env")

# Aggregation
DEFAULT_ALPHA = float(os.getenv("LEONTIEF_ALPHA", "0.5"))
REGIME_TOLERANCE = float(os.getenv("LEONTIEF_REGIME_TOL", "1e-9"))  # relative

# Scenario generation
DEFAULT_ESTABLISHMENTS = 50
DEFAULT_SEED = int(os.getenv("LEONTIEF_SEED", "0"))
DEFAULT_SLACK_MARGIN = 0.05  # non-binding factor capacity above the binding one

# Aggregate (K, L) targets of the published scenarios
PUBLISHED_CAPITAL = 3257.98
PUBLISHED_LABOR = 4879.44
KIND_II_CAPITAL = 3250.00
KIND_II_LABOR = 5000.00

# Factor adjustment
GAP_TOLERANCE = float(os.getenv("LEONTIEF_GAP_TOL", "1e-6"))
DEFAULT_FACTOR_STEP = 1.0
DEFAULT_MAX_PERIODS = int(os.getenv("LEONTIEF_MAX_PERIODS", "50"))

# Output
OUTPUT_DIR = Path(os.getenv("LEONTIEF_OUT_DIR", str(_project_root / "results")))
OUTPUT_FORMAT = os.getenv("LEONTIEF_FORMAT", "csv")
SIGNIFICANT_DIGITS = 9

LOG_LEVEL = os.getenv("LEONTIEF_LOG_LEVEL", "INFO")
