import os
from pathlib import Path

# Base paths
BASE_DIR = Path(__file__).resolve().parent.parent.parent
OUTPUT_DIR = Path(os.getenv("PATCHLOC_OUTPUT_DIR", str(BASE_DIR / "output")))

# Logging
LOG_LEVEL = os.getenv("PATCHLOC_LOG_LEVEL", "INFO")
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Patch radius w* as a fraction of the admissible bound
W_STAR_FACTOR = 0.99

# Grid spacing as a fraction of the dimension-specific bound
SPACING_SAFETY = 0.999

# Padding tau of the background box, as a fraction of the largest extent
PADDING_FRACTION = 0.05

# Boundary band: tol = TOLERANCE_FACTOR * h
TOLERANCE_FACTOR = 1e-12

# Elements with measure below DEGENERATE_FACTOR * h**dim are rejected
DEGENERATE_FACTOR = 1e-14

# Candidate-list grid spacing as a multiple of h
AUX_GRID_SPACING_FACTOR = 1.0

# Supported formats
MESH_FORMATS = {
    "GMSH": "gmsh22-ascii",
    "NODE_ELE": "node-ele",
    "NATIVE": "native"
}

REPORT_FORMATS = ("csv", "json", "table")

LOCATE_METHODS = ("patch", "walk", "auxgrid", "brute")

# Exterior sector payload and unset map entries
EXTERIOR = -1
UNSET = -1
