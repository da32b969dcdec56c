import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

CODE_VERSION = "0.4.0"

# Paths
BASE_DIR = Path(__file__).parent
OUTPUT_DIR = Path(os.getenv("SOS_OUTPUT_DIR", BASE_DIR / "runs"))

# Logging
LOG_LEVEL = os.getenv("SOS_LOG_LEVEL", "INFO").upper()

# Exact oracle
ORACLE_BUDGET = int(os.getenv("SOS_ORACLE_BUDGET", 10**8))  # max enumerated states
ORACLE_CHUNK = int(os.getenv("SOS_ORACLE_CHUNK", 2**18))  # states per enumeration chunk
ORACLE_DEFAULT_CAP = 3
IDENTITY_RTOL = 1e-10

# Sampler
WORKERS = int(os.getenv("SOS_WORKERS", 1))  # parallel (N, h, seed) jobs
NUMBA_THREADS = int(os.getenv("SOS_NUMBA_THREADS", 0))  # 0 = numba default
CAP_HIT_THRESHOLD = float(os.getenv("SOS_CAP_HIT_THRESHOLD", 1e-6))
CAP_TAIL_TOL = 1e-12  # untruncated conditional mass above the cap that counts as a cap hit
CAP_MARGIN = 8  # default cap = ceil(log N / (2 beta)) + CAP_MARGIN
UNIFORM_BLOCK = 2**22  # doubles drawn per block of sweeps

# Observables
MIN_BATCHES = 20

# Output layout
RUN_FILES = {
    "config": "config.json",
    "series": "series.csv",
    "summary": "summary.json",
    "verify": "verify.json",
}
