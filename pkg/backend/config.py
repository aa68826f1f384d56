# backend/config.py
"""
kdom – runtime configuration
- Reads .env (optional) once; every knob has a default
- Knobs tune single operations (CLI/API); experiment configs never read them
"""

import os
import logging
from dotenv import load_dotenv
load_dotenv()

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

# max_rounds = ROUND_FACTOR * (k + 1) for the shipped node programs
ROUND_FACTOR = int(os.getenv("KDOM_ROUND_FACTOR", "10"))

ORACLE_NODE_BUDGET = int(os.getenv("KDOM_ORACLE_NODE_BUDGET", "2000000"))
MINOR_PAIR_BUDGET = int(os.getenv("KDOM_MINOR_PAIR_BUDGET", "5000000"))
DECOMP_RETRIES = int(os.getenv("KDOM_DECOMP_RETRIES", "8"))
WORKERS = max(1, int(os.getenv("KDOM_WORKERS", "1")))

API_BASE = os.getenv("API_BASE", "http://127.0.0.1:8000")

_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(level: str | None = None) -> None:
    """Configure the root handler; safe to call more than once."""
    logging.basicConfig(level=(level or LOG_LEVEL).upper(), format=_FORMAT, force=True)


def max_rounds_for(k: int) -> int:
    return ROUND_FACTOR * (k + 1)
