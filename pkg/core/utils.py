"""
Utility functions for the Quadrisecant Toolkit
Logging setup, seed splitting and exact decimal text
"""
import sys
import logging
from fractions import Fraction
from pathlib import Path
from typing import Union

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))
from config import LOG_DIR

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(message)s"

# Stream ids for the splittable generator; appending keeps old streams stable
SEED_STREAMS = {
    "preset": 1,
    "perturb": 2,
    "sweep": 3,
    "property": 4,
}


def get_logger(name: str, filename: str) -> logging.Logger:
    """
    Module logger writing into LOG_DIR.

    Args:
        name: logger name
        filename: log file inside LOG_DIR

    Returns:
        Configured logger (handlers attached once)
    """
    logger = logging.getLogger(name)
    logger.setLevel(logging.INFO)
    if not logger.handlers:
        try:
            LOG_DIR.mkdir(parents=True, exist_ok=True)
            fh = logging.FileHandler(LOG_DIR / filename, encoding="utf-8")
            fh.setFormatter(logging.Formatter(LOG_FORMAT))
            logger.addHandler(fh)
        except OSError as e:
            print(f"[WARN] Log file unavailable ({e}); logging to stderr")
            sh = logging.StreamHandler()
            sh.setFormatter(logging.Formatter(LOG_FORMAT))
            logger.addHandler(sh)
        logger.propagate = False
    return logger


def child_rng(seed: int, stream: str, *path: int) -> np.random.Generator:
    """
    Deterministic generator for one named stream of the run seed.

    All randomness of a run derives from its single seed through
    numpy's SeedSequence spawn keys: (stream id, *path).
    """
    key = (SEED_STREAMS[stream],) + tuple(int(p) for p in path)
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=key))


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Exact rational from '0.1', '-3/7', '1e-6' or an int (never via binary floats)"""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"expected a decimal string, got {type(text).__name__}")
    s = text.strip()
    if not s:
        raise ValueError("empty number")
    # Fraction parses decimal and p/q strings exactly
    return Fraction(s)


def _decimal_digits(q: Fraction) -> int:
    """Digits after the point for a terminating rational, -1 otherwise"""
    d = q.denominator
    exponents = []
    for p in (2, 5):
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        exponents.append(e)
    return max(exponents) if d == 1 else -1


def format_rational(q: Fraction) -> str:
    """
    Canonical text for an exact rational.

    Terminating values are written as plain decimals ('0.1', '-2', '1.25'),
    everything else as 'p/q'. parse_rational(format_rational(q)) == q.
    """
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    digits = _decimal_digits(q)
    if digits < 0:
        return f"{q.numerator}/{q.denominator}"
    sign = "-" if q < 0 else ""
    scaled = abs(q) * 10 ** digits
    body = str(scaled.numerator).rjust(digits + 1, "0")
    head, tail = body[:-digits], body[-digits:].rstrip("0")
    return f"{sign}{head}.{tail}" if tail else f"{sign}{head}"


def format_float(x: float, digits: int = 12) -> str:
    """Stable float text for reports"""
    value = float(x)
    if value == 0.0:
        value = 0.0  # drop negative zero
    return format(value, f".{digits}g")
