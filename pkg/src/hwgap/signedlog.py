"""Sign plus log-magnitude numbers for overflow-prone recurrences."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class SignedLog:
    """A real number stored as ``sign * exp(logmag)``.

    ``logmag`` is ignored (and set to ``-inf``) when ``sign == 0``.
    """

    sign: int
    logmag: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if self.sign != 0 and not math.isfinite(self.logmag):
            raise ValueError("logmag must be finite for a nonzero value")

    @classmethod
    def from_float(cls, value: float) -> "SignedLog":
        if value == 0.0:
            return cls(0, -math.inf)
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.logmag)

    def __mul__(self, other: "SignedLog") -> "SignedLog":
        if self.sign == 0 or other.sign == 0:
            return ZERO
        return SignedLog(self.sign * other.sign, self.logmag + other.logmag)

    def __truediv__(self, other: "SignedLog") -> "SignedLog":
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero SignedLog")
        if self.sign == 0:
            return ZERO
        return SignedLog(self.sign * other.sign, self.logmag - other.logmag)

    def __neg__(self) -> "SignedLog":
        return SignedLog(-self.sign, self.logmag)


ZERO = SignedLog(0, -math.inf)
ONE = SignedLog(1, 0.0)


def signed_sum(terms: Iterable[SignedLog]) -> SignedLog:
    """Sum signed-log terms, aligning exponents and accumulating with ``math.fsum``."""
    terms = [t for t in terms if t.sign != 0]
    if not terms:
        return ZERO
    top = max(t.logmag for t in terms)
    total = math.fsum(t.sign * math.exp(t.logmag - top) for t in terms)
    if total == 0.0:
        return ZERO
    return SignedLog(1 if total > 0 else -1, top + math.log(abs(total)))


def signed_logsumexp(signs: np.ndarray, logs: np.ndarray, axis: int = 0):
    """Vectorized signed sum; returns ``(sign, logmag)`` arrays."""
    signs = np.asarray(signs, dtype=float)
    logs = np.asarray(logs, dtype=float)
    safe = np.where(signs != 0, logs, -np.inf)
    top = np.max(safe, axis=axis, keepdims=True)
    top = np.where(np.isfinite(top), top, 0.0)
    total = np.sum(signs * np.exp(safe - top), axis=axis)
    top = np.squeeze(top, axis=axis)
    with np.errstate(divide="ignore"):
        return np.sign(total), top + np.log(np.abs(total))
