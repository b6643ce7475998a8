"""Growth-rate schedules and expected-size trajectories.

A schedule produces the positive rate ``alpha_i`` for each generation
transition i >= 1: the next population size is Poisson with mean
``alpha_i * N_{i-1}``.  Four variants are supported:

  constant   alpha_i = alpha                      (exponential growth)
  piecewise  alpha_i = beta for i <= t, else alpha
  logistic   alpha_i = alpha - (alpha - 1) * N_{i-1} / n_max
  custom     an explicit per-generation rate list

Only the logistic variant depends on the realized previous size, so only
its expected-size trajectory is a deterministic approximation (mean-field
recursion) rather than the exact expectation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "GrowthSchedule",
    "ConstantGrowth",
    "PiecewiseGrowth",
    "LogisticGrowth",
    "CustomGrowth",
    "parse_growth",
    "expected_sizes",
    "RATE_FLOOR",
]

logger = logging.getLogger(__name__)

# Logistic schedules can overshoot n_max by chance, making the raw rate
# non-positive; it is clamped here so the next Poisson mean is tiny but
# valid, which drives the population to extinction instead of crashing.
RATE_FLOOR = 1e-9


class GrowthSchedule:
    """Base class; concrete schedules implement `rate_at`."""

    #: True when expected sizes from the recursion are exact expectations.
    expected_exact: bool = True

    def rate_at(self, i: int, n_prev: float) -> float:
        """Growth rate for the transition into generation i (i >= 1)."""
        raise NotImplementedError

    def _check_args(self, i: int, n_prev: float) -> None:
        if i < 1:
            raise InvalidParameterError(f"generation index must be >= 1, got {i}")
        if n_prev < 0:
            raise InvalidParameterError(f"previous size must be >= 0, got {n_prev}")

    def to_spec(self) -> str:
        """Round-trippable grammar string (see `parse_growth`)."""
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantGrowth(GrowthSchedule):
    alpha: float

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidParameterError(f"constant rate must be > 0, got {self.alpha}")

    def rate_at(self, i: int, n_prev: float) -> float:
        self._check_args(i, n_prev)
        return self.alpha

    def to_spec(self) -> str:
        return f"constant:{self.alpha!r}"


@dataclass(frozen=True)
class PiecewiseGrowth(GrowthSchedule):
    """Rate `beta` through generation t, then `alpha`."""

    beta: float
    t: int
    alpha: float

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise InvalidParameterError(f"beta must be > 0, got {self.beta}")
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidParameterError(f"alpha must be > 0, got {self.alpha}")
        if self.t < 0:
            raise InvalidParameterError(f"switch generation t must be >= 0, got {self.t}")

    def rate_at(self, i: int, n_prev: float) -> float:
        self._check_args(i, n_prev)
        return self.beta if i <= self.t else self.alpha

    def to_spec(self) -> str:
        return f"piecewise:beta={self.beta!r},t={self.t},alpha={self.alpha!r}"


@dataclass(frozen=True)
class LogisticGrowth(GrowthSchedule):
    """Density-dependent rate alpha - (alpha - 1) * n_prev / n_max."""

    alpha: float
    n_max: float

    expected_exact = False

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and self.alpha >= 1):
            raise InvalidParameterError(f"logistic growth needs alpha >= 1, got {self.alpha}")
        if not (np.isfinite(self.n_max) and self.n_max >= 1):
            raise InvalidParameterError(f"logistic growth needs n_max >= 1, got {self.n_max}")

    def rate_at(self, i: int, n_prev: float) -> float:
        self._check_args(i, n_prev)
        rate = self.alpha - (self.alpha - 1.0) * n_prev / self.n_max
        if rate <= 0.0:
            logger.warning(
                "logistic rate clamped to %.1e at generation %d (size %s exceeds capacity %s)",
                RATE_FLOOR, i, n_prev, self.n_max,
            )
            return RATE_FLOOR
        return rate

    def to_spec(self) -> str:
        return f"logistic:alpha={self.alpha!r},nmax={self.n_max!r}"


class CustomGrowth(GrowthSchedule):
    """Explicit rates for generations 1..len(rates)."""

    def __init__(self, rates, source: str | None = None):
        rates = np.asarray(rates, dtype=np.float64)
        if rates.ndim != 1 or rates.size == 0:
            raise InvalidParameterError("custom schedule needs at least one rate")
        if np.any(~np.isfinite(rates)) or np.any(rates <= 0):
            raise InvalidParameterError("custom rates must all be finite and > 0")
        self.rates = rates
        self.source = source

    def rate_at(self, i: int, n_prev: float) -> float:
        self._check_args(i, n_prev)
        if i > self.rates.size:
            raise InvalidParameterError(
                f"custom schedule has {self.rates.size} rates but generation {i} was requested"
            )
        return float(self.rates[i - 1])

    def to_spec(self) -> str:
        if self.source is None:
            raise InvalidParameterError("custom schedule built from explicit rates has no file source")
        return f"custom:@{self.source}"

    def __repr__(self) -> str:
        return f"CustomGrowth({self.rates.size} rates, source={self.source!r})"


def _parse_kv(body: str, keys: tuple[str, ...], what: str) -> dict[str, str]:
    parts = [p for p in body.split(",") if p]
    got: dict[str, str] = {}
    for part in parts:
        if "=" not in part:
            raise InvalidParameterError(f"{what}: expected key=value, got {part!r}")
        key, value = part.split("=", 1)
        got[key.strip()] = value.strip()
    missing = [k for k in keys if k not in got]
    extra = [k for k in got if k not in keys]
    if missing or extra:
        raise InvalidParameterError(
            f"{what}: needs keys {','.join(keys)}; missing {missing or 'none'}, unknown {extra or 'none'}"
        )
    return got


def parse_growth(spec: str) -> GrowthSchedule:
    """Parse a schedule grammar string.

    Accepted forms:
      ``constant:ALPHA``
      ``piecewise:beta=B,t=T,alpha=A``
      ``logistic:alpha=A,nmax=M``
      ``custom:@FILE``   (one rate per line for generations 1..g)
    """
    spec = spec.strip()
    if ":" not in spec:
        raise InvalidParameterError(f"growth spec needs 'variant:...', got {spec!r}")
    variant, body = spec.split(":", 1)
    try:
        if variant == "constant":
            return ConstantGrowth(float(body))
        if variant == "piecewise":
            kv = _parse_kv(body, ("beta", "t", "alpha"), "piecewise growth")
            return PiecewiseGrowth(beta=float(kv["beta"]), t=int(kv["t"]), alpha=float(kv["alpha"]))
        if variant == "logistic":
            kv = _parse_kv(body, ("alpha", "nmax"), "logistic growth")
            return LogisticGrowth(alpha=float(kv["alpha"]), n_max=float(kv["nmax"]))
        if variant == "custom":
            if not body.startswith("@"):
                raise InvalidParameterError("custom growth needs a file: custom:@FILE")
            path = body[1:]
            try:
                with open(path) as fh:
                    rates = [float(line) for line in fh if line.strip()]
            except OSError as exc:
                raise InvalidParameterError(f"cannot read custom rate file {path!r}: {exc}") from exc
            return CustomGrowth(rates, source=path)
    except ValueError as exc:
        raise InvalidParameterError(f"bad growth spec {spec!r}: {exc}") from exc
    raise InvalidParameterError(f"unknown growth variant {variant!r}")


def expected_sizes(schedule: GrowthSchedule, n0: float, g: int) -> np.ndarray:
    """Deterministic size recursion e_i = rate_at(i, e_{i-1}) * e_{i-1}.

    Returns e_1..e_g.  For schedules whose rates do not depend on realized
    size this is the exact expectation (constant: alpha**i * n0); for the
    logistic schedule it is a mean-field approximation.
    """
    if n0 < 0:
        raise InvalidParameterError(f"initial size must be >= 0, got {n0}")
    if g < 1:
        raise InvalidParameterError(f"generation count must be >= 1, got {g}")
    out = np.empty(g, dtype=np.float64)
    e = float(n0)
    for i in range(1, g + 1):
        e = schedule.rate_at(i, e) * e
        out[i - 1] = e
    return out
