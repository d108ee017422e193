"""Cutoff Coulomb potentials on the half-line x >= 0.

Two families are built in:

    v1:  V(x) = -alpha / (x + a)
    v2:  V(x) = -alpha / x  for x > a,   -alpha / a  for x <= a

Both are even in the full-line coordinate; the solver only ever evaluates
them for x >= 0 and carries parity through the initial conditions.  Further
one-parameter cutoffs can be registered with :func:`register_family`; they
must be negative, vanish at infinity, and depend on a single length a > 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from kg1d.errors import DomainError


@dataclass(frozen=True)
class Family:
    name: str
    # vectorised evaluation: (x >= 0 array, a, alpha) -> V array
    evaluate: Callable[[np.ndarray, float, float], np.ndarray]
    # point where V' jumps (must become a mesh node), as a multiple of a
    kink: float | None = None


def _v1(x, a, alpha):
    return -alpha / (x + a)


def _v2(x, a, alpha):
    # np.maximum keeps -alpha/a exactly for x <= a, and is continuous at x = a
    return -alpha / np.maximum(x, a)


FAMILIES: dict[str, Family] = {
    "v1": Family("v1", _v1),
    "v2": Family("v2", _v2, kink=1.0),
}


def register_family(family: Family) -> None:
    if family.name in FAMILIES:
        raise ValueError(f"potential family {family.name!r} already registered")
    FAMILIES[family.name] = family


@dataclass(frozen=True)
class PotentialSpec:
    family: str
    a: float
    alpha: float

    def __post_init__(self):
        fam = self.family.lower()
        if fam not in FAMILIES:
            raise DomainError(f"unknown potential family {self.family!r}; "
                              f"known: {sorted(FAMILIES)}")
        object.__setattr__(self, "family", fam)
        if not (self.a > 0.0 and np.isfinite(self.a)):
            raise DomainError(f"cutoff a must be positive and finite, got {self.a!r}")
        # alpha = 0 is admitted as the free reference case
        if not self.alpha >= 0.0:
            raise DomainError(f"alpha must be non-negative, got {self.alpha!r}")

    @property
    def kink(self) -> float | None:
        """Location of the derivative discontinuity of V, if any."""
        k = FAMILIES[self.family].kink
        return None if k is None else k * self.a

    def values(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any(x < 0.0):
            raise DomainError("potential is evaluated on the half-line x >= 0 only")
        return FAMILIES[self.family].evaluate(x, self.a, self.alpha)

    def __call__(self, x: float) -> float:
        return potential_value(self, x)


def potential_value(spec: PotentialSpec, x: float) -> float:
    if x < 0.0:
        raise DomainError(f"x must be >= 0, got {x!r}")
    return float(FAMILIES[spec.family].evaluate(np.float64(x), spec.a, spec.alpha))


def depth(spec: PotentialSpec) -> float:
    """Minimum of V over x >= 0; -alpha/a for both built-in families."""
    return potential_value(spec, 0.0)
