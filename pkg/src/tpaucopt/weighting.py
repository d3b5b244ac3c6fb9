"""Calibrated weighting functions and their dual penalties.

A weighting scheme maps a difficulty value t in [0, 1] to a soft sample
weight psi(t).  Each scheme carries a strictly convex penalty phi whose
derivative inverts psi, so either side can generate the other.  Two
closed-form families are provided:

* ``poly``: psi(t) = t**(1/(gamma-1)), phi(v) = v**gamma / gamma
* ``exp``:  psi(t) = 1 - exp(-gamma*t), phi(v) = ((1-v)*(log(1-v)-1)+1)/gamma

A degenerate ``const`` family (psi == 1, no penalty dual) exists so that
weighted objectives can be cross-checked against their unweighted
counterparts in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "WeightScheme",
    "psi",
    "psi_prime",
    "phi",
    "phi_prime",
    "dual_check",
    "calibration_check",
]

# Central differences: step and the exclusion margin that keeps probe
# points away from the domain boundary where psi' blows up.  Curvature
# probes need a wider step: near-saturated exp weights give second
# differences below float resolution at 1e-5.
_FD_STEP = 1e-5
_FD_STEP_CURVATURE = 1e-3
_FD_MARGIN = 1e-3


@dataclass(frozen=True)
class WeightScheme:
    """A weighting family with its shape parameter.

    ``poly`` requires gamma > 2 to be a valid (concave) weighting; pass
    ``analysis_only=True`` to allow any gamma > 1 when probing the convex
    regime.  ``exp`` requires gamma > 0.  ``const`` ignores gamma.
    """

    family: str
    gamma: float = 0.0
    analysis_only: bool = False

    def __post_init__(self):
        if self.family not in ("poly", "exp", "const"):
            raise ValueError(f"unknown weighting family {self.family!r}")
        if self.family == "poly":
            floor = 1.0 if self.analysis_only else 2.0
            if not self.gamma > floor:
                raise ValueError(
                    f"poly weighting requires gamma > {floor:g} "
                    f"(got {self.gamma!r})"
                )
        elif self.family == "exp" and not self.gamma > 0:
            raise ValueError(f"exp weighting requires gamma > 0 (got {self.gamma!r})")

    @property
    def sup_weight(self) -> float:
        """Largest weight the scheme can emit on [0, 1]."""
        if self.family == "exp":
            return 1.0 - np.exp(-self.gamma)
        return 1.0

    @property
    def penalty_domain_max(self) -> float:
        """Upper end of the open interval where phi' is defined and invertible."""
        if self.family == "exp":
            return 1.0 - np.exp(-self.gamma)
        return 1.0


def _check_unit_interval(t, name):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > 1.0):
        raise ValueError(f"{name} must lie in [0, 1]")
    return t


def psi(scheme: WeightScheme, t):
    """Evaluate the weighting function at t in [0, 1]."""
    t = _check_unit_interval(t, "t")
    if scheme.family == "poly":
        return t ** (1.0 / (scheme.gamma - 1.0))
    if scheme.family == "exp":
        return 1.0 - np.exp(-scheme.gamma * t)
    return np.ones_like(t)


def psi_prime(scheme: WeightScheme, t):
    """Derivative of the weighting function (diverges at t=0 for poly)."""
    t = _check_unit_interval(t, "t")
    if scheme.family == "poly":
        e = 1.0 / (scheme.gamma - 1.0)
        return e * t ** (e - 1.0)
    if scheme.family == "exp":
        return scheme.gamma * np.exp(-scheme.gamma * t)
    return np.zeros_like(t)


def phi(scheme: WeightScheme, v):
    """Evaluate the penalty function at weight value v.

    For ``exp`` the isolated point v=1 takes the continuous extension
    1/gamma (the removable limit of the closed form).
    """
    v = np.asarray(v, dtype=float)
    if scheme.family == "poly":
        if np.any(v < 0.0):
            raise ValueError("poly penalty requires v >= 0")
        return v**scheme.gamma / scheme.gamma
    if scheme.family == "exp":
        if np.any(v < 0.0) or np.any(v > 1.0):
            raise ValueError("exp penalty requires v in [0, 1]")
        u = 1.0 - v
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (u * (np.log(u) - 1.0) + 1.0) / scheme.gamma
        return np.where(u == 0.0, 1.0 / scheme.gamma, out)
    raise ValueError("constant weighting has no penalty dual")


def phi_prime(scheme: WeightScheme, v):
    """Derivative of the penalty; inverse of psi on the valid domain."""
    v = np.asarray(v, dtype=float)
    if scheme.family == "poly":
        if np.any(v < 0.0):
            raise ValueError("poly penalty requires v >= 0")
        return v ** (scheme.gamma - 1.0)
    if scheme.family == "exp":
        if np.any(v < 0.0) or np.any(v >= 1.0):
            raise ValueError("exp penalty derivative requires v in [0, 1)")
        return -np.log(1.0 - v) / scheme.gamma
    raise ValueError("constant weighting has no penalty dual")


def dual_check(scheme: WeightScheme, grid_size: int) -> float:
    """Max residual of psi(phi'(v)) - v over an interior grid of weights.

    Zero (to rounding) certifies that the weighting really is the inverse
    of the penalty derivative.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    v_max = scheme.penalty_domain_max
    v = np.linspace(0.0, v_max, grid_size + 2)[1:-1]
    residual = psi(scheme, phi_prime(scheme, v)) - v
    return float(np.max(np.abs(residual)))


def calibration_check(scheme: WeightScheme, grid_size: int) -> dict:
    """Finite-difference check that psi is increasing and strictly concave.

    Returns ``{"monotone": bool, "concave": bool}`` from central first and
    second differences on an interior grid.
    """
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    t = np.linspace(_FD_MARGIN, 1.0 - _FD_MARGIN, grid_size)
    h1 = _FD_STEP
    first = (psi(scheme, t + h1) - psi(scheme, t - h1)) / (2.0 * h1)
    h2 = _FD_STEP_CURVATURE
    up, mid, dn = psi(scheme, t + h2), psi(scheme, t), psi(scheme, t - h2)
    second = (up - 2.0 * mid + dn) / (h2 * h2)
    return {
        "monotone": bool(np.all(first > 0.0)),
        "concave": bool(np.all(second < 0.0)),
    }
