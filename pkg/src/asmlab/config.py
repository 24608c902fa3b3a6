"""Numerical tolerance profiles.

All validation thresholds used across the package live in one record so a
whole run can be tightened or loosened coherently. The active profile is
chosen by the ASMLAB_TOLERANCE_PROFILE environment variable ("default" or
"strict"); individual calls may pass an explicit Tolerances instance.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    hermiticity: float = 1e-12      # max-entry bound on M - M^dag at construction
    psd: float = 1e-10              # min eigenvalue >= -psd for positivity
    trace: float = 1e-10            # |trace(rho) - 1| bound for states
    normalization: float = 1e-10    # ||A(X) - I|| bound for normalized measures
    projectivity: float = 1e-10     # residual bound for PVM checks
    support: float = 1e-12          # ||effect|| above this counts as spectrum
    spin: float = 1e-12             # spin-POVM invariants (sum to I, unit traces)
    stochastic: float = 1e-12       # row-sum deviation for stochastic matrices
    cluster_scale: float = 1e-8     # eigenvalue clustering: gap <= scale*max(1, ||H||)
    jacobi_off: float = 1e-13       # off-diagonal mass target, relative to max(1, ||H||_F)
    jacobi_sweeps: int = 100        # cyclic sweep cap before declaring non-convergence


DEFAULT = Tolerances()
STRICT = replace(
    DEFAULT,
    hermiticity=1e-13,
    psd=1e-12,
    trace=1e-12,
    normalization=1e-12,
    projectivity=1e-12,
    spin=1e-13,
    stochastic=1e-13,
    jacobi_off=1e-14,
)

_PROFILES = {"default": DEFAULT, "strict": STRICT}


def active_tolerances() -> Tolerances:
    """Profile selected by ASMLAB_TOLERANCE_PROFILE (unset means default)."""
    name = os.environ.get("ASMLAB_TOLERANCE_PROFILE", "default").lower()
    try:
        return _PROFILES[name]
    except KeyError:
        raise ValueError(
            f"unknown tolerance profile {name!r}; expected one of {sorted(_PROFILES)}"
        ) from None


def resolve(tol: Tolerances | None) -> Tolerances:
    return active_tolerances() if tol is None else tol
