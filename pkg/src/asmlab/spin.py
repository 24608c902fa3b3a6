"""Spin-1/2 measurement theory on the Bloch ball.

Qubit states and two-outcome spin POVMs are both classified by points of the
closed unit ball: rho(x) = (I + x.sigma)/2 and A_x^+- = (I +- x.sigma)/2.
hbar-parameterized families of spin POVMs correspond to continuous ball paths
whose norm tends to 1; the Roy-Kar path (1 - hbar) n and its stochastic
smearing construction are provided, together with singlet correlations and
CHSH values for the Bell demo.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from asmlab import measures
from asmlab.config import Tolerances, resolve
from asmlab.linalg import as_density, min_eigenvalue, operator_norm
from asmlab.measures import Povm, Pvm, SampleSpace

__all__ = [
    "BlochPath",
    "PAULI",
    "SINGLET_STATE",
    "SPIN_SPACE",
    "as_bloch",
    "bell_threshold_constant",
    "bloch_from_density",
    "chsh_optimal_settings",
    "chsh_value",
    "classify_spin_povm",
    "density_from_bloch",
    "pauli_dot",
    "roy_kar_path",
    "sharp_spin_pvm",
    "sharpness",
    "singlet_correlation",
    "smearing_matrix",
    "spin_povm_from_bloch",
]

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
for _s in PAULI:
    _s.setflags(write=False)

SPIN_SPACE = SampleSpace(points=("+1/2", "-1/2"), values=(0.5, -0.5))

# (|01> - |10>)/sqrt(2), the rotation-invariant two-qubit pure state.
_SINGLET_KET = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / math.sqrt(2.0)
SINGLET_STATE = np.outer(_SINGLET_KET, _SINGLET_KET.conj())
SINGLET_STATE.setflags(write=False)


def as_bloch(x, tol: Tolerances | None = None) -> np.ndarray:
    """Validate a point of the closed unit ball in R^3."""
    t = resolve(tol)
    a = np.asarray(x, dtype=np.float64)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("Bloch components must be finite")
    norm = float(np.linalg.norm(a))
    if norm > 1.0 + t.spin:
        raise ValueError(f"point leaves the unit ball: ||x|| = {norm!r}")
    return a


def pauli_dot(x) -> np.ndarray:
    """x . sigma = x1 s1 + x2 s2 + x3 s3."""
    a = np.asarray(x, dtype=np.float64)
    return a[0] * PAULI[0] + a[1] * PAULI[1] + a[2] * PAULI[2]


def density_from_bloch(x, tol: Tolerances | None = None) -> np.ndarray:
    """State (I + x.sigma)/2; a rank-one projection exactly on the sphere."""
    t = resolve(tol)
    a = as_bloch(x, t)
    return as_density((np.eye(2) + pauli_dot(a)) / 2.0, t)


def bloch_from_density(rho, tol: Tolerances | None = None) -> np.ndarray:
    """Inverse of density_from_bloch: x_i = trace(rho sigma_i)."""
    t = resolve(tol)
    r = as_density(rho, t)
    if r.shape != (2, 2):
        raise ValueError(f"expected a qubit state, got shape {r.shape}")
    return np.array([complex(np.trace(r @ s)).real for s in PAULI])


def spin_povm_from_bloch(x, tol: Tolerances | None = None) -> Povm:
    """Two-outcome spin measurement A^+- = (I +- x.sigma)/2 on {+1/2, -1/2}."""
    t = resolve(tol)
    a = as_bloch(x, t)
    sig = pauli_dot(a)
    eye = np.eye(2)
    return Povm(SPIN_SPACE, [(eye + sig) / 2.0, (eye - sig) / 2.0], t)


def sharp_spin_pvm(n, tol: Tolerances | None = None) -> Pvm:
    """Projective spin measurement along a unit direction."""
    t = resolve(tol)
    a = as_bloch(n, t)
    if abs(float(np.linalg.norm(a)) - 1.0) > t.spin:
        raise ValueError("sharp spin measurements require a unit direction")
    p = spin_povm_from_bloch(a, t)
    return Pvm(p.space, p.effects, t)


def _require_spin_povm(p: Povm, tol: Tolerances) -> None:
    if p.dim != 2 or len(p.space) != 2:
        raise ValueError("spin measurements have two outcomes on a qubit")
    total_dev = operator_norm(p.total() - np.eye(2), tol)
    if total_dev > tol.spin:
        raise ValueError(f"effects do not sum to I: deviation {total_dev:.3e}")
    for e in p.effects:
        tr = complex(np.trace(e)).real
        if abs(tr - 1.0) > tol.spin:
            raise ValueError(f"spin effects must have unit trace, got {tr!r}")
        lo = min_eigenvalue(e, tol)
        if lo < -tol.psd:
            raise ValueError(f"effect is not positive: min eigenvalue {lo:.3e}")


def classify_spin_povm(p: Povm, tol: Tolerances | None = None) -> np.ndarray:
    """Ball point of a spin POVM: x_i = trace(A^+ sigma_i).

    The first outcome is taken as the "+" effect. Inverse of
    spin_povm_from_bloch on valid spin measurements.
    """
    t = resolve(tol)
    _require_spin_povm(p, t)
    plus = p.effects[0]
    x = np.array([complex(np.trace(plus @ s)).real for s in PAULI])
    return as_bloch(x, t)


def sharpness(x, tol: Tolerances | None = None) -> tuple[float, float]:
    """(degree of reality, degree of unsharpness) = ((1 + |x|)/2, (1 - |x|)/2)."""
    a = as_bloch(x, tol)
    lam = float(np.linalg.norm(a))
    return (1.0 + lam) / 2.0, (1.0 - lam) / 2.0


class BlochPath:
    """Continuous path hbar -> unit-ball point classifying a spin family.

    Either a closed-form callable or a piecewise-linear table over an hbar
    grid. Sampled values are validated to stay in the closed ball.
    """

    def __init__(self, func: Callable[[float], Sequence[float]] | None = None,
                 table: tuple | None = None, kind: str = "closed_form",
                 tol: Tolerances | None = None):
        if (func is None) == (table is None):
            raise ValueError("provide exactly one of func or table")
        self._tol = resolve(tol)
        self.kind = kind
        self._func = func
        if table is not None:
            hbars, points = table
            h = np.asarray(hbars, dtype=np.float64)
            pts = np.asarray(points, dtype=np.float64)
            if h.ndim != 1 or pts.shape != (len(h), 3) or len(h) < 2:
                raise ValueError("table needs matching hbar grid and 3-vectors")
            order = np.argsort(h)
            h = h[order]
            pts = pts[order]
            if np.any(np.diff(h) <= 0):
                raise ValueError("table hbar grid must be strictly monotone")
            if h[0] <= 0 or h[-1] > 1:
                raise ValueError("table hbar grid must lie in (0, 1]")
            for row in pts:
                as_bloch(row, self._tol)
            self._table = (h, pts)
            self.kind = "table"
        else:
            self._table = None

    @classmethod
    def from_table(cls, hbars, points, tol: Tolerances | None = None) -> "BlochPath":
        return cls(table=(hbars, points), tol=tol)

    @property
    def hbar_range(self) -> tuple[float, float] | None:
        if self._table is None:
            return None
        h, _ = self._table
        return float(h[0]), float(h[-1])

    def __call__(self, hbar: float) -> np.ndarray:
        if self._table is not None:
            h, pts = self._table
            if hbar < h[0] or hbar > h[-1]:
                raise ValueError(
                    f"hbar {hbar!r} outside table range [{h[0]!r}, {h[-1]!r}]"
                )
            out = np.array([np.interp(hbar, h, pts[:, k]) for k in range(3)])
        else:
            out = np.asarray(self._func(hbar), dtype=np.float64)
        return as_bloch(out, self._tol)


def roy_kar_path(n, tol: Tolerances | None = None) -> BlochPath:
    """The path hbar -> (1 - hbar) n for a unit direction n."""
    t = resolve(tol)
    a = as_bloch(n, t)
    if abs(float(np.linalg.norm(a)) - 1.0) > t.spin:
        raise ValueError("direction must be a unit vector")
    return BlochPath(func=lambda h: (1.0 - h) * a, kind="roy_kar", tol=t)


def smearing_matrix(hbar: float, tol: Tolerances | None = None) -> np.ndarray:
    """Symmetric doubly stochastic noise kernel [[1-h/2, h/2], [h/2, 1-h/2]].

    hbar = 0 (the sharp boundary) is accepted for testing limits.
    """
    if not 0.0 <= hbar <= 1.0:
        raise ValueError(f"hbar must lie in [0, 1], got {hbar!r}")
    half = hbar / 2.0
    return measures.as_stochastic(
        [[1.0 - half, half], [half, 1.0 - half]], resolve(tol)
    )


def singlet_correlation(a, b, tol: Tolerances | None = None) -> float:
    """Joint +-1 correlation of two spin measurements on the singlet state.

    E(a, b) = sum over s,t in {+1,-1} of s*t*trace(rho (A_a^s (x) A_b^t)),
    brute-forced over the four joint outcomes; equals -a.b in closed form.
    """
    t = resolve(tol)
    pa = spin_povm_from_bloch(a, t)
    pb = spin_povm_from_bloch(b, t)
    total = 0.0
    for s, ea in zip((+1, -1), pa.effects):
        for u, eb in zip((+1, -1), pb.effects):
            joint = np.kron(ea, eb)
            total += s * u * complex(np.trace(SINGLET_STATE @ joint)).real
    return total


def chsh_value(a, a2, b, b2, tol: Tolerances | None = None) -> float:
    """S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')| on the singlet."""
    t = resolve(tol)
    return abs(
        singlet_correlation(a, b, t)
        - singlet_correlation(a, b2, t)
        + singlet_correlation(a2, b, t)
        + singlet_correlation(a2, b2, t)
    )


def chsh_optimal_settings(scale: float = 1.0):
    """The optimal directions (a, a', b, b') = (z, x, (z+x)/sqrt2, (x-z)/sqrt2).

    Each is multiplied by ``scale`` to model uniformly unsharp settings;
    chsh_value on the result is 2 sqrt(2) scale^2.
    """
    z = np.array([0.0, 0.0, 1.0])
    x = np.array([1.0, 0.0, 0.0])
    s = float(scale)
    return (
        s * z,
        s * x,
        s * (z + x) / math.sqrt(2.0),
        s * (x - z) / math.sqrt(2.0),
    )


def bell_threshold_constant() -> float:
    """The noise level 1 - sqrt(2) (sqrt(2) - 1)^(1/2) quoted for Bell violation."""
    return 1.0 - math.sqrt(2.0) * math.sqrt(math.sqrt(2.0) - 1.0)
