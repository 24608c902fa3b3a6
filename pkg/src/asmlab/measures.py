"""Finite-outcome operator-valued measures.

A POVM on a finite sample space is a list of positive effects, one per
outcome label; subsets of outcomes get the sum of their effects. PVMs are
the projective special case. This module covers the measure-side toolkit:
axiom validation, Born statistics, operator-valued integration, spectral
measures of observables, stochastic smearing, Naimark dilation and support.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from asmlab import linalg
from asmlab.config import Tolerances, resolve

__all__ = [
    "Povm",
    "Pvm",
    "SampleSpace",
    "as_stochastic",
    "born_probability",
    "expectation",
    "integrate",
    "is_projective",
    "naimark_dilate",
    "projectivity_defect",
    "smear",
    "spectral_measure_of",
    "support",
    "validate_povm",
]


@dataclass(frozen=True)
class SampleSpace:
    """Finite ordered outcome set, optionally carrying real values.

    Labels may be strings or numbers; values (when present) make the space a
    discrete subset of the real line, e.g. spin readings +/- 1/2.
    """

    points: tuple
    values: tuple | None = None

    def __post_init__(self):
        points = tuple(self.points)
        object.__setattr__(self, "points", points)
        if len(set(points)) != len(points):
            raise ValueError("sample space labels must be distinct")
        if not points:
            raise ValueError("sample space must have at least one point")
        if self.values is not None:
            values = tuple(float(v) for v in self.values)
            if len(values) != len(points):
                raise ValueError("one value per point required")
            if not all(np.isfinite(values)):
                raise ValueError("point values must be finite")
            object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.points)

    def index(self, label) -> int:
        try:
            return self.points.index(label)
        except ValueError:
            raise KeyError(f"label {label!r} not in sample space") from None

    def subset_indices(self, subset: Iterable) -> tuple[int, ...]:
        seen = []
        for x in subset:
            i = self.index(x)
            if i not in seen:
                seen.append(i)
        return tuple(seen)

    def require_values(self) -> tuple:
        if self.values is None:
            raise ValueError("sample space carries no point values")
        return self.values


class Povm:
    """Positive operator-valued measure on a finite sample space.

    Construction validates structure (one effect per point, common dimension,
    Hermitian within tolerance) and stores symmetrized read-only effects.
    Positivity and normalization are *reported* by :func:`validate_povm`
    rather than enforced, so defective measures loaded from files can be
    diagnosed instead of rejected outright.
    """

    def __init__(self, space: SampleSpace, effects: Sequence, tol: Tolerances | None = None):
        t = resolve(tol)
        effects = tuple(linalg.as_hermitian(e, t) for e in effects)
        if len(effects) != len(space):
            raise ValueError(
                f"{len(space)} outcomes but {len(effects)} effects supplied"
            )
        dims = {e.shape[0] for e in effects}
        if len(dims) != 1:
            raise ValueError(f"effects have mismatched dimensions {sorted(dims)}")
        for e in effects:
            e.setflags(write=False)
        self.space = space
        self.effects = effects
        self.dim = effects[0].shape[0]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim}, outcomes={list(self.space.points)})"

    @property
    def labels(self) -> tuple:
        return self.space.points

    def effect(self, label) -> np.ndarray:
        return self.effects[self.space.index(label)]

    def measure_of(self, subset: Iterable) -> np.ndarray:
        """A(Delta): sum of effects over a subset of outcome labels."""
        idx = self.space.subset_indices(subset)
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for i in idx:
            out = out + self.effects[i]
        return out

    def total(self) -> np.ndarray:
        """A(X), the measure of the whole space."""
        return self.measure_of(self.space.points)

    def is_normalized(self, tol: Tolerances | None = None) -> bool:
        t = resolve(tol)
        return normalization_residual(self, t) <= t.normalization


class Pvm(Povm):
    """Projection-valued measure: a Povm whose effects are orthogonal projections."""

    def __init__(self, space: SampleSpace, effects: Sequence, tol: Tolerances | None = None):
        super().__init__(space, effects, tol)
        t = resolve(tol)
        residual = projectivity_residual(self, t)
        if residual > t.projectivity:
            raise ValueError(
                f"effects are not projective: worst residual {residual:.3e} "
                f"> {t.projectivity:.1e}"
            )


def normalization_residual(p: Povm, tol: Tolerances | None = None) -> float:
    """||A(X) - I|| in operator norm."""
    t = resolve(tol)
    return linalg.operator_norm(p.total() - np.eye(p.dim), t)


def projectivity_defect(p: Povm, set1: Iterable, set2: Iterable,
                        tol: Tolerances | None = None) -> float:
    """||A(S1 & S2) - A(S1) A(S2)||, the projectivity residual of a set pair."""
    t = resolve(tol)
    s1 = tuple(set1)
    s2 = tuple(set2)
    inter = tuple(x for x in s1 if x in set(s2))
    d = p.measure_of(inter) - p.measure_of(s1) @ p.measure_of(s2)
    return linalg.operator_norm(d, t)


def projectivity_residual(p: Povm, tol: Tolerances | None = None) -> float:
    """Worst projectivity defect over singleton pairs (sufficient by additivity)."""
    t = resolve(tol)
    worst = 0.0
    for a in p.labels:
        for b in p.labels:
            worst = max(worst, projectivity_defect(p, (a,), (b,), t))
    return worst


def is_projective(p: Povm, tol: float | None = None,
                  tolerances: Tolerances | None = None) -> bool:
    """True iff every singleton pair satisfies A(S1 & S2) = A(S1)A(S2) within tol."""
    t = resolve(tolerances)
    bound = t.projectivity if tol is None else float(tol)
    return projectivity_residual(p, t) <= bound


@dataclass(frozen=True)
class PovmValidation:
    """Per-axiom report for a POVM candidate."""

    dim: int
    n_outcomes: int
    effect_min_eigenvalues: tuple
    positivity_ok: bool
    total_norm: float
    normalization_residual: float
    normalized: bool
    projectivity_residual: float
    projective: bool
    spectrum: tuple
    cospectrum: tuple

    @property
    def valid(self) -> bool:
        # Nullity and finite additivity hold structurally; positivity is the
        # one axiom a finite effect list can violate.
        return self.positivity_ok

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "n_outcomes": self.n_outcomes,
            "effect_min_eigenvalues": list(self.effect_min_eigenvalues),
            "positivity_ok": self.positivity_ok,
            "total_norm": self.total_norm,
            "normalization_residual": self.normalization_residual,
            "normalized": self.normalized,
            "projectivity_residual": self.projectivity_residual,
            "projective": self.projective,
            "spectrum": [str(x) for x in self.spectrum],
            "cospectrum": [str(x) for x in self.cospectrum],
            "valid": self.valid,
        }


def validate_povm(p: Povm, tol: Tolerances | None = None) -> PovmValidation:
    """Check the measure axioms and summarize worst margins."""
    t = resolve(tol)
    min_eigs = tuple(linalg.min_eigenvalue(e, t) for e in p.effects)
    residual = normalization_residual(p, t)
    proj_residual = projectivity_residual(p, t)
    spectrum, cospectrum = support(p, tolerances=t)
    return PovmValidation(
        dim=p.dim,
        n_outcomes=len(p.space),
        effect_min_eigenvalues=min_eigs,
        positivity_ok=all(m >= -t.psd for m in min_eigs),
        total_norm=linalg.operator_norm(p.total(), t),
        normalization_residual=residual,
        normalized=residual <= t.normalization,
        projectivity_residual=proj_residual,
        projective=proj_residual <= t.projectivity,
        spectrum=spectrum,
        cospectrum=cospectrum,
    )


def _sampled(p: Povm, f) -> np.ndarray:
    """Evaluate a function spec (callable, mapping, or aligned sequence) on the points."""
    if callable(f):
        vals = [f(x) for x in p.labels]
    elif isinstance(f, Mapping):
        try:
            vals = [f[x] for x in p.labels]
        except KeyError as e:
            raise ValueError(f"function undefined at point {e.args[0]!r}") from None
    else:
        vals = list(f)
        if len(vals) != len(p.space):
            raise ValueError(
                f"expected {len(p.space)} samples, got {len(vals)}"
            )
    return np.asarray(vals, dtype=np.complex128)


def integrate(p: Povm, f) -> np.ndarray:
    """Operator-valued integral of f against the measure: sum_x f(x) A({x}).

    Linear in f, Hermitian for real f; the weak integral collapses to this
    finite sum on a finite sample space.
    """
    vals = _sampled(p, f)
    out = np.zeros((p.dim, p.dim), dtype=np.complex128)
    for c, e in zip(vals, p.effects):
        out = out + c * e
    return out


def born_probability(p: Povm, subset: Iterable, rho: np.ndarray,
                     tol: Tolerances | None = None) -> float:
    """Outcome probability trace(rho A(Delta)) for a normalized measure.

    The raw real part is returned unclamped; callers that want a display
    value may clip to [0, 1].
    """
    t = resolve(tol)
    if not p.is_normalized(t):
        raise ValueError("Born probabilities require a normalized POVM")
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (p.dim, p.dim):
        raise ValueError(f"state has shape {rho.shape}, expected {(p.dim, p.dim)}")
    return complex(np.trace(rho @ p.measure_of(subset))).real


def expectation(p: Povm, rho: np.ndarray, tol: Tolerances | None = None) -> float:
    """Mean reading trace(rho * integral of the point values against the measure)."""
    t = resolve(tol)
    values = p.space.require_values()
    if not p.is_normalized(t):
        raise ValueError("expectations require a normalized POVM")
    rho = np.asarray(rho, dtype=np.complex128)
    return complex(np.trace(rho @ integrate(p, values))).real


def spectral_measure_of(o, tol: Tolerances | None = None) -> Pvm:
    """Spectral measure of a Hermitian observable.

    Eigenvalues closer than cluster_scale * max(1, ||O||) are grouped into a
    single eigenspace, so near-degenerate spectra yield one projection per
    cluster; the sample space carries the clustered eigenvalues as values.
    """
    t = resolve(tol)
    w, v = linalg.hermitian_eig(o, t)
    scale = max(1.0, float(np.max(np.abs(w))) if len(w) else 1.0)
    gap = t.cluster_scale * scale

    clusters: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[clusters[-1][-1]] <= gap:
            clusters[-1].append(i)
        else:
            clusters.append([i])

    points = []
    projections = []
    for idx in clusters:
        lam = float(np.mean(w[idx]))
        cols = v[:, idx]
        points.append(lam)
        projections.append(cols @ linalg.adjoint(cols))
    space = SampleSpace(points=tuple(points), values=tuple(points))
    return Pvm(space, projections, t)


def as_stochastic(m, tol: Tolerances | None = None) -> np.ndarray:
    """Validate a square row-stochastic matrix (nonnegative, rows sum to 1)."""
    t = resolve(tol)
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("stochastic matrix entries must be finite")
    if float(np.min(a)) < -t.stochastic:
        raise ValueError(f"negative entry {float(np.min(a)):.3e} in stochastic matrix")
    rows = np.sum(a, axis=1)
    worst = float(np.max(np.abs(rows - 1.0)))
    if worst > t.stochastic:
        raise ValueError(f"rows must sum to 1: worst deviation {worst:.3e}")
    return a


def smear(p: Povm, lam, tol: Tolerances | None = None) -> Povm:
    """Classical post-processing by a stochastic matrix.

    New effect i is sum_j lam[i, j] * effect_j (rows index the smeared
    outcomes). Positivity is preserved since rows are convex weights; the
    total measure A(X) is preserved exactly when the column sums are also 1
    (doubly stochastic kernels, as in symmetric noise models).
    """
    t = resolve(tol)
    a = as_stochastic(lam, t)
    if a.shape[0] != len(p.space):
        raise ValueError(
            f"stochastic matrix is {a.shape[0]}x{a.shape[0]} but measure has "
            f"{len(p.space)} outcomes"
        )
    stacked = np.stack(p.effects)
    new_effects = np.einsum("ij,jkl->ikl", a, stacked)
    return Povm(p.space, list(new_effects), t)


def naimark_dilate(p: Povm, tol: Tolerances | None = None):
    """Dilate a normalized POVM to a PVM on C^(d*n) compressed by an isometry.

    Returns (V, Q): V is the (d*n) x d column stack of the effect square
    roots, an isometry since V^dag V = sum_i E_i = I; Q is the block-diagonal
    selector PVM, whose compressions V^dag Q_i V rebuild the effects.
    """
    t = resolve(tol)
    if not p.is_normalized(t):
        raise ValueError("Naimark dilation requires a normalized POVM")
    d = p.dim
    n = len(p.space)
    blocks = [linalg.psd_sqrt(e, t) for e in p.effects]
    v = np.vstack(blocks)

    projections = []
    for i in range(n):
        q = np.zeros((d * n, d * n), dtype=np.complex128)
        q[i * d:(i + 1) * d, i * d:(i + 1) * d] = np.eye(d)
        projections.append(q)
    q_pvm = Pvm(p.space, projections, t)
    return v, q_pvm


def support(p: Povm, tol: float | None = None,
            tolerances: Tolerances | None = None):
    """(spectrum, cospectrum): labels whose effect norm exceeds the support tolerance, and the rest."""
    t = resolve(tolerances)
    bound = t.support if tol is None else float(tol)
    spectrum = []
    cospectrum = []
    for label, e in zip(p.labels, p.effects):
        if linalg.operator_norm(e, t) > bound:
            spectrum.append(label)
        else:
            cospectrum.append(label)
    return tuple(spectrum), tuple(cospectrum)
