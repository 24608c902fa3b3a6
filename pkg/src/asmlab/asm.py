"""hbar-parameterized families of POVMs and their limit diagnostics.

An asymptotic spectral measure is a continuous family {A_h} of POVMs whose
projectivity defect ||A_h(S & S') - A_h(S) A_h(S')|| vanishes as h -> 0.
Genuine limits are undecidable from finitely many samples, so checks run on
a finite decreasing hbar net and certify a documented proxy: the defect tail
must be nonincreasing (within slack) and end below a floor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from asmlab import measures, spin
from asmlab.config import Tolerances, resolve
from asmlab.linalg import min_eigenvalue, operator_norm
from asmlab.measures import Povm, Pvm, SampleSpace

__all__ = [
    "AsmFamily",
    "AsmReport",
    "EquivalenceReport",
    "HbarNet",
    "PassRule",
    "check_asm",
    "check_equivalent",
    "check_sets",
    "constant_family_from_pvm",
    "equivalence_defect",
    "quasiprojectivity_defect",
    "set_label",
]


@dataclass(frozen=True)
class HbarNet:
    """Strictly decreasing finite sample of (0, 1], standing in for h -> 0."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ValueError("net must not be empty")
        if vals[0] > 1.0 or vals[-1] <= 0.0:
            raise ValueError("net values must lie in (0, 1]")
        if any(b >= a for a, b in zip(vals, vals[1:])):
            raise ValueError("net must be strictly decreasing")

    @classmethod
    def geometric(cls, start: float = 1.0, ratio: float = 0.75,
                  count: int = 40) -> "HbarNet":
        if not 0.0 < start <= 1.0:
            raise ValueError(f"start must lie in (0, 1], got {start!r}")
        if not 0.0 < ratio < 1.0:
            raise ValueError(f"ratio must lie in (0, 1), got {ratio!r}")
        if count < 1:
            raise ValueError(f"count must be >= 1, got {count!r}")
        return cls(tuple(start * ratio**k for k in range(count)))

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)


class AsmFamily:
    """Generator hbar -> Povm on a fixed sample space and dimension.

    ``kind`` tags the construction (constant, roy_kar, smeared,
    bloch_path_table, tabulated). Every evaluation is validated: matching
    space and dimension, positive effects. An optional ``carrier`` restricts
    which measurable sets the limit checks quantify over; by default all
    checks use the full power-set collection of :func:`check_sets`.
    """

    def __init__(self, space: SampleSpace, dim: int,
                 generator: Callable[[float], Povm], kind: str,
                 hbar_range: tuple[float, float] | None = None,
                 carrier: tuple | None = None,
                 tol: Tolerances | None = None):
        self.space = space
        self.dim = int(dim)
        self.kind = kind
        self.hbar_range = hbar_range
        self.carrier = carrier
        self._generator = generator
        self._tol = resolve(tol)
        self._cache: tuple[float, Povm] | None = None

    def __repr__(self) -> str:
        return (
            f"AsmFamily(kind={self.kind!r}, dim={self.dim}, "
            f"outcomes={list(self.space.points)})"
        )

    def evaluate(self, hbar: float) -> Povm:
        h = float(hbar)
        if not 0.0 < h <= 1.0:
            raise ValueError(f"hbar must lie in (0, 1], got {hbar!r}")
        if self.hbar_range is not None:
            lo, hi = self.hbar_range
            if h < lo or h > hi:
                raise ValueError(
                    f"hbar {hbar!r} outside tabulated range [{lo!r}, {hi!r}]"
                )
        if self._cache is not None and self._cache[0] == h:
            return self._cache[1]
        p = self._generator(h)
        if p.space is not self.space and p.space != self.space:
            raise ValueError("family generator changed the sample space")
        if p.dim != self.dim:
            raise ValueError("family generator changed the dimension")
        for e in p.effects:
            lo = min_eigenvalue(e, self._tol)
            if lo < -self._tol.psd:
                raise ValueError(
                    f"family is not a POVM at hbar={h!r}: min eigenvalue {lo:.3e}"
                )
        self._cache = (h, p)
        return p

    @classmethod
    def constant(cls, p: Povm, kind: str = "constant",
                 tol: Tolerances | None = None) -> "AsmFamily":
        return cls(p.space, p.dim, lambda h: p, kind, tol=tol)

    @classmethod
    def from_path(cls, path: "spin.BlochPath", kind: str | None = None,
                  tol: Tolerances | None = None) -> "AsmFamily":
        """Spin family A_h^+- = (I +- path(h).sigma)/2 from a ball path."""
        t = resolve(tol)
        k = kind if kind is not None else (
            "bloch_path_table" if path.kind == "table" else path.kind
        )
        return cls(
            spin.SPIN_SPACE,
            2,
            lambda h: spin.spin_povm_from_bloch(path(h), t),
            k,
            hbar_range=path.hbar_range,
            tol=t,
        )

    @classmethod
    def roy_kar(cls, n, tol: Tolerances | None = None) -> "AsmFamily":
        """The family (I +- (1-h) n.sigma)/2 along a unit direction."""
        return cls.from_path(spin.roy_kar_path(n, tol), kind="roy_kar", tol=tol)

    @classmethod
    def smeared_spin(cls, n, tol: Tolerances | None = None) -> "AsmFamily":
        """Sharp spin measurement post-processed by the symmetric noise kernel.

        Coincides pointwise with the roy_kar family; constructed through
        measures.smear rather than in closed form.
        """
        t = resolve(tol)
        sharp = spin.sharp_spin_pvm(n, t)
        return cls(
            sharp.space,
            sharp.dim,
            lambda h: measures.smear(sharp, spin.smearing_matrix(h, t), t),
            "smeared",
            tol=t,
        )

    @classmethod
    def tabulated(cls, hbars: Sequence[float], povms: Sequence[Povm],
                  tol: Tolerances | None = None) -> "AsmFamily":
        """Piecewise-linear interpolation of effects over an hbar grid.

        Convex combinations of PSD effects stay PSD, so interpolants are
        valid POVMs; evaluation at a node returns the stored instance.
        """
        t = resolve(tol)
        h = np.asarray([float(x) for x in hbars], dtype=np.float64)
        povms = list(povms)
        if h.ndim != 1 or len(h) != len(povms) or len(h) < 2:
            raise ValueError("need matching hbar grid and POVM table (>= 2 nodes)")
        order = np.argsort(h)
        h = h[order]
        povms = [povms[i] for i in order]
        if np.any(np.diff(h) <= 0):
            raise ValueError("table hbar grid must be strictly increasing")
        if h[0] <= 0.0 or h[-1] > 1.0:
            raise ValueError("table hbar grid must lie in (0, 1]")
        space = povms[0].space
        dim = povms[0].dim
        for p in povms:
            if p.space != space or p.dim != dim:
                raise ValueError("table POVMs must share sample space and dimension")
        stacks = [np.stack(p.effects) for p in povms]

        def generator(x: float) -> Povm:
            j = int(np.searchsorted(h, x))
            if j < len(h) and h[j] == x:
                return povms[j]
            lo, hi = j - 1, j
            u = (x - h[lo]) / (h[hi] - h[lo])
            blend = (1.0 - u) * stacks[lo] + u * stacks[hi]
            return Povm(space, list(blend), t)

        return cls(space, dim, generator, "tabulated",
                   hbar_range=(float(h[0]), float(h[-1])), tol=t)


def constant_family_from_pvm(p: Pvm, tol: Tolerances | None = None) -> AsmFamily:
    """Embed a PVM as the constant family; rejects non-projective input."""
    t = resolve(tol)
    if not isinstance(p, Pvm):
        if not measures.is_projective(p, tolerances=t):
            raise ValueError("constant spectral families require a projective measure")
        p = Pvm(p.space, p.effects, t)
    return AsmFamily.constant(p, tol=t)


def set_label(subset: Iterable) -> str:
    """Canonical text form of a subset of outcome labels, e.g. ``{+1/2,-1/2}``."""
    return "{" + ",".join(str(x) for x in subset) + "}"


def check_sets(space: SampleSpace, carrier: tuple | None = None) -> tuple:
    """Collection of subsets the limit checks quantify over.

    The full power set for up to four outcomes; for larger spaces the
    singleton-generated collection (singletons, their cumulative unions and
    the empty set), which suffices by finite additivity.
    """
    if carrier is not None:
        return tuple(tuple(s) for s in carrier)
    pts = space.points
    n = len(pts)
    if n <= 4:
        return tuple(
            tuple(pts[i] for i in range(n) if mask >> i & 1)
            for mask in range(2**n)
        )
    sets: list[tuple] = [()]
    sets.extend((x,) for x in pts)
    sets.extend(tuple(pts[: k + 1]) for k in range(1, n))
    return tuple(sets)


@dataclass(frozen=True)
class PassRule:
    """Numerical proxy for a vanishing-limit verdict on a decreasing net.

    The tail of the per-hbar worst defects (at the ``tail_len`` smallest net
    points) must be nonincreasing within a relative ``slack``, the final
    defect must fall below ``defect_floor``, and ||A_h(X)|| must stay within
    ``bound_tol`` of 1 on the tail. Defects below ``noise_floor`` are treated
    as zero so exactly-projective families are not tripped up by fp jitter.
    """

    tail_len: int = 5
    slack: float = 0.10
    defect_floor: float = 0.05
    noise_floor: float = 1e-12
    bound_tol: float = 1e-8

    def tail_ok(self, per_hbar: Sequence[float]) -> tuple[bool, str | None]:
        tail = list(per_hbar[-self.tail_len:])
        flat = [max(d, self.noise_floor) for d in tail]
        for a, b in zip(flat, flat[1:]):
            if b > a * (1.0 + self.slack):
                return False, f"defect tail not nonincreasing: {a:.3e} -> {b:.3e}"
        if tail[-1] > self.defect_floor:
            return False, (
                f"final defect {tail[-1]:.3e} above floor {self.defect_floor:.3e}"
            )
        return True, None

    def to_json(self) -> dict:
        return {
            "tail_len": self.tail_len,
            "slack": self.slack,
            "defect_floor": self.defect_floor,
            "noise_floor": self.noise_floor,
            "bound_tol": self.bound_tol,
        }


@dataclass
class SweepRow:
    hbar: float
    set_pair: str
    defect: float
    norm_ax: float


@dataclass
class AsmReport:
    """Outcome of a family check on a net: verdict, rows, worst margins."""

    passed: bool
    kind: str
    net: tuple
    rule: PassRule
    rows: list = field(default_factory=list)
    per_hbar_max_defect: tuple = ()
    per_hbar_norm_ax: tuple = ()
    per_hbar_min_effect_eig: tuple = ()
    worst_pair: str = ""
    final_defect: float = 0.0
    failures: tuple = ()

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "kind": self.kind,
            "rule": self.rule.to_json(),
            "net": {"count": len(self.net), "min": self.net[-1], "max": self.net[0]},
            "per_hbar_max_defect": list(self.per_hbar_max_defect),
            "per_hbar_norm_ax": list(self.per_hbar_norm_ax),
            "worst_pair": self.worst_pair,
            "final_defect": self.final_defect,
            "failures": list(self.failures),
        }


def quasiprojectivity_defect(family: AsmFamily, hbar: float,
                             set1: Iterable, set2: Iterable,
                             tol: Tolerances | None = None) -> float:
    """||A_h(S & S') - A_h(S) A_h(S')|| at one net point."""
    p = family.evaluate(hbar)
    return measures.projectivity_defect(p, set1, set2, resolve(tol))


def _pair_defects(p: Povm, sets: tuple, tol: Tolerances) -> list[tuple[str, float]]:
    out = []
    for i, s1 in enumerate(sets):
        for s2 in sets[i:]:
            label = set_label(s1) + "|" + set_label(s2)
            out.append((label, measures.projectivity_defect(p, s1, s2, tol)))
    out.sort(key=lambda kv: kv[0])
    return out


def check_asm(family: AsmFamily, net: HbarNet | None = None,
              rule: PassRule | None = None,
              tol: Tolerances | None = None) -> AsmReport:
    """Certify the measure-family axioms on a net.

    Per net point: POVM validity (min effect eigenvalue), ||A_h(X)||, and the
    worst projectivity defect over the set collection. The verdict combines
    the PassRule tail test with the boundedness margin. Repeated evaluations
    returning the same Povm instance (constant families) are computed once.
    """
    t = resolve(tol)
    net = net if net is not None else HbarNet.geometric()
    rule = rule if rule is not None else PassRule()
    sets = check_sets(family.space, family.carrier)

    report = AsmReport(passed=False, kind=family.kind, net=tuple(net), rule=rule)
    failures: list[str] = []
    max_defects: list[float] = []
    norms: list[float] = []
    min_eigs: list[float] = []
    cache: dict[int, tuple] = {}
    keep_alive: list[Povm] = []

    for h in net:
        try:
            p = family.evaluate(h)
        except ValueError as e:
            failures.append(f"evaluation failed at hbar={h!r}: {e}")
            break
        key = id(p)
        if key not in cache:
            keep_alive.append(p)
            defects = _pair_defects(p, sets, t)
            worst_label, worst = max(defects, key=lambda kv: kv[1])
            cache[key] = (
                defects,
                worst_label,
                worst,
                operator_norm(p.total(), t),
                min(min_eigenvalue(e, t) for e in p.effects),
            )
        defects, worst_label, worst, norm_ax, min_eig = cache[key]
        for label, d in defects:
            report.rows.append(SweepRow(h, label, d, norm_ax))
        max_defects.append(worst)
        norms.append(norm_ax)
        min_eigs.append(min_eig)
        if worst == max(max_defects):
            report.worst_pair = worst_label

    if len(max_defects) == len(net):
        ok, reason = rule.tail_ok(max_defects)
        if not ok:
            failures.append(reason)
        tail_norms = norms[-rule.tail_len:]
        if max(tail_norms) > 1.0 + rule.bound_tol:
            failures.append(
                f"boundedness violated: ||A_h(X)|| reaches {max(tail_norms):.6f} on the tail"
            )
        report.final_defect = max_defects[-1]

    report.per_hbar_max_defect = tuple(max_defects)
    report.per_hbar_norm_ax = tuple(norms)
    report.per_hbar_min_effect_eig = tuple(min_eigs)
    report.failures = tuple(failures)
    report.passed = not failures
    return report


def equivalence_defect(fam_a: AsmFamily, fam_b: AsmFamily, hbar: float,
                       subset: Iterable, tol: Tolerances | None = None) -> float:
    """||A_h(S) - B_h(S)|| at one net point."""
    t = resolve(tol)
    if fam_a.space != fam_b.space or fam_a.dim != fam_b.dim:
        raise ValueError("families live on different spaces")
    s = tuple(subset)
    return operator_norm(
        fam_a.evaluate(hbar).measure_of(s) - fam_b.evaluate(hbar).measure_of(s), t
    )


@dataclass
class EquivalenceReport:
    passed: bool
    net: tuple
    rule: PassRule
    rows: list = field(default_factory=list)
    per_hbar_max_distance: tuple = ()
    final_distance: float = 0.0
    failures: tuple = ()

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "rule": self.rule.to_json(),
            "net": {"count": len(self.net), "min": self.net[-1], "max": self.net[0]},
            "per_hbar_max_distance": list(self.per_hbar_max_distance),
            "final_distance": self.final_distance,
            "failures": list(self.failures),
        }


def check_equivalent(fam_a: AsmFamily, fam_b: AsmFamily,
                     net: HbarNet | None = None, rule: PassRule | None = None,
                     tol: Tolerances | None = None) -> EquivalenceReport:
    """Judge asymptotic equivalence: per-set distances must vanish on the net."""
    t = resolve(tol)
    if fam_a.space != fam_b.space or fam_a.dim != fam_b.dim:
        raise ValueError("families live on different spaces")
    net = net if net is not None else HbarNet.geometric()
    rule = rule if rule is not None else PassRule()
    sets = check_sets(fam_a.space, fam_a.carrier)

    report = EquivalenceReport(passed=False, net=tuple(net), rule=rule)
    failures: list[str] = []
    per_hbar: list[float] = []
    for h in net:
        pa = fam_a.evaluate(h)
        pb = fam_b.evaluate(h)
        worst = 0.0
        for s in sets:
            d = operator_norm(pa.measure_of(s) - pb.measure_of(s), t)
            report.rows.append(SweepRow(h, set_label(s), d, float("nan")))
            worst = max(worst, d)
        per_hbar.append(worst)

    ok, reason = rule.tail_ok(per_hbar)
    if not ok:
        failures.append(reason)
    report.per_hbar_max_distance = tuple(per_hbar)
    report.final_distance = per_hbar[-1]
    report.failures = tuple(failures)
    report.passed = not failures
    return report
