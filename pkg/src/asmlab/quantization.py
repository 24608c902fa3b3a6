"""Positive linear maps from measures: Q(f) = integral of f against a POVM.

On a finite (or grid-discretized) sample space the correspondence between
POVMs and positive linear maps is Q(f) = sum_x f(x) A({x}); Q is a
*-homomorphism exactly when the measure is projective, and for hbar-families
the multiplicativity defect ||Q_h(fg) - Q_h(f) Q_h(g)|| mirrors the measure's
quasiprojectivity defect. This module certifies the positive-asymptotic-
morphism axioms on nets and ships a grid example: a sharp grid PVM smeared
by an hbar-width Gaussian kernel.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from asmlab import measures
from asmlab.asm import AsmFamily, HbarNet, PassRule, SweepRow
from asmlab.config import Tolerances, resolve
from asmlab.linalg import min_eigenvalue, operator_norm
from asmlab.measures import Povm, Pvm, SampleSpace

__all__ = [
    "BankFunction",
    "GridSpace",
    "MorphismReport",
    "QuantizationMap",
    "check_positive_asymptotic_morphism",
    "default_function_bank",
    "gaussian_kernel",
    "make_grid_family",
    "multiplicativity_defect",
    "norm_bound_margin",
    "quantize",
    "sharp_grid_pvm",
]


@dataclass(frozen=True)
class GridSpace:
    """Uniform grid on [a, b] inducing a valued sample space."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got [{self.a!r}, {self.b!r}]")
        if self.n < 2:
            raise ValueError(f"need at least 2 nodes, got {self.n!r}")

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n)

    @property
    def space(self) -> SampleSpace:
        xs = tuple(float(x) for x in self.nodes)
        return SampleSpace(points=xs, values=xs)


class QuantizationMap:
    """The positive linear map f -> sum_x f(x) A({x}) of a measure."""

    def __init__(self, povm: Povm):
        self.povm = povm

    def __call__(self, f) -> np.ndarray:
        return measures.integrate(self.povm, f)


def quantize(p: Povm, f) -> np.ndarray:
    """Q(f), Hermitian for real f and positive for f >= 0."""
    return measures.integrate(p, f)


def multiplicativity_defect(family: AsmFamily, f, g, hbar: float,
                            tol: Tolerances | None = None) -> float:
    """||Q_h(fg) - Q_h(f) Q_h(g)|| at one net point."""
    t = resolve(tol)
    p = family.evaluate(hbar)
    fv = np.asarray([f(x) for x in p.labels] if callable(f) else list(f),
                    dtype=np.complex128)
    gv = np.asarray([g(x) for x in p.labels] if callable(g) else list(g),
                    dtype=np.complex128)
    if fv.shape != (len(p.space),) or gv.shape != (len(p.space),):
        raise ValueError("functions must be sampled on the family's sample space")
    qf = quantize(p, fv)
    qg = quantize(p, gv)
    qfg = quantize(p, fv * gv)
    return operator_norm(qfg - qf @ qg, t)


def norm_bound_margin(p: Povm, f, tol: Tolerances | None = None) -> float:
    """Slack in the bound ||Q(f)|| <= 2 max|f| ||A(X)||; nonnegative for valid input."""
    t = resolve(tol)
    fv = np.asarray([f(x) for x in p.labels] if callable(f) else list(f),
                    dtype=np.complex128)
    sup = float(np.max(np.abs(fv))) if fv.size else 0.0
    return 2.0 * sup * operator_norm(p.total(), t) - operator_norm(quantize(p, fv), t)


@dataclass(frozen=True)
class BankFunction:
    """Named sampled function; ``nonnegative`` marks it for positivity checks."""

    name: str
    values: tuple

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.complex128)

    @property
    def nonnegative(self) -> bool:
        a = self.array
        return bool(np.all(np.abs(a.imag) == 0.0) and np.all(a.real >= 0.0))


def default_function_bank(space: SampleSpace, seed: int = 0,
                          n_random: int = 8) -> tuple:
    """Singleton indicators, the constant 1, the coordinate (when valued),
    and seeded random samples.

    Indicators tie the morphism view back to the measure view exactly; the
    random entries probe generic products. On valued spaces the random
    samples are low-order trigonometric polynomials of the coordinate
    (smooth in the grid sense); otherwise plain random values.
    """
    n = len(space)
    bank = []
    for i, label in enumerate(space.points):
        vals = [0.0] * n
        vals[i] = 1.0
        bank.append(BankFunction(f"chi{{{label}}}", tuple(vals)))
    bank.append(BankFunction("one", tuple([1.0] * n)))
    rng = np.random.default_rng(seed)
    if space.values is not None:
        xs = np.asarray(space.values, dtype=np.float64)
        bank.append(BankFunction("coord", tuple(float(x) for x in xs)))
        span = float(xs.max() - xs.min()) or 1.0
        u = (xs - xs.min()) / span
        for k in range(n_random):
            coef = rng.uniform(-1.0, 1.0, size=6)
            vals = (
                coef[0]
                + coef[1] * np.cos(np.pi * u) + coef[2] * np.sin(np.pi * u)
                + coef[3] * np.cos(2 * np.pi * u) + coef[4] * np.sin(2 * np.pi * u)
                + coef[5] * np.cos(3 * np.pi * u)
            )
            bank.append(BankFunction(f"rand{k}", tuple(float(v) for v in vals)))
    else:
        for k in range(n_random):
            vals = rng.uniform(-1.0, 1.0, size=n)
            bank.append(BankFunction(f"rand{k}", tuple(float(v) for v in vals)))
    return tuple(bank)


@dataclass
class MorphismReport:
    """Morphism-side certificate: positivity, linearity, multiplicativity, bounds."""

    passed: bool
    kind: str
    net: tuple
    rule: PassRule
    rows: list = field(default_factory=list)
    per_hbar_max_defect: tuple = ()
    per_hbar_norm_ax: tuple = ()
    worst_pair: str = ""
    final_defect: float = 0.0
    min_positivity_margin: float = 0.0
    max_linearity_residual: float = 0.0
    max_bound_excess: float = 0.0
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
            "min_positivity_margin": self.min_positivity_margin,
            "max_linearity_residual": self.max_linearity_residual,
            "max_bound_excess": self.max_bound_excess,
            "failures": list(self.failures),
        }


def check_positive_asymptotic_morphism(
        family: AsmFamily, bank: Sequence[BankFunction] | None = None,
        net: HbarNet | None = None, rule: PassRule | None = None,
        seed: int = 0, tol: Tolerances | None = None) -> MorphismReport:
    """Certify the positive-asymptotic-morphism axioms of Q_h on a net.

    Per net point: positivity margins of Q_h(f) for the bank's nonnegative
    functions, linearity residuals on seeded random combinations, and
    multiplicativity defects over all bank pairs. On the net tail the
    working bound ||Q_h(f)|| <= max|f| + bound_tol is enforced. The verdict
    applies the PassRule tail test to the worst multiplicativity defects.
    """
    t = resolve(tol)
    net = net if net is not None else HbarNet.geometric()
    rule = rule if rule is not None else PassRule()
    bank = tuple(bank) if bank is not None else default_function_bank(family.space, seed)
    rng = np.random.default_rng(seed)

    report = MorphismReport(passed=False, kind=family.kind, net=tuple(net), rule=rule)
    failures: list[str] = []
    max_defects: list[float] = []
    norms: list[float] = []
    min_margin = np.inf
    max_linres = 0.0
    max_bound_excess = -np.inf
    tail_start = len(net) - rule.tail_len
    cache: dict[int, tuple] = {}
    keep_alive: list[Povm] = []

    for step, h in enumerate(net):
        try:
            p = family.evaluate(h)
        except ValueError as e:
            failures.append(f"evaluation failed at hbar={h!r}: {e}")
            break
        key = id(p)
        if key not in cache:
            keep_alive.append(p)
            q = {bf.name: quantize(p, bf.array) for bf in bank}
            defects = []
            for i, bf in enumerate(bank):
                for bg in bank[i:]:
                    prod = bf.array * bg.array
                    d = operator_norm(quantize(p, prod) - q[bf.name] @ q[bg.name], t)
                    defects.append((f"{bf.name}|{bg.name}", d))
            defects.sort(key=lambda kv: kv[0])
            worst_label, worst = max(defects, key=lambda kv: kv[1])
            margin = min(
                (min_eigenvalue(q[bf.name], t) for bf in bank if bf.nonnegative),
                default=np.inf,
            )
            bound_excess = max(
                operator_norm(q[bf.name], t) - float(np.max(np.abs(bf.array)))
                for bf in bank
            )
            cache[key] = (defects, worst_label, worst,
                          operator_norm(p.total(), t), margin, bound_excess, p)
        defects, worst_label, worst, norm_ax, margin, bound_excess, p = cache[key]
        for label, d in defects:
            report.rows.append(SweepRow(h, label, d, norm_ax))
        max_defects.append(worst)
        norms.append(norm_ax)
        if worst == max(max_defects):
            report.worst_pair = worst_label
        min_margin = min(min_margin, margin)

        # Linearity is structural; spot-check with random combinations.
        for _ in range(2):
            bf, bg = rng.choice(len(bank), size=2, replace=True)
            alpha, beta = rng.uniform(-2.0, 2.0, size=2)
            fa = bank[bf].array
            ga = bank[bg].array
            res = operator_norm(
                quantize(p, alpha * fa + beta * ga)
                - alpha * quantize(p, fa) - beta * quantize(p, ga),
                t,
            )
            max_linres = max(max_linres, res)

        if step >= tail_start:
            max_bound_excess = max(max_bound_excess, bound_excess)

    if len(max_defects) == len(net):
        ok, reason = rule.tail_ok(max_defects)
        if not ok:
            failures.append(reason)
        if min_margin < -t.psd:
            failures.append(f"positivity violated: margin {min_margin:.3e}")
        if max_linres > 1e-12:
            failures.append(f"linearity residual {max_linres:.3e} above 1e-12")
        if max_bound_excess > rule.bound_tol:
            failures.append(
                f"norm bound violated on tail: ||Q_h(f)|| - max|f| = {max_bound_excess:.3e}"
            )
        report.final_defect = max_defects[-1]

    report.per_hbar_max_defect = tuple(max_defects)
    report.per_hbar_norm_ax = tuple(norms)
    report.min_positivity_margin = float(min_margin)
    report.max_linearity_residual = float(max_linres)
    report.max_bound_excess = float(max_bound_excess)
    report.failures = tuple(failures)
    report.passed = not failures
    return report


def sharp_grid_pvm(grid: GridSpace, tol: Tolerances | None = None) -> Pvm:
    """Position PVM of the grid: one standard-basis projection per node."""
    t = resolve(tol)
    space = grid.space
    n = grid.n
    effects = []
    for i in range(n):
        e = np.zeros((n, n), dtype=np.complex128)
        e[i, i] = 1.0
        effects.append(e)
    return Pvm(space, effects, t)


def gaussian_kernel(grid: GridSpace, width: float) -> np.ndarray:
    """Row-normalized discrete Gaussian on the grid nodes.

    Rows index the smeared outcomes; truncation at the interval ends is
    absorbed by the row normalization. width <= 0 or an underflowed kernel
    degenerates to the identity.
    """
    xs = grid.nodes
    if width <= 0.0:
        return np.eye(grid.n)
    diff = xs[:, None] - xs[None, :]
    k = np.exp(-(diff**2) / (2.0 * width * width))
    rows = k.sum(axis=1)
    return k / rows[:, None]


def make_grid_family(grid: GridSpace, source="gaussian",
                     tol: Tolerances | None = None) -> AsmFamily:
    """Grid-valued family from a closed form or tabulated data.

    ``source`` may be "gaussian" (the built-in example: the sharp grid PVM
    smeared by a Gaussian kernel of width hbar*(b - a)), a callable
    hbar -> Povm on the grid space, or a (hbars, povms) table.
    """
    t = resolve(tol)
    space = grid.space
    if source == "gaussian":
        sharp = sharp_grid_pvm(grid, t)
        span = grid.b - grid.a

        def generator(h: float) -> Povm:
            return measures.smear(sharp, gaussian_kernel(grid, h * span), t)

        return AsmFamily(space, grid.n, generator, "smeared", tol=t)
    if callable(source):
        return AsmFamily(space, grid.n, source, "smeared", tol=t)
    hbars, povms = source
    fam = AsmFamily.tabulated(hbars, povms, t)
    if fam.space != space:
        raise ValueError("tabulated POVMs do not live on the grid space")
    return fam
