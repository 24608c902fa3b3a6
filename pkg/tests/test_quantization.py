"""Positive maps from measures, morphism certificates, and the grid example."""
import numpy as np
import pytest

from asmlab import asm, measures, quantization, spin
from asmlab.asm import AsmFamily, HbarNet
from asmlab.linalg import min_eigenvalue, operator_norm
from asmlab.measures import Povm, Pvm, SampleSpace
from asmlab.quantization import (
    GridSpace,
    QuantizationMap,
    default_function_bank,
    gaussian_kernel,
    make_grid_family,
    multiplicativity_defect,
    norm_bound_margin,
    quantize,
    sharp_grid_pvm,
)
from asmlab.spin import SPIN_SPACE
from conftest import random_normalized_povm

Z = np.array([0.0, 0.0, 1.0])

# Regression value: ||A(L) - A(L)^2|| for the left half-grid L of the
# hbar = 0.2 Gaussian-smeared grid family on [0, 1] with 16 nodes, computed
# by the dense LAPACK oracle below.
GRID_DEFECT_H02_N16 = 0.24810774952065323


def grid_defect_oracle(n_nodes: int, hbar: float) -> float:
    """Brute-force route: explicit kernel, dense arithmetic, LAPACK norm."""
    xs = np.linspace(0.0, 1.0, n_nodes)
    sigma = hbar * 1.0
    diff = xs[:, None] - xs[None, :]
    k = np.exp(-(diff**2) / (2 * sigma**2))
    lam = k / k.sum(axis=1, keepdims=True)
    left = np.diag(lam[: n_nodes // 2].sum(axis=0))
    return float(np.linalg.norm(left - left @ left, 2))


class TestQuantize:
    def test_unit_function_gives_identity(self, rng):
        p = random_normalized_povm(rng, 3, 3)
        np.testing.assert_allclose(quantize(p, [1.0] * 3), np.eye(3), atol=1e-12)

    def test_coordinate_on_sharp_spin(self):
        p = Pvm(SPIN_SPACE, [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        np.testing.assert_allclose(
            quantize(p, SPIN_SPACE.values), spin.PAULI[2] / 2, atol=1e-15
        )

    def test_nonnegative_functions_map_to_psd(self, rng):
        p = spin.spin_povm_from_bloch(0.5 * Z)
        for _ in range(20):
            f = rng.uniform(0, 2, size=2)
            assert min_eigenvalue(quantize(p, f)) >= -1e-12

    def test_map_object(self, rng):
        p = random_normalized_povm(rng, 2, 3)
        q = QuantizationMap(p)
        f = rng.normal(size=3)
        np.testing.assert_array_equal(q(f), quantize(p, f))

    def test_bilinearity(self, rng):
        p = random_normalized_povm(rng, 3, 4)
        for _ in range(10):
            f = rng.normal(size=4)
            g = rng.normal(size=4)
            a, b = rng.normal(size=2)
            lhs = quantize(p, a * f + b * g)
            rhs = a * quantize(p, f) + b * quantize(p, g)
            assert operator_norm(lhs - rhs) <= 1e-12

    def test_indicators_separate_measures(self, rng):
        space = SampleSpace(points=("a", "b", "c"))
        for _ in range(10):
            p1 = random_normalized_povm(rng, 3, 3)
            p2 = random_normalized_povm(rng, 3, 3)
            p1 = Povm(space, p1.effects)
            p2 = Povm(space, p2.effects)
            differs = any(
                operator_norm(
                    quantize(p1, [1.0 if x == s else 0.0 for x in space.points])
                    - quantize(p2, [1.0 if x == s else 0.0 for x in space.points])
                ) > 1e-8
                for s in space.points
            )
            assert differs


class TestMultiplicativityDefect:
    def test_constant_pvm_is_homomorphism(self, rng):
        pvm = measures.spectral_measure_of(np.diag([1.0, 2.0, 4.0]))
        fam = asm.constant_family_from_pvm(pvm)
        for _ in range(10):
            f = rng.normal(size=3)
            g = rng.normal(size=3)
            assert multiplicativity_defect(fam, f, g, 0.3) <= 1e-12

    def test_indicator_pair_reduces_to_measure_defect(self):
        fam = AsmFamily.roy_kar(Z)
        chi = [1.0, 0.0]
        d = multiplicativity_defect(fam, chi, chi, 0.1)
        assert d == pytest.approx(0.0475, abs=1e-12)
        assert d == pytest.approx(
            asm.quasiprojectivity_defect(fam, 0.1, ("+1/2",), ("+1/2",)), abs=1e-15
        )

    def test_unit_function_is_neutral(self, rng):
        fam = AsmFamily.roy_kar(Z)
        for _ in range(10):
            g = rng.normal(size=2)
            assert multiplicativity_defect(fam, [1.0, 1.0], g, 0.4) <= 1e-12

    def test_wrong_length_rejected(self):
        fam = AsmFamily.roy_kar(Z)
        with pytest.raises(ValueError):
            multiplicativity_defect(fam, [1.0], [1.0, 0.0], 0.5)

    def test_zero_indicator_defects_iff_projective(self):
        # both directions of the measure <-> homomorphism equivalence, at
        # fixed hbar, over all singleton indicator pairs
        sharp = asm.constant_family_from_pvm(
            Pvm(SPIN_SPACE, [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        )
        unsharp = AsmFamily.roy_kar(Z)
        chis = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
        for fam, projective in ((sharp, True), (unsharp, False)):
            for h in (1.0, 0.5, 0.05):
                worst = max(
                    multiplicativity_defect(fam, f, g, h)
                    for f in chis
                    for g in chis
                )
                assert (worst <= 1e-12) == projective
                assert measures.is_projective(fam.evaluate(h)) == projective


class TestNormBoundMargin:
    def test_unit_function_margin(self, rng):
        p = random_normalized_povm(rng, 3, 3)
        assert norm_bound_margin(p, [1.0] * 3) == pytest.approx(1.0, abs=1e-10)

    def test_zero_function_tight(self, rng):
        p = random_normalized_povm(rng, 2, 2)
        assert norm_bound_margin(p, [0.0, 0.0]) == 0.0

    def test_never_negative(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 5))
            k = int(rng.integers(1, 5))
            p = random_normalized_povm(rng, n, k)
            f = rng.normal(size=k) + 1j * rng.normal(size=k)
            assert norm_bound_margin(p, f) >= -1e-12

    def test_working_bound_without_factor_two(self, rng):
        # tighter bound ||Q(f)|| <= max|f| ||A(X)||; the factor-2 bound
        # then holds a fortiori
        for _ in range(50):
            n = int(rng.integers(2, 5))
            k = int(rng.integers(1, 5))
            p = random_normalized_povm(rng, n, k)
            f = rng.normal(size=k) + 1j * rng.normal(size=k)
            sup = float(np.max(np.abs(f)))
            lhs = operator_norm(quantize(p, f))
            assert lhs <= sup * operator_norm(p.total()) + 1e-12


class TestFunctionBank:
    def test_contents_on_valued_space(self):
        bank = default_function_bank(SPIN_SPACE, seed=0)
        names = [bf.name for bf in bank]
        assert "chi{+1/2}" in names and "one" in names and "coord" in names
        assert sum(name.startswith("rand") for name in names) == 8

    def test_deterministic_under_seed(self):
        b1 = default_function_bank(SPIN_SPACE, seed=3)
        b2 = default_function_bank(SPIN_SPACE, seed=3)
        for f1, f2 in zip(b1, b2):
            assert f1 == f2

    def test_unvalued_space_skips_coordinate(self):
        space = SampleSpace(points=("a", "b"))
        names = [bf.name for bf in default_function_bank(space, seed=0)]
        assert "coord" not in names

    def test_nonnegative_flags(self):
        bank = default_function_bank(SPIN_SPACE, seed=0)
        by_name = {bf.name: bf for bf in bank}
        assert by_name["one"].nonnegative
        assert by_name["chi{+1/2}"].nonnegative
        assert not by_name["coord"].nonnegative  # carries -1/2


class TestMorphismCheck:
    def test_constant_pvm_passes(self):
        pvm = measures.spectral_measure_of(np.diag([1.0, 2.0, 4.0]))
        fam = asm.constant_family_from_pvm(pvm)
        report = quantization.check_positive_asymptotic_morphism(fam)
        assert report.passed
        assert max(report.per_hbar_max_defect) <= 1e-12
        assert report.min_positivity_margin >= -1e-12
        assert report.max_linearity_residual <= 1e-12

    def test_roy_kar_passes(self):
        fam = AsmFamily.roy_kar(Z)
        bank = default_function_bank(fam.space, seed=0)
        report = quantization.check_positive_asymptotic_morphism(fam, bank)
        assert report.passed
        # defects vanish linearly in hbar on the tail; the constant is set
        # by the largest bank values (|Q(fg) - Q(f)Q(g)| ~ 2h |b_f b_g|)
        cap = 2.05 * max(float(np.max(np.abs(bf.array))) for bf in bank) ** 2
        for d, h in zip(report.per_hbar_max_defect[-5:], report.net[-5:]):
            assert d <= cap * h

    def test_roy_kar_indicator_defects_match_measure(self):
        fam = AsmFamily.roy_kar(Z)
        bank = tuple(
            bf for bf in default_function_bank(fam.space, seed=0)
            if bf.name.startswith("chi")
        )
        report = quantization.check_positive_asymptotic_morphism(fam, bank)
        assert report.passed
        for d, h in zip(report.per_hbar_max_defect, report.net):
            assert d == pytest.approx(h / 2 * (1 - h / 2), abs=1e-12)

    def test_constant_unsharp_fails(self):
        fam = AsmFamily.constant(spin.spin_povm_from_bloch(0.5 * Z))
        report = quantization.check_positive_asymptotic_morphism(fam)
        assert not report.passed
        assert report.final_defect > 0.05
        # on the indicator sub-bank the defect is exactly the measure defect
        bank = tuple(
            bf for bf in default_function_bank(fam.space, seed=0)
            if bf.name.startswith("chi")
        )
        indicator_report = quantization.check_positive_asymptotic_morphism(fam, bank)
        assert not indicator_report.passed
        assert indicator_report.final_defect == pytest.approx(0.1875, abs=1e-12)

    def test_report_json(self):
        fam = AsmFamily.roy_kar(Z)
        doc = quantization.check_positive_asymptotic_morphism(fam).to_json()
        assert doc["verdict"] == "PASS"
        assert doc["max_linearity_residual"] <= 1e-12


class TestGridSpace:
    def test_nodes(self):
        g = GridSpace(0.0, 1.0, 5)
        np.testing.assert_allclose(g.nodes, [0, 0.25, 0.5, 0.75, 1.0], atol=0)
        assert g.space.values == (0.0, 0.25, 0.5, 0.75, 1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            GridSpace(1.0, 0.0, 4)
        with pytest.raises(ValueError):
            GridSpace(0.0, 1.0, 1)

    def test_sharp_pvm_is_projective(self):
        pvm = sharp_grid_pvm(GridSpace(0.0, 1.0, 4))
        assert measures.is_projective(pvm)
        np.testing.assert_allclose(pvm.total(), np.eye(4), atol=0)


class TestGaussianKernel:
    def test_rows_sum_to_one(self):
        lam = gaussian_kernel(GridSpace(0.0, 1.0, 8), 0.3)
        np.testing.assert_allclose(lam.sum(axis=1), np.ones(8), atol=1e-12)
        assert np.all(lam >= 0)

    def test_tiny_width_degenerates_to_identity(self):
        lam = gaussian_kernel(GridSpace(0.0, 1.0, 8), 1e-6)
        np.testing.assert_array_equal(lam, np.eye(8))

    def test_zero_width_is_identity(self):
        np.testing.assert_array_equal(
            gaussian_kernel(GridSpace(0.0, 1.0, 8), 0.0), np.eye(8)
        )


class TestGridFamily:
    def test_tiny_hbar_recovers_sharp_pvm(self):
        grid = GridSpace(0.0, 1.0, 8)
        fam = make_grid_family(grid)
        p = fam.evaluate(1e-6)
        sharp = sharp_grid_pvm(grid)
        for a, b in zip(p.effects, sharp.effects):
            np.testing.assert_array_equal(a, b)

    def test_frozen_regression_value(self):
        grid = GridSpace(0.0, 1.0, 16)
        fam = make_grid_family(grid)
        left = tuple(grid.space.points[:8])
        d = asm.quasiprojectivity_defect(fam, 0.2, left, left)
        oracle = grid_defect_oracle(16, 0.2)
        assert oracle == pytest.approx(GRID_DEFECT_H02_N16, abs=1e-15)
        assert d == pytest.approx(oracle, abs=1e-11)

    def test_two_node_grid_reduces_to_two_outcome_smearing(self):
        grid = GridSpace(0.0, 1.0, 2)
        fam = make_grid_family(grid)
        h = 0.35
        # closed-form 2x2 kernel weight
        w = np.exp(-1.0 / (2 * h * h))
        lam = np.array([[1.0, w], [w, 1.0]]) / (1.0 + w)
        sharp = sharp_grid_pvm(grid)
        expected = measures.smear(sharp, lam)
        got = fam.evaluate(h)
        for a, b in zip(got.effects, expected.effects):
            assert np.max(np.abs(a - b)) <= 1e-15

    def test_asm_check_passes(self):
        fam = make_grid_family(GridSpace(0.0, 1.0, 8))
        report = asm.check_asm(fam)
        assert report.passed

    def test_morphism_check_passes(self):
        fam = make_grid_family(GridSpace(0.0, 1.0, 8))
        report = quantization.check_positive_asymptotic_morphism(fam)
        assert report.passed

    def test_callable_source(self):
        grid = GridSpace(0.0, 1.0, 4)
        sharp = sharp_grid_pvm(grid)
        fam = make_grid_family(grid, source=lambda h: sharp)
        assert fam.evaluate(0.5) is sharp

    def test_tabulated_source(self):
        grid = GridSpace(0.0, 1.0, 4)
        sharp = sharp_grid_pvm(grid)
        blurred = measures.smear(sharp, gaussian_kernel(grid, 0.4))
        fam = make_grid_family(grid, source=([0.25, 1.0], [sharp, blurred]))
        assert fam.kind == "tabulated"
        assert fam.evaluate(0.25) is sharp
