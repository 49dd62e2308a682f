import numpy as np
import pytest

from blochscope.disk import ParameterError
from blochscope.estimators import (
    BoundaryScan,
    ScanSettings,
    VERDICT_COMPACT,
    VERDICT_INCONCLUSIVE,
    VERDICT_NONCOMPACT,
    criteria_compare,
    essential_bounds,
    lower_constant,
    mobius_scan,
    power_criterion_estimate,
    sigma_scan,
    upper_constant,
)
from blochscope.norms import SearchSettings, bloch_norm
from blochscope.symbols import (
    Affine,
    Compose,
    Constant,
    Dilation,
    Identity,
    NotSelfMapError,
    Scale,
)
from blochscope.weights import ScaledWeight, StandardWeight

from conftest import radial_oracle

W1 = StandardWeight(1.0)
LIGHT = ScanSettings(k_min=3, k_max=14, angles=16)
HALF_DILATION = Dilation(0.5, Identity())
HALF_PLANE_AFFINE = Affine(0.5 + 0j, 0.5 + 0j)  # z -> (1 + z) / 2


def expected_identity_tail(k_min, k_max, eps=1e-6):
    # for the identity symbol the composed norm is |a| / (1 + |a|) exactly
    mods = [min(1 - 2.0 ** (-k), 1 - eps) for k in range(k_min, k_max + 1)]
    return [m / (1 + m) for m in mods]


class TestSigmaScan:
    def test_identity_matches_closed_form(self):
        scan = sigma_scan(Identity(), 1.0, W1, LIGHT)
        expected = expected_identity_tail(LIGHT.k_min, LIGHT.k_max)
        assert np.allclose(scan.tail_max, expected, rtol=1e-6)
        assert scan.L_estimate == pytest.approx(expected[-1], rel=1e-6)
        assert scan.converged

    def test_identity_tail_monotone(self):
        st = ScanSettings(
            k_min=3, k_max=14, angles=8,
            search=SearchSettings(rel_tol=1e-10, abs_tol=1e-14),
        )
        scan = sigma_scan(Identity(), 1.0, W1, st)
        tail = scan.tail_max
        assert all(b >= a - 1e-9 for a, b in zip(tail, tail[1:]))

    def test_contraction_scan_small(self):
        scan = sigma_scan(HALF_DILATION, 1.0, W1, ScanSettings(k_min=3, k_max=16, angles=8))
        assert scan.L_estimate < 1e-3

    def test_half_plane_affine_scan_positive(self):
        scan = sigma_scan(HALF_PLANE_AFFINE, 1.0, W1, LIGHT)
        assert scan.L_estimate > 0.05
        assert scan.converged

    def test_seminorm_and_full_close_for_zero_fixing_symbol(self):
        # sigma_a(phi(0)) = sigma_a(0) = 0 whenever phi fixes the origin
        scan = sigma_scan(Identity(), 1.0, W1, LIGHT)
        assert np.allclose(scan.values, scan.seminorm_values)

    def test_scale_covariance_in_weight(self):
        small = ScanSettings(k_min=3, k_max=8, angles=8)
        base = sigma_scan(HALF_PLANE_AFFINE, 1.0, W1, small)
        for c in (0.5, 2.0):
            scaled = sigma_scan(HALF_PLANE_AFFINE, 1.0, ScaledWeight(c, W1), small)
            assert scaled.L_seminorm == pytest.approx(c * base.L_seminorm, rel=1e-9)
            assert np.allclose(
                np.asarray(scaled.seminorm_values),
                c * np.asarray(base.seminorm_values),
                rtol=1e-9,
            )

    def test_rotation_covariance(self):
        # conjugating the symbol by a grid-aligned rotation permutes scan
        # cells, leaving the tail maxima unchanged
        small = ScanSettings(k_min=3, k_max=10, angles=16)
        theta = 2 * np.pi * 3 / 16
        rot = np.exp(1j * theta)
        conjugated = Scale(rot, Compose(HALF_PLANE_AFFINE, Scale(np.conj(rot), Identity())))
        base = sigma_scan(HALF_PLANE_AFFINE, 1.0, W1, small)
        moved = sigma_scan(conjugated, 1.0, W1, small)
        assert moved.L_estimate == pytest.approx(base.L_estimate, abs=1e-6)
        assert np.allclose(moved.tail_max, base.tail_max, atol=1e-6)

    def test_rejects_non_self_map(self):
        with pytest.raises(NotSelfMapError):
            sigma_scan(Scale(1.5 + 0j, Identity()), 1.0, W1, LIGHT)

    def test_alpha_range_validated(self):
        with pytest.raises(ParameterError):
            sigma_scan(Identity(), 9.0, W1, LIGHT)

    def test_invariant_window_max(self):
        scan = sigma_scan(Identity(), 1.0, W1, LIGHT)
        w = scan.tail_window
        assert scan.L_estimate == max(scan.tail_max[-w:])


class TestMobiusScan:
    def test_identity_seminorm_limit_is_one(self):
        scan = mobius_scan(Identity(), W1, LIGHT)
        assert scan.L_seminorm == pytest.approx(1.0, abs=1e-3)
        # full norm adds |phi_a(0)| = |a| -> 1
        assert scan.L_estimate == pytest.approx(2.0, abs=1e-2)

    def test_contraction_limit_small(self):
        scan = mobius_scan(HALF_DILATION, W1, ScanSettings(k_min=3, k_max=16, angles=8))
        assert scan.L_seminorm < 1e-2

    def test_constant_symbol_zero_seminorm(self):
        scan = mobius_scan(Constant(0j), W1, ScanSettings(k_min=3, k_max=6, angles=8))
        assert scan.L_seminorm == 0.0
        # values still carry the |phi_a(0)| term
        assert scan.L_estimate == pytest.approx(max(scan.radii), abs=1e-12)


class TestEssentialBounds:
    def test_interval_arithmetic(self):
        scan = sigma_scan(Identity(), 1.0, W1, LIGHT)
        phi_norm = bloch_norm(Identity(), W1)
        bounds = essential_bounds(scan, 1.0, phi_norm)
        assert bounds.lower == pytest.approx(scan.L_estimate / 2.0)
        assert bounds.upper == pytest.approx(8.0 * scan.L_estimate)
        assert bounds.verdict == VERDICT_NONCOMPACT

    def test_constants(self):
        assert lower_constant(1.0) == 0.5
        assert upper_constant(1.0) == 8.0
        # ratio is 2^(alpha + 3)
        for alpha in (0.5, 1.0, 2.0):
            ratio = upper_constant(alpha) / lower_constant(alpha)
            assert ratio == pytest.approx(2.0 ** (alpha + 3))

    def test_alpha_two_interval(self):
        scan = BoundaryScan(
            family="sigma", radii=(0.9,), angles=(0.0,),
            values=((1.0,),), seminorm_values=((1.0,),),
            tail_max=(1.0,), seminorm_tail_max=(1.0,),
            L_estimate=1.0, L_seminorm=1.0, converged=True, tail_window=1,
        )
        phi_norm = bloch_norm(Identity(), StandardWeight(2.0))
        bounds = essential_bounds(scan, 2.0, phi_norm)
        assert bounds.lower == pytest.approx(1.0 / 8.0)
        assert bounds.upper == pytest.approx(4.0)
        assert bounds.upper / bounds.lower == pytest.approx(32.0)

    def test_zero_tail_is_compact(self):
        scan = BoundaryScan(
            family="sigma", radii=(0.9,), angles=(0.0,),
            values=((0.0,),), seminorm_values=((0.0,),),
            tail_max=(0.0,), seminorm_tail_max=(0.0,),
            L_estimate=0.0, L_seminorm=0.0, converged=True, tail_window=1,
        )
        phi_norm = bloch_norm(HALF_DILATION, W1)
        bounds = essential_bounds(scan, 1.0, phi_norm)
        assert bounds.lower == bounds.upper == 0.0
        assert bounds.verdict == VERDICT_COMPACT

    def test_compact_verdict_for_contraction(self):
        st = ScanSettings(k_min=3, k_max=16, angles=8)
        scan = sigma_scan(HALF_DILATION, 1.0, W1, st)
        bounds = essential_bounds(scan, 1.0, bloch_norm(HALF_DILATION, W1))
        assert bounds.verdict == VERDICT_COMPACT

    def test_shallow_scan_inconclusive_then_resolves(self):
        # verdict stability: deepening never flips a decided verdict, and
        # the contraction moves from Inconclusive to Compact with depth
        shallow = sigma_scan(HALF_DILATION, 1.0, W1, ScanSettings(k_min=3, k_max=10, angles=8))
        deep = sigma_scan(HALF_DILATION, 1.0, W1, ScanSettings(k_min=3, k_max=18, angles=8))
        phi_norm = bloch_norm(HALF_DILATION, W1)
        v_shallow = essential_bounds(shallow, 1.0, phi_norm).verdict
        v_deep = essential_bounds(deep, 1.0, phi_norm).verdict
        assert v_shallow in (VERDICT_COMPACT, VERDICT_INCONCLUSIVE)
        assert v_deep == VERDICT_COMPACT

    def test_verdict_stable_for_decided_symbols(self):
        phi_norm = bloch_norm(Identity(), W1)
        for st in (ScanSettings(k_min=3, k_max=10, angles=8), ScanSettings(k_min=3, k_max=20, angles=8)):
            scan = sigma_scan(Identity(), 1.0, W1, st)
            assert essential_bounds(scan, 1.0, phi_norm).verdict == VERDICT_NONCOMPACT


class TestPowerCriterion:
    def test_identity_limit(self):
        result = power_criterion_estimate(Identity(), 1.0, 1.0, 256)
        assert result.value == pytest.approx(1.0, abs=5e-3)

    def test_terms_match_independent_oracle(self):
        result = power_criterion_estimate(Identity(), 1.0, 1.0, 64)
        for j in (16, 40, 64):
            oracle = radial_oracle(lambda r, j=j: (1 - r**2) * j * r ** (j - 1))
            assert result.terms[j - 1] == pytest.approx(oracle, rel=1e-6)

    def test_contraction_decays(self):
        result = power_criterion_estimate(HALF_DILATION, 1.0, 1.0, 256)
        assert result.value < 1e-6

    def test_constant_symbol_zero(self):
        result = power_criterion_estimate(Constant(0j), 1.0, 1.0, 64)
        assert result.value == 0.0

    def test_tail_quarter(self):
        result = power_criterion_estimate(Identity(), 1.0, 1.0, 64)
        assert result.tail_start == 49
        assert len(result.tail_terms) == 16

    def test_j_max_validated(self):
        with pytest.raises(ParameterError):
            power_criterion_estimate(Identity(), 1.0, 1.0, 8)


class TestAutomorphismInvariance:
    # Schwarz-Pick equality: a disk automorphism phi satisfies
    # (1 - |z|^2) |phi'(z)| = 1 - |phi(z)|^2, so composing with it leaves the
    # classical-weight seminorm of every test function unchanged.  The scan
    # of an automorphism must therefore reproduce the identity scan
    # cell-for-cell, with the peak relocated to phi^{-1}(a) each time; this
    # pins the composition search on genuinely off-grid peaks.

    def test_sigma_scan_matches_identity_scan(self):
        from blochscope.symbols import Mobius

        st = ScanSettings(k_min=3, k_max=12, angles=8)
        base = sigma_scan(Identity(), 1.0, W1, st)
        moved = sigma_scan(Mobius(0.35 + 0.2j), 1.0, W1, st)
        assert np.allclose(
            np.asarray(moved.seminorm_values),
            np.asarray(base.seminorm_values),
            rtol=1e-5,
        )
        assert moved.L_seminorm == pytest.approx(base.L_seminorm, rel=1e-6)

    def test_power_criterion_matches_identity(self):
        from blochscope.symbols import Mobius

        ident = power_criterion_estimate(Identity(), 1.0, 1.0, 64)
        moved = power_criterion_estimate(Mobius(0.4 - 0.1j), 1.0, 1.0, 64)
        assert moved.value == pytest.approx(ident.value, rel=1e-5)


class TestOtherWeights:
    def test_log_weight_contraction_compact(self):
        from blochscope.weights import LogWeight

        st = ScanSettings(k_min=3, k_max=16, angles=8)
        scan = sigma_scan(HALF_DILATION, 1.0, LogWeight(), st)
        assert scan.L_seminorm < 1e-3

    def test_log_weight_identity_tail_rises_unconverged(self):
        # against the log weight the composed norms of the test family grow
        # like log(1/(1 - |a|)) for the identity symbol: the target norm is
        # strictly stronger, the inclusion is unbounded, and the scan must
        # report a rising, unconverged tail rather than a limit
        from blochscope.weights import LogWeight

        st = ScanSettings(k_min=3, k_max=16, angles=8)
        scan = sigma_scan(Identity(), 1.0, LogWeight(), st)
        tail = scan.tail_max
        assert all(b > a for a, b in zip(tail[-6:], tail[-5:]))
        assert not scan.converged

    def test_custom_weight_scan_runs(self, tmp_path):
        from blochscope.weights import CustomRadialWeight

        w = CustomRadialWeight((0.0, 0.5, 0.99), (1.0, 0.8, 0.2))
        st = ScanSettings(k_min=3, k_max=8, angles=8)
        scan = sigma_scan(HALF_DILATION, 1.0, w, st)
        assert scan.L_estimate >= 0.0
        assert len(scan.radii) == 6


class TestScanEdges:
    def test_ladder_dedupes_at_cap(self):
        st = ScanSettings(k_min=19, k_max=25, angles=8)
        mods = st.moduli()
        assert mods[-1] == 1.0 - st.search.eps_boundary
        assert all(b > a for a, b in zip(mods, mods[1:]))
        scan = sigma_scan(HALF_DILATION, 1.0, W1, st)
        assert len(scan.radii) == len(mods)

    def test_converged_flag_matches_rule(self):
        scan = sigma_scan(Identity(), 1.0, W1, LIGHT)
        tail = np.asarray(scan.tail_max)
        w = scan.tail_window
        win = [max(tail[max(0, i - w + 1) : i + 1]) for i in range(len(tail))]
        gap = abs(win[-1] - win[-2])
        assert scan.converged == (gap < LIGHT.rel_tol * scan.L_estimate + LIGHT.abs_tol)


class TestCriteriaCompare:
    def test_identity_all_noncompact_and_sandwiched(self):
        cmp = criteria_compare(Identity(), 1.0, 1.0, ScanSettings(k_min=3, k_max=12, angles=8, j_max=128))
        assert cmp.agreement
        assert cmp.verdicts["sigma_scan"] == VERDICT_NONCOMPACT
        assert cmp.verdicts["power_criterion"] == VERDICT_NONCOMPACT
        assert cmp.verdicts["mobius_criterion"] == VERDICT_NONCOMPACT
        assert cmp.bounds.power_criterion == pytest.approx(1.0, abs=0.01)
        assert cmp.bounds.lower <= cmp.power.value <= cmp.bounds.upper
        assert cmp.sandwich_ok

    def test_strict_contraction_all_compact(self):
        cmp = criteria_compare(
            Dilation(0.9, Identity()), 1.0, 1.0,
            ScanSettings(k_min=3, k_max=18, angles=8, j_max=256),
        )
        assert cmp.agreement
        assert set(cmp.verdicts.values()) == {VERDICT_COMPACT}

    def test_half_plane_affine_all_noncompact(self):
        cmp = criteria_compare(
            HALF_PLANE_AFFINE, 1.0, 1.0,
            ScanSettings(k_min=3, k_max=12, angles=16, j_max=128),
        )
        assert cmp.agreement
        assert set(cmp.verdicts.values()) == {VERDICT_NONCOMPACT}
        assert cmp.sandwich_ok

    def test_no_mobius_leg_off_classical_exponents(self):
        cmp = criteria_compare(Identity(), 2.0, 2.0, ScanSettings(k_min=3, k_max=8, angles=8, j_max=32))
        assert cmp.mobius is None
        assert "mobius_criterion" not in cmp.verdicts
