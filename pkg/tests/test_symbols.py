import numpy as np
import pytest

from blochscope.symbols import (
    Affine,
    Blaschke,
    Compose,
    Constant,
    Dilation,
    Identity,
    Mobius,
    Monomial,
    NotSelfMapError,
    Polynomial,
    Scale,
    Sigma,
    Sum,
    SymbolParameterError,
    SymbolSyntaxError,
    certify_self_map,
    evaluate,
    evaluate_derivative,
    parse_symbol,
    print_symbol,
)

from conftest import fd_derivative, random_tree


class TestParser:
    def test_identity(self):
        assert isinstance(parse_symbol("identity"), Identity)

    def test_mobius(self):
        node = parse_symbol("mobius(0.5+0i)")
        assert node == Mobius(0.5 + 0j)

    def test_compose_dilate(self):
        node = parse_symbol("compose(pow(2), dilate(0.9, identity))")
        for z in (0.1 + 0.2j, -0.4j, 0.35):
            assert evaluate(node, z) == pytest.approx((0.9 * z) ** 2)

    def test_case_and_whitespace_insensitive(self):
        a = parse_symbol("Compose( POW(2) ,  Dilate(0.9,Identity) )")
        b = parse_symbol("compose(pow(2), dilate(0.9, identity))")
        assert evaluate(a, 0.3 + 0.1j) == evaluate(b, 0.3 + 0.1j)

    def test_negative_and_scientific_numbers(self):
        node = parse_symbol("affine(-0.5+0.25i, 1e-1-0i)")
        assert evaluate(node, 1e-3) == pytest.approx(-0.5 + 0.25j + 1e-4)

    def test_typographic_minus_tolerated(self):
        node = parse_symbol("const(0.5−0.25i)")
        assert node == Constant(0.5 - 0.25j)

    def test_syntax_error_carries_position(self):
        with pytest.raises(SymbolSyntaxError) as exc:
            parse_symbol("mobius(")
        assert exc.value.position == 7

    def test_trailing_garbage_rejected(self):
        with pytest.raises(SymbolSyntaxError):
            parse_symbol("identity extra")

    def test_unknown_name_rejected(self):
        with pytest.raises(SymbolSyntaxError):
            parse_symbol("spiral(0.5)")

    def test_mobius_parameter_out_of_range(self):
        with pytest.raises((SymbolSyntaxError, SymbolParameterError)):
            parse_symbol("mobius(1.25+0i)")

    def test_sigma_parse(self):
        node = parse_symbol("sigma(1.5, 0.7+0.1i)")
        assert node == Sigma(1.5, 0.7 + 0.1j)


class TestPrinterRoundTrip:
    CASES = [
        Identity(),
        Constant(2 - 3j),
        Monomial(5),
        Mobius(0.3 - 0.4j),
        Affine(0.5 + 0j, 0.5 + 0j),
        Polynomial((1 + 0j, 0j, -0.25 + 0.5j)),
        Blaschke((0.3 + 0j, -0.2 + 0.4j)),
        Dilation(0.875, Monomial(3)),
        Scale(1j, Mobius(0.5 + 0j)),
        Compose(Monomial(2), Dilation(0.9, Identity())),
        Sum(Identity(), Constant(1j)),
        Sigma(2.5, 0.7 + 0.1j),
    ]

    @pytest.mark.parametrize("node", CASES, ids=lambda n: type(n).__name__)
    def test_print_parse_evaluates_identically(self, node):
        text = print_symbol(node)
        back = parse_symbol(text)
        for z in (0.0, 0.3 + 0.2j, -0.6 + 0.1j, 0.55j):
            assert abs(evaluate(node, z) - evaluate(back, z)) < 1e-12

    def test_random_trees_roundtrip(self, rng):
        for _ in range(25):
            node = random_tree(rng, depth=3)
            back = parse_symbol(print_symbol(node))
            for _ in range(4):
                z = 0.8 * np.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * np.pi))
                assert abs(evaluate(node, complex(z)) - evaluate(back, complex(z))) < 1e-12


class TestEvaluation:
    def test_mobius_swaps_center_and_a(self):
        a = 0.4 + 0.3j
        node = Mobius(a)
        assert evaluate(node, a) == pytest.approx(0.0)
        assert evaluate(node, 0.0) == pytest.approx(a)

    def test_dilation_of_identity(self):
        node = Dilation(0.7, Identity())
        assert evaluate(node, 0.5 + 0.1j) == pytest.approx(0.7 * (0.5 + 0.1j))

    def test_composition_associativity(self):
        f, g, h = Monomial(2), Mobius(0.3 + 0.1j), Dilation(0.8, Identity())
        left = Compose(f, Compose(g, h))
        right = Compose(Compose(f, g), h)
        for z in (0.2 + 0.2j, -0.5, 0.7j):
            assert abs(evaluate(left, z) - evaluate(right, z)) < 1e-12

    def test_blaschke_vanishes_at_zeros(self):
        zeros = (0.3 + 0.2j, -0.5 + 0.1j)
        node = Blaschke(zeros)
        for zk in zeros:
            assert abs(evaluate(node, zk)) < 1e-14

    def test_vectorized_matches_scalar(self, rng):
        node = random_tree(rng, depth=3)
        zs = 0.7 * np.sqrt(rng.uniform(size=16)) * np.exp(1j * rng.uniform(0, 2 * np.pi, 16))
        batch = node.eval(zs)
        for z, v in zip(zs, batch):
            assert abs(evaluate(node, complex(z)) - complex(v)) < 1e-12


class TestDerivatives:
    def test_identity_derivative(self):
        assert evaluate_derivative(Identity(), 0.5j) == 1.0

    def test_monomial_power_rule(self):
        node = Monomial(4)
        assert evaluate_derivative(node, 0.5) == pytest.approx(4 * 0.5 ** 3)

    def test_chain_rule_vs_finite_differences(self):
        node = Compose(Monomial(3), Mobius(0.4 + 0.2j))
        for z in (0.1 + 0.3j, -0.2 - 0.4j, 0.6):
            exact = evaluate_derivative(node, z)
            approx = fd_derivative(node, z)
            assert abs(exact - approx) / abs(exact) < 1e-6

    def test_blaschke_product_rule_vs_fd(self):
        node = Blaschke((0.3 + 0j, -0.2 + 0.4j, 0.1 - 0.5j))
        for z in (0.2 + 0.1j, -0.55, 0.3 - 0.3j):
            exact = evaluate_derivative(node, z)
            approx = fd_derivative(node, z)
            assert abs(exact - approx) / abs(exact) < 1e-6

    def test_random_trees_vs_fd(self, rng):
        checked = 0
        for _ in range(40):
            node = random_tree(rng, depth=3)
            for _ in range(4):
                z = 0.85 * np.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * np.pi))
                exact = evaluate_derivative(node, complex(z))
                if abs(exact) < 1e-8:  # relative error undefined near zeros of f'
                    continue
                approx = fd_derivative(node, complex(z))
                assert abs(exact - approx) / abs(exact) < 1e-6
                checked += 1
        assert checked > 100


class TestNodeValidation:
    def test_monomial_needs_positive_degree(self):
        with pytest.raises(SymbolParameterError):
            Monomial(0)

    def test_mobius_needs_interior_parameter(self):
        with pytest.raises(SymbolParameterError):
            Mobius(1.0 + 0j)

    def test_sigma_exponent_range(self):
        with pytest.raises(SymbolParameterError):
            Sigma(9.0, 0.5 + 0j)
        with pytest.raises(SymbolParameterError):
            Sigma(0.0, 0.5 + 0j)

    def test_dilation_factor_range(self):
        with pytest.raises(SymbolParameterError):
            Dilation(1.5, Identity())

    def test_blaschke_factor_unimodular(self):
        with pytest.raises(SymbolParameterError):
            Blaschke((0.5 + 0j,), factor=2.0)


class TestParserRobustness:
    from hypothesis import given, settings
    from hypothesis import strategies as hst

    @settings(max_examples=200, deadline=None)
    @given(hst.text(max_size=40))
    def test_arbitrary_text_never_crashes_unexpectedly(self, text):
        try:
            node = parse_symbol(text)
        except (SymbolSyntaxError, SymbolParameterError):
            return
        # anything that parses must evaluate finitely at an interior point
        value = evaluate(node, 0.25 + 0.1j)
        assert value == value  # not NaN

    def test_blaschke_factor_prints_as_scale(self):
        node = Blaschke((0.3 + 0j,), factor=1j)
        text = print_symbol(node)
        back = parse_symbol(text)
        for z in (0.1 + 0.2j, -0.5j):
            assert abs(evaluate(node, z) - evaluate(back, z)) < 1e-12


class TestDiskPointInputs:
    def test_evaluate_accepts_disk_points(self):
        from blochscope.disk import DiskPoint

        p = DiskPoint(0.3, -0.2)
        assert evaluate(Identity(), p) == 0.3 - 0.2j
        assert evaluate_derivative(Monomial(2), p) == pytest.approx(2 * (0.3 - 0.2j))

    def test_weight_at_accepts_disk_points(self):
        from blochscope.disk import DiskPoint
        from blochscope.weights import StandardWeight, weight_at

        p = DiskPoint(0.6, 0.0)
        assert weight_at(StandardWeight(2.0), p) == pytest.approx(0.4096)


class TestCertification:
    def test_strict_contraction(self):
        cert = certify_self_map(Dilation(0.5, Identity()))
        assert cert.is_strict
        assert cert.sup_modulus_estimate == pytest.approx(0.5, abs=1e-5)

    def test_identity_non_strict(self):
        cert = certify_self_map(Identity())
        assert not cert.is_strict
        assert cert.sup_modulus_estimate == pytest.approx(1.0, abs=1e-5)

    def test_half_plane_affine_non_strict(self):
        cert = certify_self_map(Affine(0.5 + 0j, 0.5 + 0j))
        assert not cert.is_strict
        assert cert.sup_modulus_estimate < 1.0

    def test_expanding_map_rejected(self):
        with pytest.raises(NotSelfMapError):
            certify_self_map(Scale(2.0 + 0j, Identity()))

    def test_constant_inside_ok(self):
        cert = certify_self_map(Constant(0.3 + 0.1j))
        assert cert.is_strict
