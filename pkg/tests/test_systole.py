import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quatsystole.hyperbolic import Isometry, trace_length_bound, translation_length
from quatsystole.lattice import AdmissibleGroupSpec, bad_places, is_congruence_element, trace_lower_bound
from quatsystole.numberfield import IdealSpec, RealQuadraticField, classify_prime
from quatsystole.systole import (
    CSV_COLUMNS,
    WitnessBlock,
    WitnessNotFound,
    congruence_order,
    congruence_witness,
    exceeds_exactly,
    find_witness,
    index_slope,
    norm_bound_denominator,
    primes_in,
    sqrt_in_ring,
    sweep,
    systole_lower_bound_index,
    systole_lower_bound_norm,
)

K = RealQuadraticField(2)
ELL = 2 * math.acosh(1 + math.sqrt(2))
SPLIT = [7, 17, 23, 31, 41]


def ideal(p, e=1, which=0):
    return IdealSpec.prime_power(classify_prime(p, K)[which], e)


class TestLowerBounds:
    def test_norm_bound_p7(self, spec, I7):
        r = systole_lower_bound_norm(I7, spec)
        assert r.value == pytest.approx(4 * math.log(7) - 2 * math.log(64), abs=1e-12)
        assert r.value == pytest.approx(-0.53412, abs=1e-5)
        assert r.valid is False  # 49 < 64
        assert r.kind == "systole_norm"
        assert r.constants["c"] == "c"

    def test_validity_threshold(self, spec):
        assert norm_bound_denominator(spec) == 64
        assert systole_lower_bound_norm(ideal(3), spec).valid  # N = 9, 81 >= 64
        assert systole_lower_bound_norm(ideal(3), spec).value == pytest.approx(4 * math.log(9) - 2 * math.log(64))
        assert systole_lower_bound_norm(ideal(17), spec).valid

    @given(st.sampled_from(SPLIT), st.integers(1, 3), st.integers(1, 3))
    def test_validity_condition(self, p, e, n):
        spec = AdmissibleGroupSpec.build(n=n)
        I = ideal(p, e)
        r = systole_lower_bound_norm(I, spec)
        assert r.valid == (I.norm() ** 2 >= 2**4 * (n + 1) ** 2)

    def test_index_form(self):
        assert index_slope(1) == Fraction(2, 5)
        assert index_slope(2) == Fraction(4, 21)
        r = systole_lower_bound_index(276595200, 1)
        assert r.value == pytest.approx(0.4 * math.log(276595200), rel=1e-14)
        assert r.value == pytest.approx(7.775226, abs=1e-6)
        assert r.constants["slope"] == "2/5"
        assert r.constants["c"] == "c"
        with pytest.raises(ValueError):
            systole_lower_bound_index(0, 1)

    @given(st.integers(1, 5))
    def test_slope_identity(self, n):
        # slope * dim = 4, so the index form at N(I)^dim is 4 ln N(I)
        assert index_slope(n) * (n + 1) * (2 * n + 3) == 4
        r = systole_lower_bound_index(7 ** ((n + 1) * (2 * n + 3)), n)
        assert r.value == pytest.approx(4 * math.log(7), rel=1e-12)


class TestWitness:
    def test_base_witness(self, witness):
        assert witness.c == K(1, 1)
        assert witness.s == K(2, 1)
        assert witness.b == K(0, 1)
        assert witness.spec.a * (witness.c * witness.c - 1) == witness.s * witness.s == K(6, 4)
        assert witness.verify()
        assert witness.length() == pytest.approx(ELL, abs=1e-12)
        assert witness.length() == pytest.approx(3.05714, abs=1e-5)

    def test_witness_matrix_is_loxodromic_isometry(self, witness, spec):
        M = Isometry.from_exact(witness.matrix(), spec.a)
        assert translation_length(M) == pytest.approx(witness.length(), abs=1e-12)

    def test_higher_dimension_block(self):
        spec = AdmissibleGroupSpec.build(n=3)
        W = find_witness(spec)
        M = W.matrix()
        assert M.size == 4
        assert M.star() @ spec.J() @ M == spec.J()
        assert all(M[i, i] == 1 for i in (2, 3))

    def test_untwisted_form_has_no_bounded_witness(self):
        # a = 1 (test mode): c^2 = 1 + b^2 has c = sqrt 2, but |sigma(c)| > 1
        spec = AdmissibleGroupSpec.build(a="1")
        assert sqrt_in_ring(1 + K(-1) ** 2) == K(0, 1)
        with pytest.raises(WitnessNotFound):
            find_witness(spec, 6)

    def test_other_forms(self):
        for a in ("1+2s2", "2+2s2", "4+3s2", "5+4s2"):
            spec = AdmissibleGroupSpec.build(a=a)
            W = find_witness(spec, 20)
            assert W.verify()
            assert W.matrix().star() @ spec.J() @ W.matrix() == spec.J()

    @given(st.integers(-200, 200), st.integers(-200, 200))
    def test_sqrt_in_ring(self, x, y):
        z = K(x, y)
        r = sqrt_in_ring(z * z)
        assert r is not None and r * r == z * z
        s = sqrt_in_ring(z * z * 3 if z else K(3))
        assert s is None

    def test_sigma_unbounded_candidate_rejected(self):
        # c = sqrt 2, s = 1 solves c^2 - 1 = s^2 for a = 1, but sigma(c) = -sqrt 2
        spec = AdmissibleGroupSpec.build(a="1")
        w = WitnessBlock(spec, K(0, 1), K(1))
        assert spec.a * (w.c * w.c - 1) == w.s * w.s
        assert not w.verify()


class TestCongruenceWitness:
    def test_p7(self, witness, spec, I7):
        cw = congruence_witness(witness, I7)
        assert cw.m == 6
        assert cw.length == pytest.approx(6 * ELL, abs=1e-9)
        assert cw.length == pytest.approx(18.34285, abs=1e-5)
        assert cw.element == witness.matrix() ** 6
        assert cw.element.real_trace() == K(4810, 3400)

    def test_trivial_ideal(self, witness):
        assert congruence_witness(witness, IdealSpec()).m == 1

    @pytest.mark.parametrize("p", SPLIT)
    def test_order_is_minimal(self, witness, spec, p):
        I = ideal(p)
        m = congruence_order(witness.matrix(), I, 1)
        M = witness.matrix()
        assert is_congruence_element(M**m, I, spec)
        for k in range(1, m):
            if m % k == 0:
                assert not is_congruence_element(M**k, I, spec)

    def test_orders_at_both_split_primes_and_products(self, witness, spec):
        Ia, Ib = ideal(7, which=0), ideal(7, which=1)
        ma = congruence_order(witness.matrix(), Ia, 1)
        mb = congruence_order(witness.matrix(), Ib, 1)
        assert congruence_order(witness.matrix(), Ia * Ib, 1) == math.lcm(ma, mb)

    def test_prime_square_order_divisible(self, witness):
        m1 = congruence_order(witness.matrix(), ideal(7), 1)
        m2 = congruence_order(witness.matrix(), ideal(7, 2), 1)
        assert m2 % m1 == 0 and m2 // m1 in (1, 7)

    @pytest.mark.parametrize("p", SPLIT)
    def test_sandwich_and_trace_chain(self, witness, spec, p):
        I = ideal(p)
        cw = congruence_witness(witness, I)
        low = systole_lower_bound_norm(I, spec)
        assert low.value <= cw.length
        tr = cw.element.real_trace()
        tb = trace_lower_bound(I, spec)
        assert exceeds_exactly(tr, tb)
        assert trace_length_bound(cw.element) <= cw.length + 1e-6


class TestSweep:
    def test_split_primes(self, spec, witness):
        rows, refused = sweep(spec, [31, 7, 23, 17], witness)
        assert [r.prime.p for r in rows] == [7, 17, 23, 31]
        assert not refused
        assert [r.witness_order_m for r in rows] == [6, 9, 22, 5]
        assert all(r.sandwich and r.trace_ok for r in rows)
        assert rows[0].index == 276595200

    def test_refuses_two(self, spec, witness):
        rows, refused = sweep(spec, [2, 7], witness)
        assert [r.prime.p for r in rows] == [7]
        assert refused[0].prime_p == 2
        assert "above_2" in refused[0].reasons

    def test_empty(self, spec, witness):
        assert sweep(spec, [], witness) == ([], [])

    def test_sorted_by_norm(self, spec, witness):
        rows, _ = sweep(spec, [3, 7, 17], witness)
        assert [r.norm_I for r in rows] == [7, 9, 17]

    def test_row_fields(self, spec, witness):
        rows, _ = sweep(spec, [7], witness)
        d = rows[0].as_dict()
        assert tuple(d) == CSV_COLUMNS
        assert d["trace_bound"] == Fraction(17, 16)
        assert d["residue_r"] == 3

    def test_primes_in(self):
        assert primes_in(3, 20) == [3, 5, 7, 11, 13, 17, 19]
        assert primes_in(20, 3) == []
