from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form

from quatsystole.numberfield import (
    FieldElement,
    FieldError,
    IdealSpec,
    RealQuadraticField,
    ResidueRing,
    classify_prime,
    format_element,
    parse_element,
)

FIELDS = [2, 3, 6, 7, 11]
rationals = st.fractions(min_value=-50, max_value=50, max_denominator=12)
ints = st.integers(-10**6, 10**6)


@st.composite
def elements(draw, d=None, integral=False):
    d = d if d is not None else draw(st.sampled_from(FIELDS))
    if integral:
        return RealQuadraticField(d)(draw(ints), draw(ints))
    return RealQuadraticField(d)(draw(rationals), draw(rationals))


@st.composite
def triples(draw, integral=False):
    d = draw(st.sampled_from(FIELDS))
    return tuple(draw(elements(d, integral)) for _ in range(3))


class TestField:
    @pytest.mark.parametrize("d", [0, 1, -3, 4, 5, 12, 13, 21])
    def test_rejects_bad_d(self, d):
        with pytest.raises(FieldError):
            RealQuadraticField(d)

    @pytest.mark.parametrize("d", FIELDS)
    def test_accepts(self, d):
        assert RealQuadraticField(d).d == d

    def test_sqrt_d_squares_to_d(self):
        k = RealQuadraticField(7)
        assert k.sqrt_d * k.sqrt_d == 7

    @given(triples())
    def test_ring_axioms(self, t):
        x, y, z = t
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x * y == y * x
        assert x - x == 0

    @given(triples())
    def test_norm_and_conjugation(self, t):
        x, y, _ = t
        assert (x * y).norm() == x.norm() * y.norm()
        assert (x * y).conjugate() == x.conjugate() * y.conjugate()
        assert x * x.conjugate() == x.norm()

    @given(elements())
    def test_inverse(self, x):
        if not x:
            with pytest.raises(ZeroDivisionError):
                x.inverse()
        else:
            assert x * x.inverse() == 1
            assert x / x == 1
            assert x ** -2 * x**2 == 1

    @given(elements())
    def test_embeddings_are_homomorphic(self, x):
        y = x * x + 3
        for place in ("trivial", "sigma"):
            assert y.embed(place) == pytest.approx(x.embed(place) ** 2 + 3, rel=1e-9, abs=1e-9)

    @given(elements())
    def test_sign_exact_matches_float(self, x):
        for place in ("trivial", "sigma"):
            v = x.embed(place)
            if abs(v) > 1e-9:
                assert x.sign(place) == (1 if v > 0 else -1)
        assert (x.sign() == 0) == (not x)

    def test_sign_close_to_zero(self):
        # 8119 - 5741 sqrt 2 ~ 6e-5 and a much closer unit power
        k = RealQuadraticField(2)
        u = k(1, -1) ** 40
        assert u.sign() == 1
        assert (-u).sign() == -1
        assert k(1, 1) ** 40 * u == 1

    @given(elements())
    def test_format_parse_round_trip(self, x):
        assert parse_element(format_element(x), x.d) == x

    @pytest.mark.parametrize(
        "text,expected",
        [("1+1s2", (1, 1)), ("s2", (0, 1)), ("-s2", (0, -1)), ("1/2-3s2", (Fraction(1, 2), -3)), ("-3/2", (Fraction(-3, 2), 0)), ("2s2+5", (5, 2))],
    )
    def test_parse_examples(self, text, expected):
        el = parse_element(text, 2)
        assert (el.x, el.y) == expected

    @pytest.mark.parametrize("text", ["", "1+", "abc", "1+1s3", "1..2", "s"])
    def test_parse_errors(self, text):
        with pytest.raises(FieldError):
            parse_element(text, 2)

    def test_format_examples(self):
        k = RealQuadraticField(2)
        assert str(k(4810, 3400)) == "4810+3400s2"
        assert str(k(1, 1)) == "1+1s2"
        assert str(k(Fraction(-3, 2))) == "-3/2"

    def test_mixed_fields_rejected(self):
        with pytest.raises(FieldError):
            RealQuadraticField(2)(1, 1) + RealQuadraticField(3)(1, 1)


class TestPrimes:
    @pytest.mark.parametrize("d", FIELDS)
    @pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43])
    def test_splitting_by_residue_count(self, d, p):
        # independent: count roots of x^2 - d mod p by enumeration
        roots = [r for r in range(p) if (r * r - d) % p == 0]
        above = classify_prime(p, RealQuadraticField(d))
        if d % p == 0 or p == 2:
            assert [P.kind for P in above] == ["ramified"]
            assert above[0].q == p
        elif roots:
            assert [P.kind for P in above] == ["split", "split"]
            assert sorted(P.r for P in above) == roots
            assert all(P.q == p for P in above)
        else:
            assert [P.kind for P in above] == ["inert"]
            assert above[0].q == p * p
            assert above[0].r is None

    def test_examples(self, k2):
        P3 = classify_prime(3, k2)
        assert [(P.kind, P.q) for P in P3] == [("inert", 9)]
        P7 = classify_prime(7, k2)
        assert [(P.kind, P.r) for P in P7] == [("split", 3), ("split", 4)]
        assert str(P7[0]) == "(7, s2-3)"

    @pytest.mark.parametrize("n", [1, 4, 9, 15, -7])
    def test_rejects_non_primes(self, n, k2):
        with pytest.raises((FieldError, ValueError)):
            classify_prime(n, k2)

    def test_ideal_norms(self, k2):
        P3 = classify_prime(3, k2)[0]
        P7a, P7b = classify_prime(7, k2)
        assert IdealSpec.prime_power(P3).norm() == 9
        assert IdealSpec(((P7a, 2), (P3, 1))).norm() == 441
        assert (IdealSpec.prime_power(P7a) * IdealSpec.prime_power(P7b)).norm() == 49
        assert IdealSpec().norm() == 1
        assert IdealSpec.prime_power(P7a).squared().norm() == 49

    def test_duplicate_factor_rejected(self, k2):
        P = classify_prime(7, k2)[0]
        with pytest.raises(FieldError):
            IdealSpec(((P, 1), (P, 2)))


def _ideal_basis(P, e):
    """Z-basis (HNF columns) of P^e from the generators p and sqrt(d) - r."""
    d, p = P.d, P.p
    gens = [(p, 0)] if P.kind == "inert" else [(p, 0), (-P.r, 1)]
    cur = [(1, 0)]
    for _ in range(e):
        cur = [(a * c + d * b * f, a * f + b * c) for (a, b) in cur for (c, f) in gens]
    cols = []
    for a, b in cur:
        cols += [[a, b], [d * b, a]]  # g and g * sqrt(d)
    H = hermite_normal_form(Matrix(cols).T)
    return H


def _in_ideal(el, H):
    sol = H.solve(Matrix([int(el.x), int(el.y)])) if H.shape[1] == 2 else None
    return all(v.is_integer for v in sol)


def _primes(ds=(2, 3, 7), ps=(2, 3, 5, 7)):
    out = []
    for d in ds:
        for p in ps:
            out += classify_prime(p, RealQuadraticField(d))
    return out


PRIMES = _primes()


class TestResidueRings:
    @pytest.mark.parametrize("P", PRIMES, ids=str)
    @pytest.mark.parametrize("e", [1, 2, 3, 4])
    def test_size_matches_index_of_ideal_lattice(self, P, e):
        H = _ideal_basis(P, e)
        assert abs(H.det()) == ResidueRing(P, e).size

    @pytest.mark.parametrize("P", PRIMES, ids=lambda P: f"{P}/d{P.d}")
    @pytest.mark.parametrize("e", [1, 2, 3])
    @settings(max_examples=40, deadline=None)
    @given(x=ints, y=ints)
    def test_membership_matches_lattice_oracle(self, P, e, x, y):
        el = FieldElement(Fraction(x), Fraction(y), P.d)
        H = _ideal_basis(P, e)
        ring = ResidueRing(P, e)
        assert ring.contains(el) == _in_ideal(el, H)
        # every element of the ideal lattice is recognised
        v = H * Matrix([x % 17, y % 13])
        assert ring.contains(FieldElement(Fraction(int(v[0])), Fraction(int(v[1])), P.d))

    @pytest.mark.parametrize("P", PRIMES, ids=lambda P: f"{P}/d{P.d}")
    @settings(max_examples=30, deadline=None)
    @given(x=ints, y=ints, u=ints, v=ints, e=st.integers(1, 5))
    def test_reduction_is_a_ring_homomorphism(self, P, x, y, u, v, e):
        d = P.d
        a, b = FieldElement(Fraction(x), Fraction(y), d), FieldElement(Fraction(u), Fraction(v), d)
        ring = ResidueRing(P, e)
        ra, rb = ring.reduce(a), ring.reduce(b)
        assert ring.reduce(a + b) == ring.add(ra, rb)
        assert ring.reduce(a * b) == ring.mul(ra, rb)
        assert ring.reduce(ring.lift(a)) == ra
        assert ring.contains(a - ring.lift(a))

    def test_ramified_square_is_p(self):
        # (sqrt 2)^2 = (2): sqrt 2 lies in P but not P^2, 2 lies in P^2 but not P^3
        k = RealQuadraticField(2)
        P = classify_prime(2, k)[0]
        assert ResidueRing(P, 1).contains(k.sqrt_d)
        assert not ResidueRing(P, 2).contains(k.sqrt_d)
        assert ResidueRing(P, 2).contains(k(2))
        assert not ResidueRing(P, 3).contains(k(2))

    def test_non_integral_refused(self, P7):
        with pytest.raises(FieldError):
            ResidueRing(P7, 1).reduce(RealQuadraticField(2)(Fraction(1, 2)))

    def test_valuation(self, P7, k2):
        assert P7.valuation(k2(7)) == 1
        assert P7.valuation(k2(-3, 1) ** 3) == 3
        assert P7.valuation(k2(3, 1)) == 0
