import random
from fractions import Fraction

import pytest

from hlbrion.ring import (
    Coeff, DomainMismatch, LaurentPoly, Monomial, NonInvertibleLeadingCoefficient,
    NotDivisible, SYMBOLIC_Z, TPoly, TRat, TruncatedSeries, UnitFactor,
    binomial_product_series, eval_at, exact_div_binomials, one_minus,
    random_point, series_invert, series_mul,
)


def x(name, e=1):
    return LaurentPoly.var(name, e)


def mono(**exps):
    return Monomial(exps)


def test_tpoly_basics():
    p = TPoly.from_list([1, -1])          # 1 - t
    q = TPoly.from_list([1, 1])           # 1 + t
    assert p * q == TPoly.from_list([1, 0, -1])
    assert (p - p).is_zero()
    assert p ** 2 == TPoly.from_list([1, -2, 1])
    assert TPoly.from_list([1, 0, -1]).exact_div(p) == q
    with pytest.raises(NotDivisible):
        TPoly.from_list([1, 1, 1]).exact_div(p)


def test_poly_mul_difference_of_squares():
    one = LaurentPoly.one()
    assert (one + x("x")) * (one - x("x")) == one - x("x", 2)


def test_poly_add_identity():
    p = x("x") + x("y", -2) * TPoly.t()
    assert p + LaurentPoly.zero() == p


def test_poly_mul_with_t():
    one = LaurentPoly.one()
    tx = x("x") * TPoly.t()
    assert (one - tx) * (one + tx) == one - x("x", 2) * TPoly.t(2)


def test_exact_div_binomials_trivial():
    one = LaurentPoly.one()
    p = one - x("x", 2)
    assert exact_div_binomials(p, [mono(x=1)]) == one + x("x")
    pq = (one - x("x")) * (one - x("y"))
    assert exact_div_binomials(pq, [mono(x=1), mono(y=1)]) == one


def test_exact_div_binomials_multiply_back():
    one = LaurentPoly.one()
    p = (one - x("x", 3)) * (one - x("x", 2))
    q = exact_div_binomials(p, [mono(x=1)])
    assert q == (one + x("x") + x("x", 2)) * (one - x("x", 2))
    assert q * (one - x("x")) == p


def test_exact_div_binomials_not_divisible():
    with pytest.raises(NotDivisible):
        exact_div_binomials(LaurentPoly.one() + x("x"), [mono(x=1)])


def test_exact_div_negative_direction():
    # divisor monomial with negative exponents
    one = LaurentPoly.one()
    p = one - x("x", -2)
    q = exact_div_binomials(p, [mono(x=-1)])
    assert q * (one - x("x", -1)) == p


def test_exact_div_random_roundtrip():
    rng = random.Random(7)
    for _ in range(25):
        nvars = rng.randint(1, 3)
        names = ["x", "y", "z"][:nvars]
        p = LaurentPoly.zero()
        for _ in range(rng.randint(1, 5)):
            m = Monomial({v: rng.randint(-3, 3) for v in names})
            p = p + LaurentPoly.from_monomial(m, TPoly.from_list(
                [rng.randint(-4, 4) for _ in range(rng.randint(1, 3))]))
        dens = []
        for _ in range(rng.randint(1, 2)):
            while True:
                m = Monomial({v: rng.randint(-2, 2) for v in names})
                if not m.is_unit():
                    dens.append(m)
                    break
        prod = p
        for m in dens:
            prod = prod - prod * m
        assert exact_div_binomials(prod, dens) == p
        # division order among the factors is irrelevant
        assert exact_div_binomials(prod, list(reversed(dens))) == p


def test_ring_axioms_random():
    rng = random.Random(3)

    def rand_poly():
        p = LaurentPoly.zero()
        for _ in range(rng.randint(0, 4)):
            m = Monomial({v: rng.randint(-2, 2) for v in ("x", "y")})
            p = p + LaurentPoly.from_monomial(m, TPoly.from_list(
                [rng.randint(-3, 3), rng.randint(-3, 3)]))
        return p

    for _ in range(20):
        a, b, c = rand_poly(), rand_poly(), rand_poly()
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a


def test_eval_at():
    p = x("x") + x("x", -1)
    assert eval_at(p, {"x": Fraction(2)}) == TRat({0: Fraction(5, 2)})
    q = LaurentPoly.one() - x("x") * TPoly.t()
    assert eval_at(q, {"x": Fraction(1)}) == TRat.from_tpoly(TPoly.from_list([1, -1]))
    # hl polynomial for n=2, lambda_1=2 at x=1: x^2+(1-t)x+1 -> 3 - t
    hl = x("x", 2) + x("x") * TPoly.from_list([1, -1]) + LaurentPoly.one()
    assert eval_at(hl, {"x": Fraction(1)}) == TRat({0: Fraction(3), 1: Fraction(-1)})


def test_eval_missing_variable():
    from hlbrion.ring import MissingVariable
    with pytest.raises(MissingVariable):
        eval_at(x("x") + x("y"), {"x": Fraction(1)})


def test_serialization_roundtrip_and_stability():
    rng = random.Random(11)
    for _ in range(15):
        p = LaurentPoly.zero()
        for _ in range(rng.randint(0, 5)):
            m = Monomial({v: rng.randint(-3, 3) for v in ("x1", "x2")})
            p = p + LaurentPoly.from_monomial(m, TPoly.from_list(
                [rng.randint(-5, 5) for _ in range(rng.randint(1, 4))]))
        blob = p.to_json()
        q = LaurentPoly.from_json(blob)
        assert q == p
        assert q.to_json() == blob


def test_trat_div_tpoly():
    num = TRat.from_tpoly(TPoly.from_list([1, 2, 1]))    # (1+t)^2
    assert num.div_tpoly_exact(TPoly.from_list([1, 1])) == \
        TRat.from_tpoly(TPoly.from_list([1, 1]))
    with pytest.raises(NotDivisible):
        TRat.from_tpoly(TPoly.from_list([1, 1, 1])).div_tpoly_exact(
            TPoly.from_list([1, 1]))


# --- truncated series ---------------------------------------------------------

def q_mono(order, e, c=1):
    return TruncatedSeries.monomial(order, e, LaurentPoly.const(c))


def test_series_mul_basic():
    a = TruncatedSeries.one(2) + q_mono(2, 1)       # 1 + q
    b = TruncatedSeries.one(2) - q_mono(2, 1)       # 1 - q
    prod = series_mul(a, b)
    assert prod.equals(TruncatedSeries.one(2) - q_mono(2, 2))


def test_series_mul_identity():
    a = TruncatedSeries(3, {0: Coeff.one(), 2: Coeff(TPoly.t())})
    assert series_mul(a, TruncatedSeries.one(3)).equals(a)


def test_series_mul_telescoping():
    n = 4
    geo = TruncatedSeries(n, {m: Coeff.one() for m in range(n + 1)})
    one_minus_q = TruncatedSeries.one(n) - q_mono(n, 1)
    assert series_mul(geo, one_minus_q).equals(TruncatedSeries.one(n))


def test_series_domain_mismatch():
    a = TruncatedSeries.one(2, domain="SYMBOLIC_Z")
    b = TruncatedSeries.one(2, domain="EVALUATED")
    with pytest.raises(DomainMismatch):
        series_mul(a, b)


def test_series_invert_geometric():
    n = 3
    s = TruncatedSeries.one(n) - q_mono(n, 1)
    inv = series_invert(s)
    assert inv.equals(TruncatedSeries(n, {m: Coeff.one() for m in range(n + 1)}))
    assert series_invert(TruncatedSeries.one(2)).equals(TruncatedSeries.one(2))


def test_series_invert_t_geometric():
    n = 2
    s = TruncatedSeries(n, {0: Coeff.one(), 1: Coeff(-TPoly.t())})
    inv = series_invert(s)
    expect = TruncatedSeries(n, {0: Coeff.one(), 1: Coeff(TPoly.t()),
                                 2: Coeff(TPoly.t(2))})
    assert inv.equals(expect)


def test_series_invert_roundtrip_random():
    rng = random.Random(5)
    for _ in range(10):
        n = 4
        coeffs = {0: Coeff(TPoly.const(rng.choice([1, -1, 2])))}
        for e in range(1, n + 1):
            if rng.random() < 0.7:
                coeffs[e] = Coeff(LaurentPoly.from_monomial(
                    Monomial({"z": rng.randint(-1, 1)}),
                    TPoly.from_list([rng.randint(-2, 2), rng.randint(-2, 2)])))
        s = TruncatedSeries(n, coeffs)
        if s.coeffs.get(0, Coeff.zero()).is_zero():
            continue
        prod = s * series_invert(s)
        assert prod.equals(TruncatedSeries.one(prod.order))


def test_series_invert_negative_min_degree():
    # q^{-1}(1 - q): inverse must be q(1 + q + q^2 + ...)
    n = 4
    s = TruncatedSeries(n, {-1: Coeff.one(), 0: -Coeff.one()})
    inv = series_invert(s)
    assert inv.coeff(1) == Coeff.one()
    assert inv.coeff(2) == Coeff.one()
    assert (s * inv).equals(TruncatedSeries.one((s * inv).order))


def test_series_invert_zero_raises():
    with pytest.raises(NonInvertibleLeadingCoefficient):
        series_invert(TruncatedSeries.zero(3))


def test_binomial_product_series():
    # ys = {q, q^2}, order 2 -> 1 - q - q^2
    ys = [mono(q=1), mono(q=2)]
    s = binomial_product_series(ys, 2)
    expect = TruncatedSeries(2, {0: Coeff.one(), 1: -Coeff.one(), 2: -Coeff.one()})
    assert s.equals(expect)
    # empty product
    assert binomial_product_series([], 3).equals(TruncatedSeries.one(3))
    # {z q, z^{-1} q} -> 1 - (z + z^{-1}) q + q^2
    s = binomial_product_series([mono(z=1, q=1), mono(z=-1, q=1)], 2)
    zsum = LaurentPoly.var("z") + LaurentPoly.var("z", -1)
    expect = TruncatedSeries(2, {0: Coeff.one(), 1: Coeff(-zsum), 2: Coeff.one()})
    assert s.equals(expect)


def test_unit_factor_detected():
    with pytest.raises(UnitFactor):
        one_minus(2, Monomial.unit(), 0)


def test_coeff_fraction_field():
    z = LaurentPoly.var("z")
    a = Coeff(LaurentPoly.one(), LaurentPoly.one() - z)
    b = Coeff(LaurentPoly.one() - z)
    assert (a * b) == Coeff.one()
    assert (a - a).is_zero()
    assert a.inv() == b
    s = a + b
    # 1/(1-z) + (1-z) = (1 + (1-z)^2)/(1-z)
    expect = Coeff(LaurentPoly.one() + (LaurentPoly.one() - z) * (LaurentPoly.one() - z),
                   LaurentPoly.one() - z)
    assert s == expect


def test_random_point_avoids_poles():
    rng = random.Random(1)
    pt = random_point(["x"], rng, dens=[mono(x=1)])
    assert pt["x"] != 1
