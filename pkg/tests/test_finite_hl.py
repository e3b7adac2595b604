import itertools

import pytest

from hlbrion.finite_hl import (
    FiniteWeight, TooLarge, enumerate_gt, hl_branching, hl_def, hl_gt,
    mu_exponent, orbit_sum, p_of, schur_bialternant, subs_t,
    verify_contribfin, wlambda_poincare,
)
from hlbrion.graphs import BSeq, enumerate_faces, phi_face, triangle_graph
from hlbrion.ring import LaurentPoly, Monomial, TPoly


def tp(*coeffs):
    return TPoly.from_list(list(coeffs))


def x(i, e=1):
    return LaurentPoly.var(f"x{i}", e)


def test_weight_coordinates():
    w = FiniteWeight(3, [1, 2])
    assert w.lam == (3, 2)
    assert w.parts == (3, 2, 0)
    with pytest.raises(ValueError):
        FiniteWeight(2, [0])


def test_enumerate_gt_counts():
    assert len(enumerate_gt(FiniteWeight(2, [2]))) == 3
    assert len(enumerate_gt(FiniteWeight(3, [1, 0]))) == 3
    # dimension of the adjoint of sl3: lam = (2,1,0) -> 8
    assert len(enumerate_gt(FiniteWeight(3, [1, 1]))) == 8
    with pytest.raises(TooLarge):
        enumerate_gt(FiniteWeight(7, [1] * 6))


def test_mu_exponent():
    w = FiniteWeight(2, [2])
    pats = {a[1][0]: a for a in enumerate_gt(w)}
    assert mu_exponent(pats[1]) == Monomial({"x1": 1})
    # highest pattern of the fundamental weight has unit monomial
    pat = ((1, 0, 0), (1, 0), (1,))
    assert mu_exponent(pat) == Monomial.unit()
    # telescoping: total x-degree sums to rowsum_0 - rowsum_{n-1}
    for a in enumerate_gt(FiniteWeight(3, [1, 1])):
        deg = sum(mu_exponent(a).exps().values())
        assert deg == sum(a[0]) - sum(a[-1])


def test_p_of_examples():
    pats = {a[1][0]: a for a in enumerate_gt(FiniteWeight(2, [2]))}
    assert p_of(pats[1]) == tp(1, -1)
    assert p_of(pats[2]) == TPoly.one()
    assert p_of(((2, 1, 0), (1, 1), (1,))) == TPoly.one() - TPoly.t(2)


def test_hl_gt_small():
    assert hl_gt(FiniteWeight(2, [2])) == \
        x(1, 2) + x(1) * tp(1, -1) + LaurentPoly.one()
    assert hl_gt(FiniteWeight(2, [1])) == x(1) + LaurentPoly.one()
    assert hl_gt(FiniteWeight(3, [1, 0])) == LaurentPoly.one() + x(1) + x(2)


def test_hl_def_matches_gt():
    for n, a in [(2, [1]), (2, [2]), (2, [3]), (3, [1, 0]), (3, [0, 1]),
                 (3, [1, 1]), (3, [2, 1]), (4, [1, 0, 0]), (4, [0, 1, 0]),
                 (4, [1, 0, 1])]:
        w = FiniteWeight(n, a)
        assert hl_gt(w) == hl_def(w), (n, a)


def test_hl_def_branching_oracle():
    # independent classical-recursion fixture for small rank
    for n, a in [(2, [1]), (2, [2]), (2, [3]), (3, [1, 0]), (3, [1, 1]),
                 (3, [2, 1]), (3, [0, 2])]:
        w = FiniteWeight(n, a)
        br = hl_branching(w.parts, n).subs_monomials(
            {f"x{n}": Monomial.unit()})
        assert br == hl_gt(w), (n, a)


def test_schur_specialization():
    for n, a in [(2, [2]), (3, [1, 1]), (3, [2, 0]), (4, [1, 1, 0])]:
        w = FiniteWeight(n, a)
        assert subs_t(hl_gt(w), 0) == schur_bialternant(w), (n, a)


def test_orbit_specialization():
    for n, a in [(2, [2]), (3, [1, 1]), (3, [1, 0]), (4, [1, 0, 1])]:
        w = FiniteWeight(n, a)
        assert subs_t(hl_gt(w), 1) == orbit_sum(w), (n, a)


def test_wlambda():
    assert wlambda_poincare(FiniteWeight(2, [2])) == TPoly.one()
    assert wlambda_poincare(FiniteWeight(3, [1, 0])) == tp(1, 1)
    # all parts distinct: trivial stabilizer
    assert wlambda_poincare(FiniteWeight(3, [1, 1])) == TPoly.one()
    # lam = (2,2,2) would need a=0 entries: (0,0) invalid; use n=4 (2,2,0):
    assert wlambda_poincare(FiniteWeight(4, [0, 2, 0])) == tp(1, 1) * tp(1, 1)


def test_singular_division_is_exact():
    # the symmetrized sum must be divisible by W_lam(t) in Z[t]
    w = FiniteWeight(4, [0, 1, 0])
    p = hl_def(w)
    assert p == hl_gt(w)


def test_p_matches_face_weight():
    # bridge: p_of(A) equals the weight of the minimal face containing A
    for n, a in [(2, [2]), (3, [1, 1]), (3, [2, 0])]:
        w = FiniteWeight(n, a)
        G = triangle_graph(n)
        faces = enumerate_faces(G, BSeq(w.parts))
        by_edges = {f.edge_set(): f for f in faces}
        for pat in enumerate_gt(w):
            coords = {}
            for i, row in enumerate(pat):
                for k, val in enumerate(row):
                    coords[(i, k + 1)] = val
            es = frozenset((hi, lo) for hi, lo in G.edges
                           if coords[hi] == coords[lo])
            face = by_edges[es]
            assert phi_face(face) == p_of(pat), (n, a, pat)


def test_contribfin():
    r = verify_contribfin(FiniteWeight(2, [2]), trials=2, seed=1)
    assert r["ok"] and r["n_relevant"] == 2
    r = verify_contribfin(FiniteWeight(3, [1, 1]), trials=2, seed=2)
    assert r["ok"] and r["n_relevant"] == 6
    r = verify_contribfin(FiniteWeight(3, [1, 0]), trials=2, seed=3)
    assert r["ok"] and r["n_relevant"] == 3
