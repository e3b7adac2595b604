"""Finite type A deformed characters by independent routes.

Three ways to the same Laurent polynomial: the sum over interlacing integer
triangles with their t-weights, the symmetrized ratio over the symmetric
group, and the vertex decomposition of the associated polytope.  Weights are
given by the fundamental-coordinate vector a = (a_1, ..., a_{n-1}); the
polynomial lives in x_1, ..., x_{n-1} (the last variable is pinned to 1).
"""

from __future__ import annotations

import itertools
import random as _random
from collections import Counter

from .graphs import (
    BSeq, psi_terms, t_factorial, triangle_graph, xvar,
)
from .ring import (
    LaurentPoly, Monomial, RationalFn, TPoly, TRat, T_ONE,
    exact_div_binomials, random_point,
)


class TooLarge(ValueError):
    pass


class FiniteWeight:
    """Dominant integral weight of the special linear algebra of rank n-1."""

    def __init__(self, n, a):
        self.n = int(n)
        self.a = tuple(int(x) for x in a)
        if self.n < 2 or len(self.a) != self.n - 1:
            raise ValueError("need n >= 2 and n-1 fundamental coordinates")
        if any(x < 0 for x in self.a) or not any(self.a):
            raise ValueError("coordinates must be nonnegative and not all zero")
        self.lam = tuple(sum(self.a[i:]) for i in range(self.n - 1))
        self.parts = self.lam + (0,)

    def is_regular(self):
        return all(x > 0 for x in self.a)

    def type_multiplicities(self):
        """Run lengths of the distinct values of (lam_1, ..., lam_{n-1}, 0)."""
        return [len(list(g)) for _, g in itertools.groupby(self.parts)]

    def __repr__(self):
        return f"FiniteWeight(n={self.n}, a={self.a})"


def enumerate_gt(weight, max_n=6):
    """All interlacing triangles with the given top row."""
    if weight.n > max_n:
        raise TooLarge(f"n={weight.n} exceeds the guard {max_n}")
    rows = [weight.parts]
    patterns = []

    def extend(partial):
        prev = partial[-1]
        if len(prev) == 1:
            patterns.append(tuple(partial))
            return
        choices = []
        for j in range(len(prev) - 1):
            choices.append(range(prev[j + 1], prev[j] + 1))
        for row in itertools.product(*choices):
            if all(row[j] >= row[j + 1] for j in range(len(row) - 1)):
                extend(partial + [tuple(row)])

    extend([weight.parts])
    return patterns


def mu_exponent(pattern):
    """Weight monomial of a pattern: the x_i exponent is the difference of
    the row sums above and at row i (boundary variables pinned to 1)."""
    n = len(pattern[0])
    exps = {}
    for i in range(1, n):
        d = sum(pattern[i - 1]) - sum(pattern[i])
        if d:
            exps[xvar(i)] = d
    return Monomial(exps)


def p_of(pattern):
    """prod (1 - t^l)^{d_l}: d_l counts values occurring l times in a row and
    l-1 times in the row above."""
    out = T_ONE
    for i in range(1, len(pattern)):
        above = Counter(pattern[i - 1])
        here = Counter(pattern[i])
        for value, l in here.items():
            if above.get(value, 0) == l - 1:
                out = out * (T_ONE - TPoly.t(l))
    return out


def hl_gt(weight):
    """The combinatorial route: sum of p_A e^{mu_A} over patterns."""
    total = LaurentPoly.zero()
    for a in enumerate_gt(weight):
        total = total + LaurentPoly.from_monomial(mu_exponent(a), p_of(a))
    return total


def wlambda_poincare(weight):
    """Poincare series of the stabilizer: product of t-factorials of the
    part multiplicities."""
    out = T_ONE
    for l in weight.type_multiplicities():
        out = out * t_factorial(l)
    return out


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        l = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            l += 1
        if l % 2 == 0:
            sign = -sign
    return sign


def hl_def(weight, max_n=5):
    """The symmetrization route, with every term put over the common
    denominator prod (1 - x_i^{-1} x_j) and divided out exactly."""
    n = weight.n
    if n > max_n:
        raise TooLarge(f"n={n} exceeds the guard {max_n}")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    dens = [Monomial({xvar(i + 1): -1, xvar(j + 1): 1}) for i, j in pairs]
    total = LaurentPoly.zero()
    for w in itertools.permutations(range(n)):
        inv = [0] * n
        for pos, val in enumerate(w):
            inv[val] = pos
        term = LaurentPoly.from_monomial(
            Monomial({xvar(i + 1): weight.parts[inv[i]]
                      for i in range(n) if weight.parts[inv[i]]}))
        for (i, j), d in zip(pairs, dens):
            flipped = inv[i] > inv[j]
            if flipped:
                factor = LaurentPoly.const(TPoly.t()) - LaurentPoly.from_monomial(d)
            else:
                factor = LaurentPoly.one() - LaurentPoly.from_monomial(d, TPoly.t())
            term = term * factor
        total = total + term
    quotient = exact_div_binomials(total, dens)
    wl = wlambda_poincare(weight)
    divided = LaurentPoly({m: c.exact_div(wl) for m, c in quotient.terms.items()})
    return divided.subs_monomials({xvar(n): Monomial.unit()})


def schur_bialternant(weight):
    """Independent t=0 oracle: ratio of alternants, with x_n set to 1 at the
    end."""
    n = weight.n
    mus = [weight.parts[j] + n - 1 - j for j in range(n)]
    num = LaurentPoly.zero()
    den_monos = []
    for i in range(n):
        for j in range(i + 1, n):
            den_monos.append(Monomial({xvar(i + 1): 1, xvar(j + 1): -1}))
    for w in itertools.permutations(range(n)):
        sign = _perm_sign(w)
        m = Monomial({xvar(i + 1): mus[w[i]] for i in range(n) if mus[w[i]]})
        num = num + LaurentPoly.from_monomial(m, TPoly.const(sign))
    # det(x_i^{n-j}) = prod_{i<j} (x_i - x_j) = prod -x_j (1 - x_i x_j^{-1})
    quotient = exact_div_binomials(num, den_monos)
    shift = Monomial.unit()
    sign = 1
    for i in range(n):
        for j in range(i + 1, n):
            shift = shift * Monomial.var(xvar(j + 1), -1)
            sign = -sign
    out = quotient * shift * TPoly.const(sign)
    return out.subs_monomials({xvar(n): Monomial.unit()})


def orbit_sum(weight):
    """Sum of e^mu over the distinct permutations of the parts, x_n = 1."""
    total = LaurentPoly.zero()
    for perm in set(itertools.permutations(weight.parts)):
        m = Monomial({xvar(i + 1): perm[i]
                      for i in range(weight.n - 1) if perm[i]})
        total = total + LaurentPoly.from_monomial(m)
    return total


def subs_t(p, value):
    """Specialize the deformation parameter to an integer."""
    out = LaurentPoly.zero()
    for m, c in p.terms.items():
        v = sum(coeff * value ** e for e, coeff in c.c.items())
        if v:
            out = out + LaurentPoly.from_monomial(m, TPoly.const(v))
    return out


def hl_branching(parts, nvars, _memo=None):
    """Classical branching-rule oracle for the deformed symmetric function.

    Recursion over horizontal strips: P_lam(x_1..x_m) = sum over mu of
    psi_{lam/mu} P_mu(x_1..x_{m-1}) x_m^{|lam|-|mu|}, with
    psi = prod (1 - t^{m_j(mu)}) over part sizes j whose multiplicity grows
    by one from lam to mu.  Positive parts only; meant as a test fixture for
    small rank.
    """
    if _memo is None:
        _memo = {}
    parts = tuple(sorted((p for p in parts if p > 0), reverse=True))
    key = (parts, nvars)
    if key in _memo:
        return _memo[key]
    if len(parts) > nvars:
        _memo[key] = LaurentPoly.zero()
        return _memo[key]
    if nvars == 0:
        return LaurentPoly.one()
    total = LaurentPoly.zero()
    for mu in _horizontal_strips(parts):
        mult_mu = Counter(p for p in mu if p > 0)
        mult_lam = Counter(parts)
        psi = T_ONE
        for j, m in mult_mu.items():
            if mult_lam.get(j, 0) == m - 1:
                psi = psi * (T_ONE - TPoly.t(m))
        sub = hl_branching(mu, nvars - 1, _memo)
        deg = sum(parts) - sum(mu)
        term = sub * psi
        if deg:
            term = term * Monomial.var(xvar(nvars), deg)
        total = total + term
    _memo[key] = total
    return _memo[key]


def _horizontal_strips(parts):
    """All partitions interlacing the given one from below."""
    if not parts:
        yield ()
        return
    bounds = []
    for j in range(len(parts)):
        lo = parts[j + 1] if j + 1 < len(parts) else 0
        bounds.append(range(lo, parts[j] + 1))
    for mu in itertools.product(*bounds):
        if all(mu[j] >= mu[j + 1] for j in range(len(mu) - 1)):
            yield tuple(p for p in mu if p > 0)


# ---------------------------------------------------------------------------
# the vertex-contribution theorem
# ---------------------------------------------------------------------------

def face_is_relevant(face):
    """No component gains vertices from one row to the next one down."""
    for blk in face.blocks:
        counts = Counter(i for i, _ in blk)
        top = min(counts)
        for i in counts:
            if i > top and counts[i] > counts.get(i - 1, 0):
                return False
    return True


def vertex_monomial(face, b, n):
    """x-monomial of the specialized vertex exponential, boundaries pinned."""
    coords = face.vertex_coordinates(BSeq(b))
    exps = {}
    for i in range(1, n):
        d = sum(v for (r, _), v in coords.items() if r == i - 1) - \
            sum(v for (r, _), v in coords.items() if r == i)
        if d:
            exps[xvar(i)] = d
    return Monomial(exps)


def weyl_term_numerator(weight, w):
    """Numerator of one symmetrization term over the common denominator,
    with x_n pinned to 1."""
    n = weight.n
    inv = [0] * n
    for pos, val in enumerate(w):
        inv[val] = pos
    term = LaurentPoly.from_monomial(
        Monomial({xvar(i + 1): weight.parts[inv[i]]
                  for i in range(n) if weight.parts[inv[i]]}))
    for i in range(n):
        for j in range(i + 1, n):
            d = Monomial({xvar(i + 1): -1, xvar(j + 1): 1})
            if inv[i] > inv[j]:
                factor = LaurentPoly.const(TPoly.t()) - LaurentPoly.from_monomial(d)
            else:
                factor = LaurentPoly.one() - LaurentPoly.from_monomial(d, TPoly.t())
            term = term * factor
    return term.subs_monomials({xvar(n): Monomial.unit()})


def common_denominator_monomials(n):
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            m = Monomial({xvar(i + 1): -1, xvar(j + 1): 1})
            out.append(m.subs({xvar(n): Monomial.unit()}))
    return out


def verify_contribfin(weight, trials=3, seed=0, max_n=4):
    """Check the classification and values of the polytope vertex
    contributions against the per-orbit-element symmetrization sums.

    Returns a report dict; report["ok"] is the verdict.
    """
    if weight.n > max_n:
        raise TooLarge(f"n={weight.n} exceeds the guard {max_n}")
    rng = _random.Random(seed)
    n = weight.n
    G = triangle_graph(n)
    b = BSeq(weight.parts)
    pin = {xvar(0): Monomial.unit(), xvar(n): Monomial.unit()}
    contribs = []
    for face, fn in psi_terms(G, b):
        contribs.append((face, fn.subs_monomials(pin)))
    relevant = [(f, fn) for f, fn in contribs if face_is_relevant(f)]
    others = [(f, fn) for f, fn in contribs if not face_is_relevant(f)]
    orbit = set(itertools.permutations(weight.parts))
    report = {
        "n_vertices": len(contribs),
        "n_relevant": len(relevant),
        "orbit_size": len(orbit),
        "ok": True,
        "failures": [],
    }
    if len(relevant) != len(orbit):
        report["ok"] = False
        report["failures"].append("relevant vertex count != orbit size")
    by_mu = {}
    for f, fn in relevant:
        by_mu.setdefault(vertex_monomial(f, weight.parts, n), []).append(fn)
    if any(len(v) != 1 for v in by_mu.values()):
        report["ok"] = False
        report["failures"].append("orbit weight hit by several relevant vertices")
    dens = common_denominator_monomials(n)
    all_dens = list(dens)
    for _, fn in contribs:
        all_dens.extend(fn.den_monomials())
    variables = [xvar(i) for i in range(1, n)]
    group = list(itertools.permutations(range(n)))
    wl = wlambda_poincare(weight)
    for _ in range(trials):
        point = random_point(variables, rng, all_dens)
        memo = {}
        den_val = TRat.const(1)
        for d in dens:
            den_val = den_val * TRat.const(1 - d.eval(point, memo))
        # (a) irrelevant vertices contribute zero
        for f, fn in others:
            if not fn.eval(point, memo).is_zero():
                report["ok"] = False
                report["failures"].append(f"nonzero irrelevant vertex {f}")
        # (b) each relevant vertex matches its orbit-element sum, up to the
        # stabilizer factor (the orbit-grouped sum overcounts by W_lam(t))
        for mu, fns in by_mu.items():
            lhs = fns[0].eval(point, memo) * den_val * wl
            rhs = TRat()
            for w in group:
                inv = [0] * n
                for pos, val in enumerate(w):
                    inv[val] = pos
                wparts = tuple(weight.parts[inv[i]] for i in range(n))
                wmono = Monomial({xvar(i + 1): wparts[i]
                                  for i in range(n - 1) if wparts[i]})
                if wmono == mu:
                    rhs = rhs + weyl_term_numerator(weight, w).eval_at(point, memo)
            if lhs != rhs:
                report["ok"] = False
                report["failures"].append(f"orbit weight {mu} mismatch")
        if not report["ok"]:
            break
    return report
