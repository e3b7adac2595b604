"""Exact arithmetic kernel: t-polynomials, sparse Laurent polynomials,
factored rational functions and truncated q-series.

Everything is exact.  Coefficients of Laurent polynomials are integer
polynomials in the deformation parameter t (`TPoly`); evaluation at rational
points keeps t symbolic (`TRat`).  Rational functions are stored with their
denominators in factored binomial form (1 - m) and are never expanded unless
an exact division is requested.  Truncated series live in the ring of Laurent
series in q with finitely many negative powers; their coefficients are drawn
from a fraction field (`Coeff`), either symbolic in the z-variables or with
the z-variables already evaluated at rationals.
"""

from __future__ import annotations

import json
from fractions import Fraction


class NotDivisible(ArithmeticError):
    """Requested exact division has no polynomial result."""


class MissingVariable(KeyError):
    """Evaluation point does not assign every variable."""


class DomainMismatch(ValueError):
    """Series operands have different truncation orders or domains."""


class NonInvertibleLeadingCoefficient(ArithmeticError):
    """Series has no inverse because its lowest coefficient has none."""


class UnitFactor(ValueError):
    """A binomial factor (1 - y) degenerated to zero: y mapped to 1."""


class CollapseError(ValueError):
    """A monomial specialization sent a denominator factor to 1."""


# ---------------------------------------------------------------------------
# t-polynomials
# ---------------------------------------------------------------------------

class TPoly:
    """Polynomial in t with integer coefficients, stored sparsely.

    Immutable by convention: no method mutates self.  Zero coefficients are
    never stored, so equal polynomials have equal dicts.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        if coeffs is None:
            self.c = {}
        else:
            self.c = {e: v for e, v in coeffs.items() if v != 0}

    @staticmethod
    def const(v):
        return TPoly({0: v})

    @staticmethod
    def zero():
        return TPoly()

    @staticmethod
    def one():
        return TPoly({0: 1})

    @staticmethod
    def t(power=1):
        return TPoly({power: 1})

    @staticmethod
    def from_list(coeffs):
        """Build from [c0, c1, ...] meaning c0 + c1*t + ..."""
        return TPoly({e: v for e, v in enumerate(coeffs)})

    def to_list(self):
        if not self.c:
            return [0]
        d = max(self.c)
        return [self.c.get(e, 0) for e in range(d + 1)]

    def is_zero(self):
        return not self.c

    def is_one(self):
        return self.c == {0: 1}

    def degree(self):
        return max(self.c) if self.c else -1

    def __add__(self, other):
        out = dict(self.c)
        for e, v in other.c.items():
            w = out.get(e, 0) + v
            if w:
                out[e] = w
            else:
                out.pop(e, None)
        r = TPoly.__new__(TPoly)
        r.c = out
        return r

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        r = TPoly.__new__(TPoly)
        r.c = {e: -v for e, v in self.c.items()}
        return r

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return TPoly()
            r = TPoly.__new__(TPoly)
            r.c = {e: v * other for e, v in self.c.items()}
            return r
        out = {}
        for e1, v1 in self.c.items():
            for e2, v2 in other.c.items():
                e = e1 + e2
                w = out.get(e, 0) + v1 * v2
                if w:
                    out[e] = w
                else:
                    del out[e]
        r = TPoly.__new__(TPoly)
        r.c = out
        return r

    __rmul__ = __mul__

    def __pow__(self, k):
        result = TPoly.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        return isinstance(other, TPoly) and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def exact_div(self, other):
        """Exact polynomial division; raises NotDivisible on remainder."""
        if other.is_zero():
            raise ZeroDivisionError("division of TPoly by zero")
        rem = dict(self.c)
        quo = {}
        dlead = max(other.c)
        clead = other.c[dlead]
        while rem:
            e = max(rem)
            if e < dlead or rem[e] % clead != 0:
                raise NotDivisible(f"{self} not divisible by {other}")
            q = rem[e] // clead
            quo[e - dlead] = q
            for eo, vo in other.c.items():
                ee = eo + e - dlead
                w = rem.get(ee, 0) - q * vo
                if w:
                    rem[ee] = w
                else:
                    rem.pop(ee, None)
        return TPoly(quo)

    def eval(self, tval):
        """Evaluate at a rational t-value."""
        return sum((Fraction(v) * Fraction(tval) ** e for e, v in self.c.items()),
                   Fraction(0))

    def __str__(self):
        if not self.c:
            return "(0)"
        parts = []
        for e in sorted(self.c):
            v = self.c[e]
            if e == 0:
                parts.append(f"{v}")
            elif e == 1:
                parts.append(f"{v}*t" if v != 1 else "t")
            else:
                parts.append(f"{v}*t^{e}" if v != 1 else f"t^{e}")
        return "(" + " + ".join(parts).replace("+ -", "- ") + ")"

    __repr__ = __str__


T_ZERO = TPoly.zero()
T_ONE = TPoly.one()


class TRat:
    """Polynomial in t with Fraction coefficients.

    The value type of exact evaluation: x-variables become rationals, t stays
    symbolic.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        self.c = {} if coeffs is None else {e: v for e, v in coeffs.items() if v != 0}

    @staticmethod
    def from_tpoly(p, scale=Fraction(1)):
        return TRat({e: Fraction(v) * scale for e, v in p.c.items()})

    @staticmethod
    def const(v):
        return TRat({0: Fraction(v)})

    def is_zero(self):
        return not self.c

    def __add__(self, other):
        out = dict(self.c)
        for e, v in other.c.items():
            w = out.get(e, 0) + v
            if w:
                out[e] = w
            else:
                del out[e]
        return TRat(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return TRat({e: -v for e, v in self.c.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TRat({e: v * other for e, v in self.c.items()})
        if isinstance(other, TPoly):
            other = TRat.from_tpoly(other)
        out = {}
        for e1, v1 in self.c.items():
            for e2, v2 in other.c.items():
                e = e1 + e2
                w = out.get(e, 0) + v1 * v2
                if w:
                    out[e] = w
                else:
                    del out[e]
        return TRat(out)

    __rmul__ = __mul__

    def div_scalar(self, s):
        return TRat({e: v / s for e, v in self.c.items()})

    def div_tpoly_exact(self, p):
        """Exact division by a TPoly; raises NotDivisible on remainder."""
        if p.is_zero():
            raise ZeroDivisionError
        rem = dict(self.c)
        quo = {}
        dlead = max(p.c)
        clead = p.c[dlead]
        while rem:
            e = max(rem)
            if e < dlead:
                raise NotDivisible("TRat not divisible by TPoly")
            q = rem[e] / clead
            quo[e - dlead] = q
            for eo, vo in p.c.items():
                ee = eo + e - dlead
                w = rem.get(ee, 0) - q * vo
                if w:
                    rem[ee] = w
                else:
                    rem.pop(ee, None)
        return TRat(quo)

    def __eq__(self, other):
        return isinstance(other, TRat) and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __str__(self):
        if not self.c:
            return "(0)"
        return "(" + " + ".join(f"{v}*t^{e}" for e, v in sorted(self.c.items())) + ")"

    __repr__ = __str__


# ---------------------------------------------------------------------------
# Monomials and Laurent polynomials
# ---------------------------------------------------------------------------

class Monomial:
    """Laurent monomial: map from variable name to nonzero integer exponent.

    Stored as a sorted tuple of (var, exp) pairs; the empty tuple is the unit.
    """

    __slots__ = ("e", "_hash")

    def __init__(self, exps=None):
        if exps is None:
            self.e = ()
        elif isinstance(exps, tuple):
            self.e = exps
        else:
            self.e = tuple(sorted((v, x) for v, x in exps.items() if x != 0))
        self._hash = hash(self.e)

    @staticmethod
    def unit():
        return _M_UNIT

    @staticmethod
    def var(name, exp=1):
        if exp == 0:
            return _M_UNIT
        return Monomial(((name, exp),))

    def is_unit(self):
        return not self.e

    def exps(self):
        return dict(self.e)

    def vars(self):
        return [v for v, _ in self.e]

    def exp_of(self, name):
        for v, x in self.e:
            if v == name:
                return x
        return 0

    def __mul__(self, other):
        if not self.e:
            return other
        if not other.e:
            return self
        out = dict(self.e)
        for v, x in other.e:
            w = out.get(v, 0) + x
            if w:
                out[v] = w
            else:
                del out[v]
        return Monomial(out)

    def __pow__(self, k):
        if k == 0 or not self.e:
            return _M_UNIT
        return Monomial(tuple((v, x * k) for v, x in self.e))

    def inv(self):
        return Monomial(tuple((v, -x) for v, x in self.e))

    def degree(self):
        return sum(x for _, x in self.e)

    def eval(self, point, memo=None):
        """Evaluate at {var: Fraction}; raises MissingVariable."""
        if memo is not None:
            val = memo.get(self)
            if val is not None:
                return val
        val = Fraction(1)
        for v, x in self.e:
            if v not in point:
                raise MissingVariable(v)
            val *= Fraction(point[v]) ** x
        if memo is not None:
            memo[self] = val
        return val

    def subs(self, varmap):
        """Substitute variables by monomials: var -> Monomial."""
        out = _M_UNIT
        for v, x in self.e:
            out = out * (varmap[v] ** x if v in varmap else Monomial.var(v, x))
        return out

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.e == other.e

    def __hash__(self):
        return self._hash

    def sort_key(self):
        # graded lexicographic on sorted variable names
        return (self.degree(), self.e)

    def __str__(self):
        if not self.e:
            return "1"
        return "*".join(f"{v}^{x}" if x != 1 else v for v, x in self.e)

    __repr__ = __str__


_M_UNIT = Monomial()


class LaurentPoly:
    """Sparse multivariate Laurent polynomial with TPoly coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms is None:
            self.terms = {}
        else:
            self.terms = {m: c for m, c in terms.items() if not c.is_zero()}

    @staticmethod
    def zero():
        return LaurentPoly()

    @staticmethod
    def const(c):
        if isinstance(c, int):
            c = TPoly.const(c)
        return LaurentPoly({_M_UNIT: c})

    @staticmethod
    def one():
        return LaurentPoly.const(1)

    @staticmethod
    def from_monomial(m, coeff=None):
        return LaurentPoly({m: coeff if coeff is not None else T_ONE})

    @staticmethod
    def var(name, exp=1):
        return LaurentPoly.from_monomial(Monomial.var(name, exp))

    def is_zero(self):
        return not self.terms

    def is_one(self):
        return len(self.terms) == 1 and self.terms.get(_M_UNIT, T_ZERO).is_one()

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            w = out.get(m)
            if w is None:
                out[m] = c
            else:
                w = w + c
                if w.is_zero():
                    del out[m]
                else:
                    out[m] = w
        r = LaurentPoly.__new__(LaurentPoly)
        r.terms = out
        return r

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        r = LaurentPoly.__new__(LaurentPoly)
        r.terms = {m: -c for m, c in self.terms.items()}
        return r

    def __mul__(self, other):
        if isinstance(other, TPoly):
            if other.is_zero():
                return LaurentPoly()
            r = LaurentPoly.__new__(LaurentPoly)
            r.terms = {m: c * other for m, c in self.terms.items()}
            return r
        if isinstance(other, int):
            return self * TPoly.const(other)
        if isinstance(other, Monomial):
            r = LaurentPoly.__new__(LaurentPoly)
            r.terms = {m * other: c for m, c in self.terms.items()}
            return r
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                c = c1 * c2
                w = out.get(m)
                if w is None:
                    if not c.is_zero():
                        out[m] = c
                else:
                    w = w + c
                    if w.is_zero():
                        del out[m]
                    else:
                        out[m] = w
        r = LaurentPoly.__new__(LaurentPoly)
        r.terms = out
        return r

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((m, frozenset(c.c.items())) for m, c in self.terms.items()))

    def coeff(self, m):
        return self.terms.get(m, T_ZERO)

    def variables(self):
        out = set()
        for m in self.terms:
            out.update(m.vars())
        return out

    def subs_monomials(self, varmap):
        """Apply a monomial substitution var -> Monomial to every term."""
        out = LaurentPoly()
        for m, c in self.terms.items():
            out = out + LaurentPoly({m.subs(varmap): c})
        return out

    def eval_at(self, point, memo=None):
        """Exact evaluation at {var: Fraction}; t stays symbolic -> TRat."""
        out = {}
        for m, c in self.terms.items():
            s = m.eval(point, memo)
            for e, v in c.c.items():
                w = out.get(e, 0) + v * s
                if w:
                    out[e] = w
                else:
                    del out[e]
        return TRat(out)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: mc[0].sort_key())

    def to_text(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            parts.append(f"{c}" if m.is_unit() else f"{c}*{m}")
        return " + ".join(parts)

    def to_json(self):
        return json.dumps(
            {"terms": [{"coeff": c.to_list(), "exps": dict(m.e)}
                       for m, c in self.sorted_terms()]},
            separators=(",", ":"), sort_keys=True)

    @staticmethod
    def from_json(text):
        data = json.loads(text)
        terms = {}
        for entry in data["terms"]:
            m = Monomial({v: int(x) for v, x in entry["exps"].items()})
            terms[m] = TPoly.from_list(entry["coeff"])
        return LaurentPoly(terms)

    def __str__(self):
        return self.to_text()

    __repr__ = __str__


# spec-level operation aliases -----------------------------------------------

def poly_add(a, b):
    return a + b


def poly_mul(a, b):
    return a * b


def poly_neg(a):
    return -a


def eval_at(p, point):
    return p.eval_at(point)


def _weight_order(varnames):
    """Deterministic generic weights for the division order."""
    weights = {}
    base = 1000003
    for v in sorted(varnames):
        h = 0
        for ch in v:
            h = (h * 131 + ord(ch)) % base
        weights[v] = 1 + (h % 997)
    return weights


def _wval(m, weights):
    return sum(weights[v] * x for v, x in m.e)


def exact_div_binomial(p, den):
    """Divide p exactly by (1 - den); raises NotDivisible."""
    if den.is_unit():
        raise UnitFactor("binomial factor (1 - 1) is zero")
    if p.is_zero():
        return p
    varnames = set(p.variables()) | set(den.vars())
    weights = _weight_order(varnames)
    wden = _wval(den, weights)
    bump = 1
    while wden == 0 and bump < 100:
        # perturb deterministically until the order separates den from 1
        weights = {v: w + (bump if i % 2 == 0 else 0)
                   for i, (v, w) in enumerate(sorted(weights.items()))}
        wden = _wval(den, weights)
        bump += 1
    if wden == 0:
        raise NotDivisible(f"could not order binomial divisor {den}")

    def key(m):
        return (_wval(m, weights), m.e)

    # Arrange den < 1 in the order; otherwise use the identity
    # (1 - den) = -den * (1 - den^{-1}) and divide by the flipped factor.
    if wden > 0:
        inv = den.inv()
        shifted = LaurentPoly.__new__(LaurentPoly)
        shifted.terms = {m * inv: c for m, c in p.terms.items()}
        return -exact_div_binomial(shifted, inv)

    # den < unit: leading term of (1 - den) is 1; classic termination bound:
    # every quotient monomial lies on a den-chain anchored in supp(p), so the
    # quotient has at most len(p)*(2 + range/|w(den)|) terms.
    vals = [_wval(m, weights) for m in p.terms]
    span = max(vals) - min(vals)
    cap = len(p.terms) * (3 + span // max(1, -wden)) + 8
    rem = dict(p.terms)
    quo = {}
    steps = 0
    while rem:
        steps += 1
        if steps > cap:
            raise NotDivisible("no exact quotient by binomial")
        lead = max(rem, key=key)
        c = rem[lead]
        quo[lead] = c
        # rem -= c*lead*(1 - den)
        del rem[lead]
        m2 = lead * den
        w = rem.get(m2)
        w = c if w is None else w + c
        if w.is_zero():
            rem.pop(m2, None)
        else:
            rem[m2] = w
    return LaurentPoly(quo)


def exact_div_binomials(p, dens):
    """Divide p exactly by prod (1 - m) over m in dens.

    Raises NotDivisible when no exact Laurent-polynomial quotient exists and
    UnitFactor when some m is the unit monomial.
    """
    q = p
    for den in dens:
        q = exact_div_binomial(q, den)
    return q


# ---------------------------------------------------------------------------
# Rational functions with factored binomial denominators
# ---------------------------------------------------------------------------

class RationalFn:
    """numerator / prod over (m, k) of (1 - m)^k.

    Denominators are kept factored; equality goes through cross-multiplication
    or random evaluation, never through normal forms.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, (int, TPoly)):
            num = LaurentPoly.const(num)
        self.num = num
        dd = {}
        for item in (den or []):
            if isinstance(item, tuple):
                m, k = item
            else:
                m, k = item, 1
            if m.is_unit():
                raise UnitFactor("denominator binomial (1 - 1)")
            if k:
                dd[m] = dd.get(m, 0) + k
        self.den = {m: k for m, k in dd.items() if k != 0}

    @staticmethod
    def zero():
        return RationalFn(LaurentPoly.zero())

    def is_zero_poly(self):
        return self.num.is_zero()

    def den_items(self):
        return sorted(self.den.items(), key=lambda mk: mk[0].sort_key())

    def den_list(self):
        out = []
        for m, k in self.den_items():
            out.extend([m] * k)
        return out

    def __mul__(self, other):
        if isinstance(other, RationalFn):
            den = dict(self.den)
            for m, k in other.den.items():
                den[m] = den.get(m, 0) + k
            return RationalFn(self.num * other.num, list(den.items()))
        return RationalFn(self.num * other, list(self.den.items()))

    __rmul__ = __mul__

    def __neg__(self):
        return RationalFn(-self.num, list(self.den.items()))

    def __add__(self, other):
        if not isinstance(other, RationalFn):
            other = RationalFn(other)
        den = {}
        for m in set(self.den) | set(other.den):
            den[m] = max(self.den.get(m, 0), other.den.get(m, 0))
        a = self.num
        for m, k in den.items():
            extra = k - self.den.get(m, 0)
            for _ in range(extra):
                a = a - a * m
        b = other.num
        for m, k in den.items():
            extra = k - other.den.get(m, 0)
            for _ in range(extra):
                b = b - b * m
        return RationalFn(a + b, list(den.items()))

    def __sub__(self, other):
        return self + (-other)

    def subs_monomials(self, varmap, collapse=CollapseError):
        """Monomial specialization of numerator and denominator factors.

        Raises `collapse` when a denominator binomial maps to (1 - 1).
        """
        den = []
        for m, k in self.den.items():
            mm = m.subs(varmap)
            if mm.is_unit():
                raise collapse(f"denominator factor collapses: {m}")
            den.append((mm, k))
        return RationalFn(self.num.subs_monomials(varmap), den)

    def eval(self, point, memo=None):
        """Exact evaluation -> TRat; the point must avoid denominator zeros."""
        val = self.num.eval_at(point, memo)
        scale = Fraction(1)
        for m, k in self.den.items():
            d = 1 - m.eval(point, memo)
            if d == 0:
                raise ZeroDivisionError(f"denominator factor vanishes at point: {m}")
            scale /= d ** k
        return val * scale

    def den_vanishes_at(self, point):
        return any(m.eval(point) == 1 for m in self.den)

    def to_laurent(self):
        """Exact division of the numerator by the denominator product."""
        return exact_div_binomials(self.num, self.den_list())

    def cross_mul_equal(self, other):
        """Exact equality by clearing denominators (small instances only)."""
        a = self.num
        for m, k in other.den.items():
            extra = k - min(k, self.den.get(m, 0))
            for _ in range(extra):
                a = a - a * m
        b = other.num
        for m, k in self.den.items():
            extra = k - min(k, other.den.get(m, 0))
            for _ in range(extra):
                b = b - b * m
        return a == b

    def __str__(self):
        if not self.den:
            return self.num.to_text()
        den = " * ".join(f"(1 - {m})^{k}" if k > 1 else f"(1 - {m})"
                         for m, k in self.den_items())
        return f"[{self.num.to_text()}] / [{den}]"

    __repr__ = __str__


def random_point(variables, rng, dens=(), max_tries=500):
    """Seeded random rational point avoiding the poles of the given factors.

    Numerators and denominators are drawn from [2, 97] per the design of the
    randomized identity tests.
    """
    variables = sorted(variables)
    for _ in range(max_tries):
        point = {v: Fraction(rng.randint(2, 97), rng.randint(2, 97)) for v in variables}
        ok = True
        for m in dens:
            try:
                if m.eval(point) == 1:
                    ok = False
                    break
            except MissingVariable:
                ok = False
                break
        if ok:
            return point
    raise RuntimeError("could not find a pole-free evaluation point")


def rationals_equal(fns_a, fns_b, variables, rng, trials=3):
    """Randomized equality of two sums of RationalFn at `trials` points."""
    dens = []
    for f in list(fns_a) + list(fns_b):
        dens.extend(f.den_list())
    for _ in range(trials):
        point = random_point(variables, rng, dens)
        va = TRat()
        for f in fns_a:
            va = va + f.eval(point)
        vb = TRat()
        for f in fns_b:
            vb = vb + f.eval(point)
        if va != vb:
            return False
    return True


# ---------------------------------------------------------------------------
# Fraction-field coefficients and truncated q-series
# ---------------------------------------------------------------------------

SYMBOLIC_Z = "SYMBOLIC_Z"
EVALUATED = "EVALUATED"


class Coeff:
    """Element of the fraction field of Z[t][z^(+-1)] used as series coefficient."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, (int, TPoly)):
            num = LaurentPoly.const(num)
        if den is None:
            den = LaurentPoly.one()
        elif isinstance(den, (int, TPoly)):
            den = LaurentPoly.const(den)
        if den.is_zero():
            raise ZeroDivisionError("Coeff with zero denominator")
        if num.is_zero():
            den = LaurentPoly.one()
        else:
            num, den = _strip_common_monomial(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def zero():
        return Coeff(LaurentPoly.zero())

    @staticmethod
    def one():
        return Coeff(LaurentPoly.one())

    def is_zero(self):
        return self.num.is_zero()

    def __add__(self, other):
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            return Coeff(self.num + other.num, self.den)
        return Coeff(self.num * other.den + other.num * self.den,
                     self.den * other.den)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Coeff(-self.num, self.den)

    def __mul__(self, other):
        if isinstance(other, (int, TPoly, Monomial, LaurentPoly)):
            return Coeff(self.num * other, self.den)
        if self.is_zero() or other.is_zero():
            return Coeff.zero()
        return Coeff(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inv(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero Coeff")
        return Coeff(self.den, self.num)

    def __truediv__(self, other):
        return self * other.inv()

    def __eq__(self, other):
        if not isinstance(other, Coeff):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("Coeff is unhashable")

    def eval(self, point):
        n = self.num.eval_at(point)
        d = self.den.eval_at(point)
        if len(d.c) != 1 or 0 not in d.c:
            # symbolic t in the denominator: only unit denominators expected here
            raise NotDivisible("Coeff.eval with non-constant denominator in t")
        return n * (Fraction(1) / d.c[0])

    def __str__(self):
        if self.den.is_one():
            return self.num.to_text()
        return f"[{self.num.to_text()}] / [{self.den.to_text()}]"

    __repr__ = __str__


def _strip_common_monomial(num, den):
    """Cancel the common monomial content (units of the Laurent ring)."""
    def content(p):
        mins = {}
        first = True
        for m in p.terms:
            e = m.exps()
            if first:
                mins = dict(e)
                first = False
            else:
                for v in list(mins):
                    mins[v] = min(mins[v], e.get(v, 0))
                for v in list(mins):
                    if v not in e:
                        mins[v] = min(mins[v], 0)
        return {v: x for v, x in mins.items() if x != 0}

    cn, cd = content(num), content(den)
    common = {}
    for v in set(cn) | set(cd):
        x = min(cn.get(v, 0), cd.get(v, 0))
        if x:
            common[v] = x
    if not common:
        return num, den
    shift = Monomial({v: -x for v, x in common.items()})
    return num * shift, den * shift


class TruncatedSeries:
    """Laurent series in q truncated at a fixed order.

    coeffs maps q-exponents (possibly negative, finitely many) to Coeff.
    `order` is the largest exponent whose coefficient is exact; arithmetic
    tracks how much precision survives each operation.
    """

    __slots__ = ("order", "coeffs", "domain")

    def __init__(self, order, coeffs=None, domain=SYMBOLIC_Z):
        self.order = order
        self.domain = domain
        cc = {}
        for e, c in (coeffs or {}).items():
            if e <= order and not c.is_zero():
                cc[e] = c
        self.coeffs = cc

    @staticmethod
    def one(order, domain=SYMBOLIC_Z):
        return TruncatedSeries(order, {0: Coeff.one()}, domain)

    @staticmethod
    def zero(order, domain=SYMBOLIC_Z):
        return TruncatedSeries(order, {}, domain)

    @staticmethod
    def monomial(order, qexp, coeff, domain=SYMBOLIC_Z):
        if isinstance(coeff, (int, TPoly, LaurentPoly)):
            coeff = Coeff(coeff)
        return TruncatedSeries(order, {qexp: coeff}, domain)

    def min_deg(self):
        """First exponent that can carry a nonzero coefficient."""
        if not self.coeffs:
            return self.order + 1
        return min(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def _check(self, other):
        if self.domain != other.domain:
            raise DomainMismatch(f"{self.domain} vs {other.domain}")

    def __add__(self, other):
        self._check(other)
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            w = out.get(e)
            out[e] = c if w is None else w + c
        return TruncatedSeries(order, out, self.domain)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return TruncatedSeries(self.order, {e: -c for e, c in self.coeffs.items()},
                               self.domain)

    def scale(self, c):
        if isinstance(c, (int, TPoly, LaurentPoly)):
            c = Coeff(c)
        return TruncatedSeries(self.order,
                               {e: c * v for e, v in self.coeffs.items()}, self.domain)

    def shift(self, d):
        """Multiply by q^d."""
        return TruncatedSeries(self.order + d,
                               {e + d: c for e, c in self.coeffs.items()}, self.domain)

    def __mul__(self, other):
        self._check(other)
        ma, mb = self.min_deg(), other.min_deg()
        order = min(self.order + mb, other.order + ma)
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e > order:
                    continue
                c = c1 * c2
                w = out.get(e)
                out[e] = c if w is None else w + c
        return TruncatedSeries(order, out, self.domain)

    def invert(self):
        """Multiplicative inverse; requires an invertible lowest coefficient."""
        if self.is_zero():
            raise NonInvertibleLeadingCoefficient("series is zero to its order")
        d = self.min_deg()
        lead = self.coeffs[d]
        if lead.is_zero():
            raise NonInvertibleLeadingCoefficient("zero leading coefficient")
        n = self.order - d          # exact relative precision of the unit part
        order = n - d               # absolute precision of the inverse
        lead_inv = lead.inv()
        out = {-d: lead_inv}
        # u = q^d(lead + tail); invert the unit part by recursion on exponents
        for m in range(1, n + 1):
            acc = Coeff.zero()
            for e, c in self.coeffs.items():
                j = e - d
                if 1 <= j <= m:
                    prev = out.get(m - j - d)
                    if prev is not None:
                        acc = acc + c * prev
            if not acc.is_zero():
                out[m - d] = -(lead_inv * acc)
        return TruncatedSeries(order, out, self.domain)

    def truncate(self, order):
        if order > self.order:
            raise DomainMismatch("cannot raise order of a truncated series")
        return TruncatedSeries(order, self.coeffs, self.domain)

    def coeff(self, e):
        if e > self.order:
            raise DomainMismatch(f"coefficient q^{e} beyond order {self.order}")
        return self.coeffs.get(e, Coeff.zero())

    def equals(self, other, up_to=None):
        self._check(other)
        order = min(self.order, other.order)
        if up_to is not None:
            if up_to > order:
                raise DomainMismatch("comparison beyond exact order")
            order = up_to
        exps = {e for e in self.coeffs if e <= order} | \
               {e for e in other.coeffs if e <= order}
        return all(self.coeff(e) == other.coeff(e) for e in exps)

    def __str__(self):
        if not self.coeffs:
            return f"O(q^{self.order + 1})"
        parts = [f"[{self.coeffs[e]}]*q^{e}" for e in sorted(self.coeffs)]
        return " + ".join(parts) + f" + O(q^{self.order + 1})"

    __repr__ = __str__


def series_mul(a, b):
    if a.order != b.order:
        raise DomainMismatch("series orders differ")
    return a * b


def series_invert(a):
    return a.invert()


def split_zq(m):
    """Split a Monomial over the z-variables and q into (z-part, q-exponent)."""
    q = m.exp_of("q")
    z = Monomial({v: x for v, x in m.e if v != "q"})
    return z, q


def one_minus(order, zmono, qexp, domain=SYMBOLIC_Z, tscale=None):
    """The series (1 - c * z^.. q^qexp) with optional TPoly scale c."""
    if qexp == 0 and zmono.is_unit() and (tscale is None or tscale.is_one()):
        raise UnitFactor("factor (1 - y) with y = 1")
    c = Coeff(LaurentPoly.from_monomial(zmono, tscale if tscale is not None else T_ONE))
    if qexp == 0:
        return TruncatedSeries(order, {0: Coeff.one() - c}, domain)
    return TruncatedSeries(order, {0: Coeff.one(), qexp: -c}, domain)


def binomial_product_series(ys, order, domain=SYMBOLIC_Z):
    """Truncated product of (1 - y) over Monomials y in the (z, q) variables.

    Factors of q-degree > order are identically 1 after truncation and are
    skipped; the caller guarantees only finitely many factors of q-degree <= 0.
    """
    out = TruncatedSeries.one(order, domain)
    for y in ys:
        z, q = split_zq(y)
        if q > order and q > 0:
            continue
        out = out * one_minus(order, z, q, domain)
    return out


def evaluate_zmono(m, zpoint):
    """Map a z-monomial to a Coeff under z -> rationals (EVALUATED domain)."""
    val = m.eval(zpoint)
    return Coeff(LaurentPoly.const(val.numerator), LaurentPoly.const(val.denominator))
