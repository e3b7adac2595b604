"""Affine type A pipeline.

The basis-indexing objects are two-sided integer sequences with periodic
left tail, zero right tail and bounded window sums.  Their weights live in
the variables z_1, ..., z_{n-1} and q; position i of a sequence carries the
monomial z_{r(i)} q^{Q(i)} where r(i) in [1, n-1] is the representative of
i mod (n-1) and Q(i) is the matching quotient, Q(i) = floor((i-1)/(n-1)).

The module computes the basis sum side (enumeration, plane-pattern row
statistics, weights), the Weyl-sum side (truncated series over the affine
Weyl group), and the vertex decomposition (tangent-cone sections, their
truncated transforms and the closed contribution formulas).
"""

from __future__ import annotations

import itertools
import random as _random
from fractions import Fraction

from .graphs import OrdinaryGraph, t_factorial
from .graphs import ConeTransform, _DSU
from .ring import (
    Coeff, CollapseError, EVALUATED, LaurentPoly, Monomial, SYMBOLIC_Z,
    TPoly, TruncatedSeries, T_ONE, evaluate_zmono,
)


class GCollapse(CollapseError):
    """The z/q specialization sent a denominator factor to 1."""


class NoStabilization(RuntimeError):
    """Truncated cone transform failed to stabilize below the section cap."""


def zvar(r):
    return f"z{r}"


def residue(i, n):
    """Representative of i mod (n-1) in [1, n-1]."""
    return (i - 1) % (n - 1) + 1


def qshift(i, n):
    """q-exponent of position i: the quotient paired with the residue."""
    return (i - 1 - ((i - 1) % (n - 1))) // (n - 1)


class AffineWeight:
    """Dominant integral weight of the affine algebra, by fundamental
    coordinates (a_0, ..., a_{n-1}); the level is their sum."""

    def __init__(self, n, a):
        self.n = int(n)
        self.a = tuple(int(x) for x in a)
        if self.n < 2 or len(self.a) != self.n:
            raise ValueError("need n coordinates a_0..a_{n-1}")
        if any(x < 0 for x in self.a) or not any(self.a):
            raise ValueError("coordinates must be nonnegative, not all zero")
        self.k = sum(self.a)

    def finite_part(self):
        """epsilon-coordinates (lam_1, ..., lam_{n-1}, 0) of the classical part."""
        lam = [sum(self.a[i:]) for i in range(1, self.n)]
        return tuple(lam) + (0,)

    def cycle_paths(self):
        """Sizes of the path components of the cycle subgraph with edges
        {i, i+1} present when a_{i+1} = 0."""
        n = self.n
        dsu = _DSU(list(range(n)))
        for i in range(n):
            if self.a[(i + 1) % n] == 0:
                dsu.union(i, (i + 1) % n)
        sizes = sorted((len(b) for b in dsu.blocks()), reverse=True)
        return sizes

    def m_count(self):
        return len(self.cycle_paths())

    def wlambda(self):
        out = T_ONE
        for l in self.cycle_paths():
            out = out * t_factorial(l)
        return out

    def is_regular(self):
        return all(x > 0 for x in self.a)

    def __repr__(self):
        return f"AffineWeight(n={self.n}, a={self.a})"


class PiSequence:
    """Two-sided sequence with periodic left tail and zero right tail,
    stored by a finite window."""

    __slots__ = ("weight", "start", "values")

    def __init__(self, weight, start, values):
        self.weight = weight
        a, n = weight.a, weight.n
        vals = list(values)
        lo = start
        while vals and vals[0] == a[lo % n]:
            vals.pop(0)
            lo += 1
        while vals and vals[-1] == 0:
            vals.pop()
        if not vals:
            # pure tail-cut sequences: move the cut to the lowest equivalent
            # position so equal functions get equal keys
            while a[(lo - 1) % n] == 0:
                lo -= 1
        self.start = lo
        self.values = tuple(vals)

    def get(self, i):
        if i < self.start:
            return self.weight.a[i % self.weight.n]
        if i >= self.start + len(self.values):
            return 0
        return self.values[i - self.start]

    def window(self):
        return self.start, self.start + len(self.values) - 1

    def chi(self, i):
        """Sum of the n consecutive terms ending at position i."""
        return sum(self.get(j) for j in range(i - self.weight.n + 1, i + 1))

    def is_valid(self):
        lo = self.start
        hi = self.start + len(self.values)
        if any(v < 0 for v in self.values):
            return False
        for i in range(lo, hi + self.weight.n):
            if self.chi(i) > self.weight.k:
                return False
        return True

    def support_diff(self):
        """Nonzero differences against the base sequence, as {i: d_i}."""
        t0 = t0_sequence(self.weight, 0)
        lo = min(self.start, t0.start) - 1
        hi = max(self.window()[1], t0.window()[1]) + 1
        out = {}
        for i in range(lo, hi + 1):
            d = self.get(i) - t0.get(i)
            if d:
                out[i] = d
        return out

    def mu_exponent(self):
        """(z-exponent vector of length n-1, q-degree) of the weight shift."""
        n = self.weight.n
        zvec = [0] * (n - 1)
        qdeg = 0
        for i, d in self.support_diff().items():
            zvec[residue(i, n) - 1] += d
            qdeg += qshift(i, n) * d
        return tuple(zvec), qdeg

    def zq_monomial(self):
        zvec, qdeg = self.mu_exponent()
        exps = {zvar(r + 1): e for r, e in enumerate(zvec) if e}
        if qdeg:
            exps["q"] = qdeg
        return Monomial(exps)

    def is_vertex(self):
        """Every position is at zero or at a saturated window sum."""
        lo, hi = self.start, self.start + len(self.values)
        for i in range(lo - self.weight.n, hi + self.weight.n + 1):
            if self.get(i) != 0 and self.chi(i) != self.weight.k:
                return False
        return True

    def key(self):
        return (self.start, self.values)

    def __eq__(self, other):
        return self.weight.a == other.weight.a and self.key() == other.key()

    def __hash__(self):
        return hash((self.weight.a, self.key()))

    def __repr__(self):
        lo, hi = self.window()
        if not self.values:
            return "PiSequence(<base>)"
        return f"PiSequence({lo}..{hi}: {list(self.values)})"


def t0_sequence(weight, m=0):
    """The sequence with zeros above position m*n and the periodic pattern
    at and below it."""
    return PiSequence(weight, m * weight.n + 1, ())


def s_ij(A, i, j):
    """Plane-pattern entry: partial sums of the sequence against the shifted
    base."""
    weight = A.weight
    n = weight.n
    cut = i * n + j * (n - 1)
    m = i + j
    lo = min(A.start, m * n + 1) - n
    total = 0
    for l in range(lo, cut + 1):
        tm = weight.a[l % n] if l <= m * n else 0
        total += A.get(l) - tm
    for l in range(cut + 1, m * n + 1):
        total -= weight.a[l % n]
    return total


def enumerate_pi(weight, qmax):
    """All sequences with weight q-degree at most qmax.

    Depth-first over a window with an admissible bound on the remaining
    q-contribution; the window grows until the result set stabilizes, plus
    one extra growth step.
    """
    n, k, a = weight.n, weight.k, weight.a

    def collect(lo, hi):
        qcoef = {i: qshift(i, n) for i in range(lo, hi + 1)}
        base = {i: (a[i % n] if i <= 0 else 0) for i in range(lo, hi + 1)}
        # backward minimal remaining contribution per (position, suffix state)
        states = list(itertools.product(range(k + 1), repeat=n - 1))
        min_rem = [{} for _ in range(hi - lo + 2)]
        for st in states:
            min_rem[hi - lo + 1][st] = 0
        for pos in range(hi, lo - 1, -1):
            idx = pos - lo
            for st in states:
                best = None
                room = k - sum(st)
                for v in range(room + 1):
                    nxt = st[1:] + (v,) if n > 2 else (v,)
                    if n == 2:
                        nxt = (v,)
                    rem = min_rem[idx + 1].get(nxt)
                    if rem is None:
                        continue
                    val = qcoef[pos] * (v - base[pos]) + rem
                    if best is None or val < best:
                        best = val
                if best is not None:
                    min_rem[idx][st] = best
        out = []
        init = tuple(a[(lo - j) % n] for j in range(n - 1, 0, -1))
        seq = []

        def rec(pos, st, acc):
            idx = pos - lo
            rem = min_rem[idx].get(st)
            if rem is None or acc + rem > qmax:
                return
            if pos > hi:
                cand = PiSequence(weight, lo, tuple(seq))
                if cand.is_valid():
                    _, qd = cand.mu_exponent()
                    if 0 <= qd <= qmax:
                        out.append(cand)
                return
            room = k - sum(st)
            for v in range(room + 1):
                nxt = (st[1:] + (v,)) if n > 2 else (v,)
                seq.append(v)
                rec(pos + 1, nxt, acc + qcoef[pos] * (v - base[pos]))
                seq.pop()

        rec(lo, init, 0)
        return set(out)

    hi = (n - 1) * (qmax + 2) + n
    lo = -n * (qmax + 3)
    prev = None
    for _ in range(30):
        cur = collect(lo, hi)
        if prev is not None and cur == prev:
            return sorted(cur, key=lambda s: (s.mu_exponent()[1], s.key()))
        prev = cur
        lo -= n
        hi += n - 1
    raise RuntimeError("sequence window failed to stabilize")


# ---------------------------------------------------------------------------
# row statistics
# ---------------------------------------------------------------------------

def _row_values(A, i, jlo, jhi):
    return [s_ij(A, i, j) for j in range(jlo, jhi + 1)]


def d_stats(A):
    """Counts d_l of values appearing l times in row i and l-1 times in row
    i-1, over shift-class representatives 1 <= i <= n-1.

    The scan window per row pair is certified: on the left the two rows are
    equal (saturated window sums), on the right they match after an index
    shift (zero sequence entries); both ends are cut at strict drops so no
    value run straddles the boundary.
    """
    weight = A.weight
    n, k = weight.n, weight.k
    lo, hi = A.window()
    if not A.values:
        lo, hi = A.start - 1, A.start
    out = {}
    for i in range(1, n):
        # left: saturated zone once positions drop below the deviation window
        jl = (lo - n - i * n) // (n - 1) - 2
        while not (A.chi(i * n + jl * (n - 1)) == k and
                   A.chi((i - 1) * n + jl * (n - 1)) == k and
                   s_ij(A, i, jl) == s_ij(A, i - 1, jl)):
            jl -= 1
        # right: zero zone
        jr = (hi + n - i * n) // (n - 1) + 2
        while not (A.get(i * n + jr * (n - 1)) == 0 and
                   s_ij(A, i, jr) == s_ij(A, i - 1, jr + 1)):
            jr += 1
        # cut at strict drops so runs do not straddle
        while s_ij(A, i, jl - 1) == s_ij(A, i, jl):
            jl -= 1
        while s_ij(A, i, jr) == s_ij(A, i, jr + 1):
            jr += 1
        assert s_ij(A, i, jl - 1) > s_ij(A, i, jl)
        assert s_ij(A, i, jr) > s_ij(A, i, jr + 1)
        row_i = _row_values(A, i, jl, jr)
        row_up = _row_values(A, i - 1, jl, jr + 1)
        counts_i = {}
        for v in row_i:
            counts_i[v] = counts_i.get(v, 0) + 1
        counts_up = {}
        for v in row_up:
            counts_up[v] = counts_up.get(v, 0) + 1
        for v, l in counts_i.items():
            if counts_up.get(v, 0) == l - 1:
                out[l] = out.get(l, 0) + 1
    return out


def p_weight(A):
    out = T_ONE
    for l, d in sorted(d_stats(A).items()):
        out = out * (T_ONE - TPoly.t(l)) ** d
    return out


# ---------------------------------------------------------------------------
# the basis-sum side
# ---------------------------------------------------------------------------

def rhs_table(weight, qmax):
    """(q-degree, z-vector, weight polynomial) for every basis element."""
    return [(A.mu_exponent()[1], A.mu_exponent()[0], p_weight(A))
            for A in enumerate_pi(weight, qmax)]


def rhs_series(weight, qmax, domain=None, zpoint=None):
    domain = domain or (SYMBOLIC_Z if weight.n == 2 else EVALUATED)
    coeffs = {}
    for A in enumerate_pi(weight, qmax):
        zvec, qd = A.mu_exponent()
        zmono = Monomial({zvar(r + 1): e for r, e in enumerate(zvec) if e})
        if zpoint is None:
            c = Coeff(LaurentPoly.from_monomial(zmono, p_weight(A)))
        else:
            c = evaluate_zmono(zmono, zpoint) * p_weight(A)
        coeffs[qd] = coeffs.get(qd, Coeff.zero()) + c
    return TruncatedSeries(qmax, coeffs, domain)


# ---------------------------------------------------------------------------
# the Weyl-sum side
# ---------------------------------------------------------------------------

def _perm_act(sigma, vec):
    """(sigma . v)_i = v_{sigma^{-1}(i)} with sigma a tuple of images."""
    out = [0] * len(vec)
    for src, dst in enumerate(sigma):
        out[dst] = vec[src]
    return tuple(out)


def weyl_act(sigma, tau, vec, level, dcoef):
    """Action of the affine element (translation tau) o (permutation sigma)
    on a weight given by epsilon-coordinates, level and delta-coefficient."""
    v = _perm_act(sigma, vec)
    v2 = tuple(x + level * t for x, t in zip(v, tau))
    pairing = sum(x * t for x, t in zip(v, tau))
    norm2 = sum(t * t for t in tau)
    assert (level * norm2) % 2 == 0
    d2 = dcoef - pairing - level * norm2 // 2
    return v2, level, d2


def zq_of_shift(u, qexp):
    """Monomial of e^xi for xi with finite epsilon-part u and q-degree qexp.

    The z-exponent of z_r is u_{r+1}; this realization mirrors the sign
    convention of the finite-case specialization.
    """
    exps = {}
    for r in range(1, len(u)):
        if u[r]:
            exps[zvar(r)] = u[r]
    if qexp:
        exps["q"] = qexp
    return Monomial(exps)


def finite_roots(n):
    """(i, j) for the root e_i - e_j, i != j (positive when i < j)."""
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def weyl_elements(weight, qmax):
    """All (sigma, tau, shift monomial, qdeg) with weight q-shift <= qmax."""
    n, k = weight.n, weight.k
    lam = weight.finite_part()
    lam_max = max(lam)
    out = []
    bound = 1
    while k * bound * bound - 2 * lam_max * n * bound <= 2 * qmax:
        bound += 1
    for tau in _zero_sum_vectors(n, bound):
        norm2 = sum(t * t for t in tau)
        for sigma in itertools.permutations(range(n)):
            v = _perm_act(sigma, lam)
            qdeg = sum(x * t for x, t in zip(v, tau)) + k * norm2 // 2
            if 0 <= qdeg <= qmax:
                u = tuple(x + k * t - l for x, t, l in zip(v, tau, lam))
                out.append((sigma, tau, zq_of_shift(u, qdeg), qdeg))
    return out


def _zero_sum_vectors(n, bound):
    rng = range(-bound, bound + 1)
    for head in itertools.product(rng, repeat=n - 1):
        tail = -sum(head)
        if -bound <= tail <= bound:
            yield head + (tail,)


def flip_set(weight, sigma, tau, qmax):
    """Positive real roots sent to negative ones by the element's inverse.

    Returns the flipped targets as pairs ((i, j), m) for the root
    e_i - e_j + m delta.
    """
    n = weight.n
    inv_sigma = [0] * n
    for src, dst in enumerate(sigma):
        inv_sigma[dst] = src
    tau_inv = tuple(-x for x in _perm_act(tuple(inv_sigma), tau))
    flips = set()
    for (i, j) in finite_roots(n):
        # w^{-1}(e_i - e_j + m delta) = e_i' - e_j' + (m - <sigma' a, tau'>) d
        i2, j2 = inv_sigma[i], inv_sigma[j]
        shift = tau_inv[i2] - tau_inv[j2]
        m0 = 0 if i < j else 1
        # negative iff m' < 0, or m' = 0 with i2 > j2
        upper = shift - 1 if not (i2 > j2) else shift
        for m in range(m0, upper + 1):
            if m - shift < 0 or (m - shift == 0 and i2 > j2):
                flips.add(((i, j), m))
    return flips


def _root_monomial(n, i, j, m):
    """Realization of e^{-(e_i - e_j + m delta)}."""
    u = [0] * n
    u[i] -= 1
    u[j] += 1
    return zq_of_shift(tuple(u), m)


def _mono_coeff(mono, zpoint):
    from .ring import split_zq
    z, q = split_zq(mono)
    if zpoint is None:
        return Coeff(LaurentPoly.from_monomial(z)), q
    return evaluate_zmono(z, zpoint), q


def _factor_series(order, domain, mono, zpoint, kind):
    """(1 - t y), (t - y) or (1 - y) as a truncated series."""
    c, q = _mono_coeff(mono, zpoint)
    t = Coeff(TPoly.t())
    if kind == "one_minus_ty":
        c0, cq = Coeff.one(), -(t * c)
    elif kind == "t_minus_y":
        c0, cq = t, -c
    else:
        c0, cq = Coeff.one(), -c
    if q == 0:
        return TruncatedSeries(order, {0: c0 + cq}, domain)
    return TruncatedSeries(order, {0: c0, q: cq}, domain)


def lhs_series(weight, qmax, domain=None, zpoint=None):
    """W_lam(t) P_lam e^{-lam} truncated: the symmetrized sum over the common
    denominator, then divided by it as a series."""
    n = weight.n
    domain = domain or (SYMBOLIC_Z if n == 2 else EVALUATED)
    if domain == SYMBOLIC_Z and n != 2:
        raise ValueError("symbolic z-coefficients only for n = 2")
    pos_real = [((i, j), m)
                for (i, j) in finite_roots(n)
                for m in range((0 if i < j else 1), qmax + 1)]
    total = None
    for sigma, tau, shift_mono, qdeg in weyl_elements(weight, qmax):
        flips = flip_set(weight, sigma, tau, qmax)
        c, q = _mono_coeff(shift_mono, zpoint)
        # flipped factors beyond the truncation still contribute their
        # constant term t
        deep = sum(1 for (_, m) in flips if m > qmax)
        if deep:
            c = c * TPoly.t(deep)
        term = TruncatedSeries(qmax, {q: c}, domain)
        for (i, j), m in pos_real:
            mono = _root_monomial(n, i, j, m)
            kind = "t_minus_y" if ((i, j), m) in flips else "one_minus_ty"
            term = term * _factor_series(qmax, domain, mono, zpoint, kind)
        for m in range(1, qmax + 1):
            im = TruncatedSeries(qmax, {0: Coeff.one(), m: Coeff(-TPoly.t())},
                                 domain)
            for _ in range(n - 1):
                term = term * im
        total = term if total is None else total + term
    den = TruncatedSeries.one(qmax, domain)
    for (i, j), m in pos_real:
        mono = _root_monomial(n, i, j, m)
        den = den * _factor_series(qmax, domain, mono, zpoint, "one_minus_y")
    for m in range(1, qmax + 1):
        im = TruncatedSeries(qmax, {0: Coeff.one(), m: -Coeff.one()}, domain)
        for _ in range(n - 1):
            den = den * im
    out = total * den.invert()
    assert out.order >= qmax, "precision loss in the series division"
    return out.truncate(qmax)


def verify_main(weight, qmax, domain=None, trials=3, seed=0):
    """W_lam(t) * rhs = lhs coefficient by coefficient up to q^qmax."""
    n = weight.n
    domain = domain or (SYMBOLIC_Z if n == 2 else EVALUATED)
    wl = weight.wlambda()
    if domain == SYMBOLIC_Z:
        lhs = lhs_series(weight, qmax, domain)
        rhs = rhs_series(weight, qmax, domain).scale(wl)
        return lhs.equals(rhs, up_to=qmax)
    rng = _random.Random(seed)
    for _ in range(trials):
        zpoint = {zvar(r): Fraction(rng.randint(2, 97), rng.randint(2, 97))
                  for r in range(1, n)}
        lhs = lhs_series(weight, qmax, domain, zpoint)
        rhs = rhs_series(weight, qmax, domain, zpoint).scale(wl)
        if not lhs.equals(rhs, up_to=qmax):
            return False
    return True


# ---------------------------------------------------------------------------
# vertex machinery
# ---------------------------------------------------------------------------

class DeltaGraph:
    """Embedded equality graph of a vertex, one lattice vertex per position.

    Positions p carry edges to p-1 (when the sequence vanishes there) and to
    p-n (when the window sum saturates); components are embedded into the
    lattice with rows consistent with both edge types, one representative
    per shift class.
    """

    def __init__(self, weight, v, span, require_vertex=True):
        self.weight = weight
        self.v = v
        n = weight.n
        lo, hi = v.window()
        if not v.values:
            lo, hi = v.start - 1, v.start
        self.p0 = min(lo, -1) - n * (span + 3) - n * n
        self.p1 = max(hi, 1) + n * (span + 3) + n * n
        rng = range(self.p0, self.p1 + 1)
        self.ur = {p: v.get(p) == 0 for p in rng}          # edge p ~ p-1
        self.ul = {p: v.chi(p) == weight.k for p in rng}   # edge p ~ p-n
        if require_vertex:
            for p in rng:
                assert self.ur[p] or self.ul[p], "not a vertex of the polyhedron"
        dsu = _DSU(list(rng))
        for p in rng:
            if self.ur[p] and p - 1 >= self.p0:
                dsu.union(p, p - 1)
            if self.ul[p] and p - n >= self.p0:
                dsu.union(p, p - n)
        comp_of = {p: dsu.find(p) for p in rng}
        labels = {}
        for p in rng:
            labels.setdefault(comp_of[p], len(labels))
        self.comp = {p: labels[comp_of[p]] for p in rng}
        self.m = len(labels)
        if require_vertex:
            assert self.m == weight.m_count(), \
                f"component count {self.m} != m(lambda) = {weight.m_count()}"
        # embed rows: both edge types point one row up; anchor every
        # component at its member closest to the origin, at the row of the
        # matching residue class nearest zero
        self.row = {}
        members = {}
        for p in rng:
            members.setdefault(self.comp[p], []).append(p)
        for ps in members.values():
            anchor = min(ps, key=abs)
            if n > 2:
                r0 = anchor % (n - 1)
                if r0 > (n - 1) // 2:
                    r0 -= n - 1
            else:
                r0 = 0
            stack = [(anchor, r0)]
            while stack:
                q, r = stack.pop()
                if q in self.row:
                    assert self.row[q] == r, "inconsistent embedding"
                    continue
                self.row[q] = r
                if self.ur.get(q) and q - 1 >= self.p0:
                    stack.append((q - 1, r - 1))
                if self.ul.get(q) and q - n >= self.p0:
                    stack.append((q - n, r - 1))
                if self.ur.get(q + 1) and q + 1 <= self.p1:
                    stack.append((q + 1, r + 1))
                if self.ul.get(q + n) and q + n <= self.p1:
                    stack.append((q + n, r + 1))
        for p in rng:
            if n > 2:
                assert (p - self.row[p]) % (n - 1) == 0
        self.col = {p: (p - self.row[p] * n) // (n - 1) for p in rng}
        for p in rng:
            assert self.row[p] * n + self.col[p] * (n - 1) == p
        self.lmin = self._section_floor() if require_vertex else None

    def _section_floor(self):
        """Smallest valid section radius: single vertex per bottom row,
        stable per-component counts in the top rows, and index signs aligned
        with the rows."""
        n = self.weight.n
        safe = (min(-self.p0, self.p1) - 2 * n * n) // n
        assert safe >= 2, "index range too small"
        by_row = {}
        for p in range(self.p0, self.p1 + 1):
            r = self.row[p]
            if -safe <= r <= safe:
                by_row.setdefault(r, []).append(p)
        paths = sorted(self.weight.cycle_paths(), reverse=True)
        for m in range(1, safe):
            ok = True
            for r in range(m, safe + 1):
                if len(by_row.get(r, [])) != 1 or any(p < 1 for p in by_row[r]):
                    ok = False
                    break
            if ok:
                for r in range(-safe, -m + 1):
                    counts = sorted((sum(1 for p in by_row.get(r, [])
                                         if self.comp[p] == c)
                                     for c in range(self.m)), reverse=True)
                    if counts != paths or any(p > 0 for p in by_row[r]):
                        ok = False
                        break
            if ok:
                return m
        raise RuntimeError("no valid section radius found")

    def vertices_in_rows(self, rlo, rhi):
        return [p for p in range(self.p0, self.p1 + 1)
                if rlo <= self.row[p] <= rhi]

    def section_graphs(self, l):
        """Per component: the ordinary graph of rows [-l, l] and its s-value."""
        assert l >= self.lmin
        comps = {}
        for p in self.vertices_in_rows(-l, l):
            comps.setdefault(self.comp[p], []).append(p)
        out = []
        for label in sorted(comps):
            ps = comps[label]
            verts = [(self.row[p], self.col[p]) for p in ps]
            G = OrdinaryGraph(verts)
            top = [p for p in ps if self.row[p] == -l]
            assert top, "component does not reach the top of the section"
            b = s_ij(self.v, -l, self.col[top[0]])
            for p in top[1:]:
                assert s_ij(self.v, -l, self.col[p]) == b
            out.append((G, b))
        return out

    def gw_map(self, l):
        """Monomial images of the section coordinates under the weight
        specialization, in relative (vertex-shifted) coordinates."""
        from .graphs import svar
        n = self.weight.n
        window = self.vertices_in_rows(-l + 1, l)
        bottom = [p for p in window if self.row[p] == l]
        assert len(bottom) == 1
        ccount = sum(1 for p in window
                     if self.row[p] < l and p >= 1 and p % (n - 1) == 0)
        out = {}
        for p in window:
            i = self.row[p]
            exps = {}
            r1 = residue(i, n)
            exps[zvar(r1)] = exps.get(zvar(r1), 0) + 1
            if i < l:
                r2 = residue(i + 1, n)
                exps[zvar(r2)] = exps.get(zvar(r2), 0) - 1
                if p % (n - 1) == 0:
                    exps["q"] = -1
            elif ccount:
                exps["q"] = ccount
            out[svar((i, self.col[p]))] = Monomial(
                {k: e for k, e in exps.items() if e})
        # fixed top rows never appear in the relative transform
        for p in self.vertices_in_rows(-l, -l):
            out[svar((self.row[p], self.col[p]))] = Monomial.unit()
        return out

    def apex_monomial(self):
        return self.v.zq_monomial()


def tau_section(dgraph, l, order, domain, zpoint=None):
    """Truncated series of the weighted transform of one finite section."""
    gmap = dgraph.gw_map(l)
    total = TruncatedSeries.one(order, domain)
    for G, _b in dgraph.section_graphs(l):
        ct = ConeTransform.of_cone(G, 0).subs_monomials(gmap, GCollapse)
        total = total * ct.series_unit(order, domain, zpoint)
    apex = dgraph.apex_monomial()
    from .ring import split_zq
    z, q = split_zq(apex)
    assert q >= 0, "vertex weight shift must have nonnegative q-degree"
    if zpoint is None:
        c = Coeff(LaurentPoly.from_monomial(z))
    else:
        c = evaluate_zmono(z, zpoint)
    out = total.scale(c)
    if q:
        out = out.shift(q).truncate(order)
    return out


def tau_truncated(weight, v, order, domain=None, zpoint=None, max_steps=12):
    """Stabilized truncated transform of a vertex: sections grow until two
    consecutive ones agree up to the order."""
    domain = domain or (SYMBOLIC_Z if weight.n == 2 else EVALUATED)
    dg = DeltaGraph(weight, v, span=max_steps + 4)
    prev = None
    for l in range(dg.lmin, dg.lmin + max_steps):
        cur = tau_section(dg, l, order, domain, zpoint)
        if prev is not None and cur.equals(prev, up_to=order):
            return cur
        prev = cur
    raise NoStabilization(f"no agreement below section cap for {v}")


def _weyl_term_series(weight, sigma, tau, shift_mono, qmax, domain, zpoint):
    n = weight.n
    pos_real = [((i, j), m)
                for (i, j) in finite_roots(n)
                for m in range((0 if i < j else 1), qmax + 1)]
    flips = flip_set(weight, sigma, tau, qmax)
    c, q = _mono_coeff(shift_mono, zpoint)
    deep = sum(1 for (_, m) in flips if m > qmax)
    if deep:
        c = c * TPoly.t(deep)
    term = TruncatedSeries(qmax, {q: c}, domain)
    for (i, j), m in pos_real:
        mono = _root_monomial(n, i, j, m)
        kind = "t_minus_y" if ((i, j), m) in flips else "one_minus_ty"
        term = term * _factor_series(qmax, domain, mono, zpoint, kind)
    for m in range(1, qmax + 1):
        im = TruncatedSeries(qmax, {0: Coeff.one(), m: Coeff(-TPoly.t())}, domain)
        for _ in range(n - 1):
            term = term * im
    return term


def _den_series(weight, qmax, domain, zpoint):
    n = weight.n
    den = TruncatedSeries.one(qmax, domain)
    for (i, j) in finite_roots(n):
        for m in range((0 if i < j else 1), qmax + 1):
            mono = _root_monomial(n, i, j, m)
            den = den * _factor_series(qmax, domain, mono, zpoint, "one_minus_y")
    for m in range(1, qmax + 1):
        im = TruncatedSeries(qmax, {0: Coeff.one(), m: -Coeff.one()}, domain)
        for _ in range(n - 1):
            den = den * im
    return den


def closed_form_contribution(weight, sigma, tau, qmax, domain=None,
                             zpoint=None):
    """Contribution of one group element: shifted flipped root factors over
    the common denominator."""
    domain = domain or (SYMBOLIC_Z if weight.n == 2 else EVALUATED)
    lam = weight.finite_part()
    v = _perm_act(sigma, lam)
    norm2 = sum(t * t for t in tau)
    qdeg = sum(x * t for x, t in zip(v, tau)) + weight.k * norm2 // 2
    u = tuple(x + weight.k * t - l for x, t, l in zip(v, tau, lam))
    shift_mono = zq_of_shift(u, qdeg)
    term = _weyl_term_series(weight, sigma, tau, shift_mono, qmax, domain,
                             zpoint)
    out = term * _den_series(weight, qmax, domain, zpoint).invert()
    assert out.order >= qmax
    return out.truncate(qmax)


# ---------------------------------------------------------------------------
# relevant vertices
# ---------------------------------------------------------------------------

def vertex_from_cuts(weight, cuts):
    """Vertex determined by per-residue-class cut positions: the indicator is
    1 at positions <= the class cut and 0 above it; saturated window sums
    where the indicator holds, zero entries where it does not."""
    n, k = weight.n, weight.k
    byres = {r: c for r, c in zip(range(1, n), cuts)}
    for r, c in byres.items():
        assert (c - r) % (n - 1) == 0

    def y(l):
        r = residue(l, n)
        return 1 if l <= byres[r] else 0

    lo = min(cuts) - 3 * n
    hi = max(cuts) + 3 * n
    vals = {}

    def get(l):
        if l < lo:
            return weight.a[l % n]
        return vals.get(l, 0)

    for l in range(lo, hi + 1):
        if y(l) == 0:
            vals[l] = 0
        else:
            vals[l] = k - sum(get(j) for j in range(l - n + 1, l))
            if vals[l] < 0:
                return None
    seq = PiSequence(weight, lo, tuple(vals[l] for l in range(lo, hi + 1)))
    if not seq.is_valid() or not seq.is_vertex():
        return None
    return seq


def vertices_relevant(weight, qmax):
    """Relevant vertices with weight q-degree at most qmax, with their cut
    fibers (several parametrizations can share a vertex for singular
    weights).  Returns {vertex: [cut tuples]}."""
    n = weight.n
    out = {}
    reach = 2
    prev_keys = None
    while True:
        found = {}
        spans = [range(r - reach * (n - 1) * n, r + reach * (n - 1) * n + 1,
                       n - 1) for r in range(1, n)]
        for cuts in itertools.product(*spans):
            v = vertex_from_cuts(weight, cuts)
            if v is None:
                continue
            _, qd = v.mu_exponent()
            if 0 <= qd <= qmax:
                found.setdefault(v, []).append(cuts)
        keys = set(found)
        if prev_keys is not None and keys == prev_keys:
            out = found
            break
        prev_keys = keys
        reach += 1
        if reach > 8:
            raise RuntimeError("relevant vertex window failed to stabilize")
    return out


def match_weyl_element(weight, v, qmax):
    """The group element whose weight shift matches the vertex weight."""
    target = v.mu_exponent()
    hits = []
    for sigma, tau, mono, qdeg in weyl_elements(weight, qmax):
        zvec = tuple(mono.exp_of(zvar(r)) for r in range(1, weight.n))
        if (zvec, qdeg) == target:
            hits.append((sigma, tau))
    return hits


def verify_contrib(weight, qmax, trials=2, seed=0, nonrelevant_extra=1):
    """Check the vertex contribution theorem at the given truncation.

    (a) every relevant vertex's stabilized transform equals the closed
        contribution of its group element (regular weight) or the
        factorial-scaled aggregation over the auxiliary regular weight
        (singular weight);
    (b) constructed non-relevant vertices give zero;
    (c) the relevant transforms sum to the Weyl-side series.
    """
    n = weight.n
    domain = SYMBOLIC_Z if n == 2 else EVALUATED
    rng = _random.Random(seed)
    report = {"ok": True, "checks": [], "failures": []}

    def points():
        if domain == SYMBOLIC_Z:
            return [None]
        return [{zvar(r): Fraction(rng.randint(2, 97), rng.randint(2, 97))
                 for r in range(1, n)} for _ in range(trials)]

    relevant = vertices_relevant(weight, qmax)
    taus = {}
    for zpoint in points():
        for v in relevant:
            taus[v] = tau_truncated(weight, v, qmax, domain, zpoint)
        if weight.is_regular():
            for v, tau in taus.items():
                hits = match_weyl_element(weight, v, qmax)
                if len(hits) != 1:
                    report["ok"] = False
                    report["failures"].append(f"vertex {v}: {len(hits)} elements")
                    continue
                closed = closed_form_contribution(weight, hits[0][0],
                                                  hits[0][1], qmax, domain,
                                                  zpoint)
                if not tau.equals(closed, up_to=qmax):
                    report["ok"] = False
                    report["failures"].append(f"closed form mismatch at {v}")
            report["checks"].append(f"{len(taus)} closed forms")
        else:
            aux = AffineWeight(n, [x + 1 for x in weight.a])
            wl = weight.wlambda()
            for v, fiber in relevant.items():
                shifts = []
                for cuts in fiber:
                    v1 = vertex_from_cuts(aux, cuts)
                    assert v1 is not None
                    shift = v.zq_monomial() * v1.zq_monomial().inv()
                    shifts.append((v1, _mono_coeff(shift, zpoint)))
                headroom = max(0, max(-q for _, (_, q) in shifts))
                agg = TruncatedSeries.zero(qmax, domain)
                for v1, (c, q) in shifts:
                    tau1 = tau_truncated(aux, v1, qmax + headroom, domain,
                                         zpoint)
                    agg = agg + tau1.scale(c).shift(q).truncate(qmax)
                agg = agg.scale(Coeff(LaurentPoly.one(),
                                      LaurentPoly.const(wl)))
                if not taus[v].equals(agg, up_to=qmax):
                    report["ok"] = False
                    report["failures"].append(f"aggregation mismatch at {v}")
            report["checks"].append(f"{len(taus)} fiber aggregations")
        # (b) constructed non-relevant vertices vanish
        zeros = 0
        for v in nonrelevant_vertices(weight, 3):
            tau = tau_truncated(weight, v, qmax + nonrelevant_extra, domain,
                                zpoint)
            if not tau.equals(TruncatedSeries.zero(qmax + nonrelevant_extra,
                                                   domain),
                              up_to=qmax + nonrelevant_extra):
                report["ok"] = False
                report["failures"].append(f"nonzero irrelevant vertex {v}")
            zeros += 1
        report["checks"].append(f"{zeros} irrelevant vertices vanish")
        # (c) the relevant transforms sum to the Weyl side
        total = TruncatedSeries.zero(qmax, domain)
        for tau in taus.values():
            total = total + tau
        lhs = lhs_series(weight, qmax, domain, zpoint)
        if not total.scale(weight.wlambda()).equals(lhs, up_to=qmax):
            report["ok"] = False
            report["failures"].append("vertex sum != Weyl sum")
        else:
            report["checks"].append("vertex sum matches Weyl sum")
    return report


def is_relevant_vertex(weight, v, span=8):
    """No equality-graph component gains vertices from one row to the next."""
    dg = DeltaGraph(weight, v, span)
    safe = (min(-dg.p0, dg.p1) - 2 * weight.n ** 2) // weight.n
    counts = {}
    for p in range(dg.p0, dg.p1 + 1):
        r = dg.row[p]
        if -safe <= r <= safe:
            counts.setdefault(dg.comp[p], {}).setdefault(r, 0)
            counts[dg.comp[p]][r] += 1
    for rows in counts.values():
        for r, c in rows.items():
            if -safe < r <= safe and c > rows.get(r - 1, 0):
                return False
    return True


def nonrelevant_vertices(weight, count):
    """Vertices with an isolated saturated entry above a vanishing one."""
    n, k = weight.n, weight.k
    out = []
    gap = 1
    while len(out) < count and gap < count + 8:
        # periodic tail up to 0, then `gap` zeros, then the full level once
        vals = [0] * gap + [k] + [0] * (n - 1)
        seq = PiSequence(weight, 1, tuple(vals))
        if seq.is_valid() and seq.is_vertex() and \
                not is_relevant_vertex(weight, seq):
            out.append(seq)
        gap += 1
    assert len(out) == count, "could not construct enough irrelevant vertices"
    return out


def apply_G(weight, exps):
    """Sequence-space specialization: position i carries z_{r(i)} q^{Q(i)}."""
    n = weight.n
    out = {}
    for i, e in exps.items():
        if not e:
            continue
        r = zvar(residue(i, n))
        out[r] = out.get(r, 0) + e
        q = qshift(i, n)
        if q:
            out["q"] = out.get("q", 0) + q * e
    return Monomial({k: v for k, v in out.items() if v})


def dl_cone(weight, v, l=None, span=10):
    """Factored finite section of a vertex cone: (graph, value) per component."""
    dg = DeltaGraph(weight, v, span)
    if l is None:
        l = dg.lmin
    assert l >= dg.lmin
    return dg.section_graphs(l)


def p_weight_via_delta(weight, A, span=8):
    """Face weight of a point computed from its equality-graph components.

    Independent of the row-value-run route: the weight is read off from the
    per-row vertex counts of the component representatives, so it manifestly
    depends only on the set of tight constraints at the point.
    """
    dg = DeltaGraph(weight, A, span, require_vertex=False)
    n = weight.n
    safe = (min(-dg.p0, dg.p1) - 2 * n * n) // n
    counts = {}
    for p in range(dg.p0, dg.p1 + 1):
        r = dg.row[p]
        if -safe - n <= r <= safe + n:
            counts.setdefault(dg.comp[p], {}).setdefault(r, 0)
            counts[dg.comp[p]][r] += 1
    out = T_ONE
    for rows in counts.values():
        # stability at the scan boundary: the contributing row pairs must
        # lie well inside the window
        for r in range(-safe, safe + 1):
            l = rows.get(r, 0)
            if l and rows.get(r - 1, 0) == l - 1:
                assert -safe < r, "unstable top boundary in face weight scan"
                out = out * (T_ONE - TPoly.t(l))
    return out
