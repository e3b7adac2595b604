"""Finite-dimensional weighted polyhedral engine.

Rational polyhedra are given by integer inequality systems a.x <= b (plus
equalities).  The module computes lattice points, vertex sets, face lattices,
integer-point transforms of pointed cones (via regular triangulation into
half-open simplicial pieces, so every lattice point is counted exactly once)
and weighted transforms where a weight from Z[t] is attached to every face.
All arithmetic is exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .ring import (
    LaurentPoly, Monomial, RationalFn, TPoly, TRat, T_ONE,
    random_point,
)


class Unbounded(ValueError):
    """Operation requires a bounded polyhedron."""


class NotInPolyhedron(ValueError):
    pass


class NotSimplicial(ValueError):
    pass


class NotPointed(ValueError):
    pass


class WeightMissing(KeyError):
    pass


# ---------------------------------------------------------------------------
# exact linear algebra over Q
# ---------------------------------------------------------------------------

def mat_rank(rows):
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(m)):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pr = m[rank]
        inv = 1 / pr[col]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] * inv
                m[i] = [a - f * b for a, b in zip(m[i], pr)]
        rank += 1
        if rank == len(m):
            break
    return rank


def solve_affine(rows, rhs):
    """Solve rows . x = rhs exactly.

    Returns (particular solution, nullspace basis) or None if inconsistent.
    """
    if not rows:
        raise ValueError("empty system")
    n = len(rows[0])
    aug = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(n):
        piv = None
        for i in range(r, len(aug)):
            if aug[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        pr = aug[r]
        inv = 1 / pr[col]
        aug[r] = [a * inv for a in pr]
        for i in range(len(aug)):
            if i != r and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
    for i in range(r, len(aug)):
        if aug[i][n] != 0:
            return None
    x0 = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        x0[col] = aug[i][n]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, col in enumerate(pivots):
            v[col] = -aug[i][fc]
        basis.append(v)
    return x0, basis


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def primitive(vec):
    """Primitive integer vector in the same direction."""
    den = 1
    for x in vec:
        den = den * Fraction(x).denominator // _gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for x in ints:
        g = _gcd(g, abs(x))
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(x // g for x in ints)


def smith_diagonal(rows):
    """Diagonalize an integer matrix M (k x D) of full row rank.

    Returns (diag, vinv_rows) where diag has the k nonzero diagonal entries of
    U M V and vinv_rows are the first k rows of V^{-1}; the Z-span of those
    rows is the saturation lattice of the row space of M.
    """
    k = len(rows)
    d = len(rows[0])
    a = [list(r) for r in rows]
    v = [[1 if i == j else 0 for j in range(d)] for i in range(d)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def addmul_row(dst, src, q):
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]

    def addmul_col(dst, src, q):
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    for t in range(k):
        piv = None
        best = None
        for i in range(t, k):
            for j in range(t, d):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < best):
                    best = abs(a[i][j])
                    piv = (i, j)
        if piv is None:
            raise ValueError("matrix does not have full row rank")
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            done = True
            for i in range(t + 1, k):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    addmul_row(i, t, q)
                    if a[i][t] != 0:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, d):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    addmul_col(j, t, q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        done = False
            if done:
                break
    diag = [a[i][i] for i in range(k)]
    # invert V exactly; V is unimodular so the inverse is integral
    vinv = _invert_unimodular(v)
    return diag, vinv[:k]


def _invert_unimodular(v):
    d = len(v)
    aug = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(d)]
           for i, row in enumerate(v)]
    for col in range(d):
        piv = next(i for i in range(col, d) if aug[i][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for i in range(d):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    out = []
    for i in range(d):
        row = []
        for j in range(d):
            x = aug[i][d + j]
            assert x.denominator == 1
            row.append(int(x))
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# polyhedra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Face:
    """A face identified by the set of inequalities tight on it."""
    tight: frozenset
    dim: int
    vertex_ids: frozenset = frozenset()


class Polyhedron:
    """Rational polyhedron {x : ineqs . x <= rhs, eqs . x = rhs}."""

    def __init__(self, dim, ineqs, eqs=(), labels=None):
        self.dim = dim
        self.ineqs = [(tuple(a), int(b)) for a, b in ineqs]
        self.eqs = [(tuple(a), int(b)) for a, b in eqs]
        self.labels = list(labels) if labels else [f"x{i+1}" for i in range(dim)]
        for a, _ in self.ineqs + self.eqs:
            if len(a) != dim:
                raise ValueError("coefficient vector length mismatch")

    @staticmethod
    def from_json(data):
        import json
        if isinstance(data, str):
            data = json.loads(data)
        d = data["dim"]
        ineqs = [(row[:-1], row[-1]) for row in data.get("ineqs", [])]
        eqs = [(row[:-1], row[-1]) for row in data.get("eqs", [])]
        return Polyhedron(d, ineqs, eqs, data.get("labels"))

    def contains(self, x):
        return (all(_dot(a, x) <= b for a, b in self.ineqs)
                and all(_dot(a, x) == b for a, b in self.eqs))

    def tight_at(self, x):
        if not self.contains(x):
            raise NotInPolyhedron(str(x))
        return frozenset(i for i, (a, b) in enumerate(self.ineqs)
                         if _dot(a, x) == b)

    def face_dim(self, tight):
        rows = [list(self.eqs[i][0]) for i in range(len(self.eqs))]
        rows += [list(self.ineqs[i][0]) for i in tight]
        if not rows:
            return self.dim
        return self.dim - mat_rank(rows)

    def minimal_face(self, x):
        tight = self.tight_at(x)
        return Face(tight, self.face_dim(tight))

    # -- vertices ---------------------------------------------------------

    def vertices_bruteforce(self):
        """Vertex enumeration by exhaustive tight-subset search."""
        eq_rows = [list(a) for a, _ in self.eqs]
        eq_rhs = [b for _, b in self.eqs]
        base_rank = mat_rank(eq_rows) if eq_rows else 0
        need = self.dim - base_rank
        verts = []
        seen = set()
        for subset in itertools.combinations(range(len(self.ineqs)), need):
            rows = eq_rows + [list(self.ineqs[i][0]) for i in subset]
            rhs = eq_rhs + [self.ineqs[i][1] for i in subset]
            sol = solve_affine(rows, rhs)
            if sol is None or sol[1]:
                continue
            x = tuple(sol[0])
            if x in seen or not self.contains(x):
                continue
            seen.add(x)
            verts.append(x)
        verts.sort()
        return verts

    def recession_direction_axis(self):
        """Cheap unboundedness witness: a +-coordinate recession direction."""
        for i in range(self.dim):
            for sgn in (1, -1):
                d = [0] * self.dim
                d[i] = sgn
                if all(_dot(a, d) <= 0 for a, _ in self.ineqs) and \
                   all(_dot(a, d) == 0 for a, _ in self.eqs):
                    return tuple(d)
        return None

    def lattice_points(self, assume_bounded=False):
        """All integer points, sorted; requires a bounded polyhedron."""
        if self.recession_direction_axis() is not None:
            raise Unbounded("axis recession direction found")
        verts = self.vertices_bruteforce()
        if not verts:
            return []
        if not assume_bounded and not self._bounded_check(verts):
            raise Unbounded("recession direction found")
        los = [min(v[i] for v in verts) for i in range(self.dim)]
        his = [max(v[i] for v in verts) for i in range(self.dim)]
        out = []
        rngs = [range(_ceil(lo), _floor(hi) + 1) for lo, hi in zip(los, his)]
        for x in itertools.product(*rngs):
            if self.contains(x):
                out.append(x)
        return out

    def _bounded_check(self, verts):
        # P is bounded iff its recession cone {d : Ad <= 0, Ed = 0} is {0}.
        rows = [list(a) for a, _ in self.eqs] + [list(a) for a, _ in self.ineqs]
        if mat_rank(rows) < self.dim:
            return False
        return _recession_trivial([list(a) for a, _ in self.ineqs],
                                  [list(a) for a, _ in self.eqs], self.dim)


def _dot(a, x):
    return sum(ai * xi for ai, xi in zip(a, x))


def _ceil(x):
    f = Fraction(x)
    return -((-f.numerator) // f.denominator)


def _floor(x):
    f = Fraction(x)
    return f.numerator // f.denominator


def _recession_trivial(ineq_rows, eq_rows, dim, _depth=0):
    """Decide {d : ineq.d <= 0, eq.d = 0} == {0} by Fourier-Motzkin."""
    rows = []
    for a in eq_rows:
        rows.append(list(a))
        rows.append([-x for x in a])
    rows.extend(list(a) for a in ineq_rows)
    # eliminate variables one by one; the cone is trivial iff for every
    # coordinate both d_i > 0 and d_i < 0 are infeasible
    for i in range(dim):
        for sgn in (1, -1):
            if _homog_feasible(rows, i, sgn, dim):
                return False
    return True


def _homog_feasible(rows, idx, sgn, dim):
    """Feasibility of {a.d <= 0 for all rows, d_idx = sgn} by elimination."""
    cons = [list(r) + [0] for r in rows]      # a.d <= last entry
    # substitute d_idx = sgn
    cons2 = []
    for c in cons:
        c = list(c)
        c[-1] -= c[idx] * sgn
        c[idx] = 0
        cons2.append(c)
    keep = [i for i in range(dim) if i != idx]
    return _fm_feasible(cons2, keep)


def _fm_feasible(cons, keep):
    """Fourier-Motzkin feasibility for constraints a.d <= b over vars in keep."""
    for var in keep:
        pos = [c for c in cons if c[var] > 0]
        neg = [c for c in cons if c[var] < 0]
        zero = [c for c in cons if c[var] == 0]
        new = list(zero)
        for p in pos:
            for q in neg:
                row = [p[i] * (-q[var]) + q[i] * p[var] for i in range(len(p))]
                row[var] = 0
                new.append(row)
        # dedupe to keep growth in check
        seen = set()
        cons = []
        for c in new:
            g = 0
            for x in c:
                g = _gcd(g, abs(x))
            if g:
                c = [x // g for x in c]
            key = tuple(c)
            if key not in seen:
                seen.add(key)
                cons.append(c)
    return all(c[-1] >= 0 for c in cons)


# ---------------------------------------------------------------------------
# face lattice of a bounded polyhedron
# ---------------------------------------------------------------------------

def face_lattice(P, vertices=None):
    """All faces of a bounded polyhedron, from vertex tight-set intersections.

    Returns a list of Face records (including the vertices and P itself).
    """
    if vertices is None:
        vertices = P.vertices_bruteforce()
    if not vertices:
        return []
    tights = [P.tight_at(v) for v in vertices]
    seen = {t: None for t in tights}
    frontier = list(seen)
    while frontier:
        nxt = []
        for t in frontier:
            for t2 in tights:
                u = t & t2
                if u not in seen:
                    seen[u] = None
                    nxt.append(u)
        frontier = nxt
    faces = []
    for t in seen:
        vids = frozenset(i for i, tv in enumerate(tights) if tv >= t)
        faces.append(Face(t, P.face_dim(t), vids))
    faces.sort(key=lambda f: (f.dim, sorted(f.tight)))
    return faces


def weighted_sum_bruteforce(P, phi, assume_bounded=False):
    """Sum of phi(minimal face containing a) * e^a over lattice points a."""
    total = LaurentPoly.zero()
    for pt in P.lattice_points(assume_bounded=assume_bounded):
        w = phi(P.minimal_face(pt))
        if isinstance(w, int):
            w = TPoly.const(w)
        total = total + LaurentPoly.from_monomial(_point_monomial(pt, P.labels), w)
    return total


def _point_monomial(pt, labels):
    return Monomial({lab: int(x) for lab, x in zip(labels, pt)})


# ---------------------------------------------------------------------------
# integer point transforms of pointed cones
# ---------------------------------------------------------------------------

def _choose_columns(rays):
    """Column subset on which the ray matrix has full rank."""
    k = len(rays)
    d = len(rays[0])
    cols = []
    m = [[Fraction(x) for x in r] for r in rays]
    # row-reduce tracking pivot columns
    r = 0
    mm = [row[:] for row in m]
    for col in range(d):
        piv = None
        for i in range(r, k):
            if mm[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        mm[r], mm[piv] = mm[piv], mm[r]
        inv = 1 / mm[r][col]
        mm[r] = [a * inv for a in mm[r]]
        for i in range(k):
            if i != r and mm[i][col] != 0:
                f = mm[i][col]
                mm[i] = [a - f * b for a, b in zip(mm[i], mm[r])]
        cols.append(col)
        r += 1
        if r == k:
            break
    if r < k:
        raise NotSimplicial("rays are linearly dependent")
    return cols


def parallelepiped_points(apex, rays, open_idx=frozenset()):
    """Integer points of the half-open parallelepiped apex + sum a_i r_i.

    a_i in [0,1) for closed facet directions and (0,1] for i in open_idx.
    The apex must be integral.
    """
    if any(int(x) != x for x in apex):
        raise ValueError("apex must be integral")
    k = len(rays)
    if k == 0:
        return [tuple(int(x) for x in apex)]
    diag, lat_rows = smith_diagonal([list(r) for r in rays])
    cols = _choose_columns(rays)
    sub = [[Fraction(rays[i][c]) for c in cols] for i in range(k)]
    subinv = _invert_fraction_matrix(sub)
    pts = []
    for combo in itertools.product(*[range(abs(s)) for s in diag]):
        x = [0] * len(apex)
        for ci, li in zip(combo, lat_rows):
            if ci:
                x = [a + ci * b for a, b in zip(x, li)]
        xs = [Fraction(x[c]) for c in cols]
        alpha = [sum(xs[j] * subinv[j][i] for j in range(k)) for i in range(k)]
        frac = []
        for i, a in enumerate(alpha):
            f = a - _floor(a)
            if f == 0 and i in open_idx:
                f = Fraction(1)
            frac.append(f)
        p = list(Fraction(int(x)) for x in apex)
        for f, r in zip(frac, rays):
            if f:
                p = [a + f * b for a, b in zip(p, r)]
        ip = []
        for a in p:
            assert a.denominator == 1, "parallelepiped point not integral"
            ip.append(int(a))
        pts.append(tuple(ip))
    assert len(set(pts)) == len(pts)
    return sorted(pts)


def _invert_fraction_matrix(m):
    d = len(m)
    aug = [[Fraction(x) for x in row] +
           [Fraction(1 if i == j else 0) for j in range(d)]
           for i, row in enumerate(m)]
    for col in range(d):
        piv = next(i for i in range(col, d) if aug[i][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for i in range(d):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return [row[d:] for row in aug]


def ipt_simplicial(apex, rays, labels, open_idx=frozenset()):
    """IPT of a (half-open) simplicial cone: parallelepiped numerator over
    prod (1 - e^ray)."""
    rays = [tuple(r) for r in rays]
    if rays:
        _choose_columns(rays)
    num = LaurentPoly.zero()
    for p in parallelepiped_points(apex, rays, open_idx):
        num = num + LaurentPoly.from_monomial(_point_monomial(p, labels))
    dens = [_point_monomial(r, labels) for r in rays]
    return RationalFn(num, [(m, 1) for m in dens])


def _det_nonzero(rays, subset, cols):
    sub = [[Fraction(rays[i][c]) for c in cols] for i in subset]
    return mat_rank(sub) == len(subset)


def triangulate(rays):
    """Regular triangulation of a ray list into full-rank simplicial cells.

    Deterministic: heights come from a fixed hash; degenerate height vectors
    are perturbed by retrying with a new salt.
    """
    rays = [tuple(r) for r in rays]
    m = len(rays)
    rank = mat_rank([list(r) for r in rays])
    cols = _choose_pivot_cols(rays, rank)
    proj = [[Fraction(r[c]) for c in cols] for r in rays]
    if m == rank:
        return [tuple(range(m))]
    for salt in range(64):
        heights = [Fraction(1 + ((i + 1) * 2654435761 + salt * 97003) % 1000003,
                            1 + ((i + salt) * 7919) % 503)
                   for i in range(m)]
        cells = []
        degenerate = False
        for subset in itertools.combinations(range(m), rank):
            sub = [proj[i] for i in subset]
            if mat_rank(sub) < rank:
                continue
            sol = solve_affine(sub, [heights[i] for i in subset])
            if sol is None or sol[1]:
                continue
            w = sol[0]
            ok = True
            for j in range(m):
                if j in subset:
                    continue
                val = sum(w[c] * proj[j][c] for c in range(rank))
                if val == heights[j]:
                    degenerate = True
                    ok = False
                    break
                if val > heights[j]:
                    ok = False
                    break
            if degenerate:
                break
            if ok:
                cells.append(tuple(subset))
        if not degenerate and cells:
            return cells
    raise RuntimeError("triangulation failed to find generic heights")


def _transpose(m):
    return [list(col) for col in zip(*m)]


def _choose_pivot_cols(rays, rank):
    d = len(rays[0])
    m = [[Fraction(x) for x in r] for r in rays]
    cols = []
    r = 0
    for col in range(d):
        piv = None
        for i in range(r, len(m)):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [a * inv for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        cols.append(col)
        r += 1
        if r == rank:
            break
    return cols


def half_open_cells(rays, cells):
    """Assign open facet sets so the half-open cells partition the cone."""
    rays = [tuple(r) for r in rays]
    rank = len(cells[0])
    cols = _choose_pivot_cols(rays, rank)
    proj = [[Fraction(r[c]) for c in cols] for r in rays]
    for salt in range(64):
        gen = [Fraction(1 + ((i + 2) * 40503 + salt * 131) % 9973,
                        1 + ((i + 1) * (salt + 3)) % 89)
               for i in range(len(rays))]
        y = [sum(gen[i] * proj[i][c] for i in range(len(rays)))
             for c in range(rank)]
        out = []
        ok = True
        for cell in cells:
            sub = [proj[i] for i in cell]
            sol = solve_affine(_transpose(sub), y)
            if sol is None or sol[1]:
                ok = False
                break
            beta = sol[0]
            if any(b == 0 for b in beta):
                ok = False
                break
            open_idx = frozenset(i for i, b in enumerate(beta) if b < 0)
            out.append((cell, open_idx))
        if ok:
            return out
    raise RuntimeError("half-open decomposition failed to find a generic point")


def check_pointed(rays):
    """Certify pointedness where cheaply possible; raise NotPointed on a
    definite line."""
    if not rays:
        return
    k = len(rays)
    rank = mat_rank([list(r) for r in rays])
    if rank == k:
        return
    # nonneg kernel vector => contains a line
    cols = _choose_pivot_cols(rays, rank)
    rows = _transpose([[Fraction(r[c]) for c in cols] for r in rays])
    sol = solve_affine(rows, [0] * rank)
    if sol is not None:
        for v in sol[1]:
            if all(x >= 0 for x in v) or all(x <= 0 for x in v):
                if any(x != 0 for x in v):
                    raise NotPointed("rays admit a nonnegative circuit")


def ipt_cone(apex, rays, labels):
    """IPT of a pointed cone with integral apex, as a RationalFn."""
    rays = sorted(set(tuple(r) for r in rays))
    if not rays:
        return RationalFn(LaurentPoly.from_monomial(_point_monomial(apex, labels)))
    check_pointed(rays)
    cells = triangulate(rays)
    pieces = half_open_cells(rays, cells)
    total = None
    for cell, open_idx in pieces:
        f = ipt_simplicial(apex, [rays[i] for i in cell], labels, open_idx)
        total = f if total is None else total + f
    return total


def sigma_relint_cone(apex, rays, labels, face_ray_sets=None, cache=None):
    """IPT of the relative interior, via the signed sum over face cones.

    face_ray_sets: list of (frozenset ray-ids, dim) for all faces of the cone;
    computed for simplicial cones automatically when omitted.
    """
    rays = [tuple(r) for r in rays]
    if face_ray_sets is None:
        k = len(rays)
        if mat_rank([list(r) for r in rays]) != k and k > 0:
            raise NotSimplicial("need explicit face list for non-simplicial cones")
        face_ray_sets = [(frozenset(s), len(s))
                         for m in range(k + 1)
                         for s in itertools.combinations(range(k), m)]
    dim_top = max(d for _, d in face_ray_sets)
    total = None
    for rs, d in face_ray_sets:
        sigma = _sigma_span(apex, rays, rs, labels, cache)
        sign = 1 if (dim_top - d) % 2 == 0 else -1
        term = sigma * TPoly.const(sign)
        total = term if total is None else total + term
    return total


def _sigma_span(apex, rays, ray_set, labels, cache=None):
    key = frozenset(ray_set)
    if cache is not None and key in cache:
        return cache[key]
    val = ipt_cone(apex, [rays[i] for i in ray_set], labels)
    if cache is not None:
        cache[key] = val
    return val


@dataclass
class WeightedCone:
    """Pointed cone with apex, primitive ray generators and face weights.

    faces: list of (ray_id_set, dim, weight) covering every face of the cone,
    including the apex face (empty ray set, dim 0).
    """
    apex: tuple
    rays: list
    faces: list
    labels: list

    def __post_init__(self):
        self.apex = tuple(self.apex)
        self.rays = [tuple(r) for r in self.rays]
        ids = {frozenset(rs) for rs, _, _ in self.faces}
        if frozenset() not in ids:
            raise WeightMissing("apex face weight missing")
        if frozenset(range(len(self.rays))) not in ids:
            raise WeightMissing("full cone face missing")


def ipt_weighted(cone, form="moebius"):
    """Weighted IPT via the face-coefficient (Moebius) or relint-sum form."""
    check_pointed(cone.rays)
    cache = {}
    faces = [(frozenset(rs), d, w) for rs, d, w in cone.faces]
    if form == "moebius":
        total = None
        for rs, d, _ in faces:
            coeff = TPoly.zero()
            for rs2, d2, w2 in faces:
                if rs2 >= rs:
                    sign = 1 if (d2 - d) % 2 == 0 else -1
                    coeff = coeff + (w2 if sign > 0 else -w2)
            if coeff.is_zero():
                continue
            sigma = _sigma_span(cone.apex, cone.rays, rs, cone.labels, cache)
            term = sigma * coeff
            total = term if total is None else total + term
        return total if total is not None else RationalFn.zero()
    if form == "relint":
        total = None
        for rs, d, w in faces:
            if w.is_zero():
                continue
            sub = [(rs2, d2) for rs2, d2, _ in faces if rs2 <= rs]
            sigma = sigma_relint_cone(cone.apex, cone.rays, cone.labels,
                                      face_ray_sets=sub, cache=cache)
            term = sigma * w
            total = term if total is None else total + term
        return total if total is not None else RationalFn.zero()
    raise ValueError(f"unknown form {form!r}")


def product_cone(cones):
    """Direct sum of weighted cones over disjoint variable sets."""
    apex = []
    rays = []
    labels = []
    for c in cones:
        apex.extend(c.apex)
        labels.extend(c.labels)
    dim_total = len(apex)
    pos = 0
    ray_offsets = []
    for c in cones:
        ray_offsets.append(len(rays))
        for r in c.rays:
            vec = [0] * dim_total
            for i, x in enumerate(r):
                vec[pos + i] = x
            rays.append(tuple(vec))
        pos += len(c.apex)
    faces = []
    for combo in itertools.product(*[c.faces for c in cones]):
        rs = set()
        dim = 0
        w = T_ONE
        for c_idx, (rs_c, d_c, w_c) in enumerate(combo):
            rs.update(ray_offsets[c_idx] + i for i in rs_c)
            dim += d_c
            w = w * w_c
        faces.append((frozenset(rs), dim, w))
    return WeightedCone(tuple(apex), rays, faces, labels)


# ---------------------------------------------------------------------------
# tangent cones of polytopes and the weighted Brion identity
# ---------------------------------------------------------------------------

def tangent_cone_at_vertex(P, faces, vertex_id, vertices, phi):
    """WeightedCone at a vertex of a bounded polyhedron.

    faces: output of face_lattice(P); phi: Face -> TPoly.
    """
    v = vertices[vertex_id]
    vfaces = [f for f in faces if vertex_id in f.vertex_ids]
    edges = [f for f in vfaces if f.dim == 1]
    rays = []
    edge_tights = []
    for e in edges:
        others = [vertices[i] for i in e.vertex_ids if i != vertex_id]
        assert others, "edge of a bounded polytope must have two vertices"
        rays.append(primitive([a - b for a, b in zip(others[0], v)]))
        edge_tights.append(e.tight)
    face_records = []
    for f in vfaces:
        rs = frozenset(i for i, t in enumerate(edge_tights) if t >= f.tight)
        w = phi(f)
        if isinstance(w, int):
            w = TPoly.const(w)
        face_records.append((rs, f.dim, w))
    return WeightedCone(tuple(int(x) for x in v), rays, face_records, P.labels)


def verify_weighted_brion(P, phi, trials=3, seed=0, vertices=None,
                          assume_bounded=False, form="moebius"):
    """Check S_phi(P) == sum over vertices of the weighted tangent-cone IPTs
    at `trials` random rational points."""
    import random as _random
    rng = _random.Random(seed)
    if vertices is None:
        vertices = P.vertices_bruteforce()
    if not vertices:
        raise ValueError("polyhedron has no vertices")
    brute = weighted_sum_bruteforce(P, phi, assume_bounded=assume_bounded)
    faces = face_lattice(P, vertices)
    fns = []
    for vid in range(len(vertices)):
        cone = tangent_cone_at_vertex(P, faces, vid, vertices, phi)
        fns.append(ipt_weighted(cone, form=form))
    dens = []
    for f in fns:
        dens.extend(f.den_list())
    for _ in range(trials):
        point = random_point(P.labels, rng, dens)
        lhs = brute.eval_at(point)
        rhs = TRat()
        for f in fns:
            rhs = rhs + f.eval(point)
        if lhs != rhs:
            return False
    return True
