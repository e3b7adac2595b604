"""Ordinary subgraphs of the rotated square lattice and their polyhedra.

Vertices of the lattice are pairs (i, j); the two neighbours above (i, j)
are (i-1, j) (upper left) and (i-1, j+1) (upper right).  An ordinary graph
together with a nonincreasing integer sequence b on its top row defines a
polyhedron cut out by the interlacing inequalities along edges; faces of
that polyhedron are encoded by subgraphs, and every face carries a weight
in Z[t] counted from row patterns of the subgraph's components.
"""

from __future__ import annotations

import itertools
from .cones import Polyhedron, WeightedCone, ipt_weighted
from .ring import (
    CollapseError, LaurentPoly, Monomial, RationalFn, TPoly, TRat, T_ONE,
    random_point,
)


class NotConnected(ValueError):
    pass


class NotClosedDown(ValueError):
    """Violation of the lower diamond-completion rule."""


class NotClosedUp(ValueError):
    """Violation of the upper diamond-completion rule."""


class FCollapse(CollapseError):
    """The x-specialization sent a denominator binomial to 1."""


def svar(v):
    i, j = v
    return f"s({i},{j})"


def xvar(i):
    return f"x{i}"


class OrdinaryGraph:
    """Validated ordinary subgraph of the lattice."""

    def __init__(self, vertices):
        vs = frozenset((int(i), int(j)) for i, j in vertices)
        if not vs:
            raise ValueError("empty vertex set")
        self.vertices = vs
        rows = {}
        for i, j in vs:
            rows.setdefault(i, []).append(j)
        for i in rows:
            rows[i].sort()
        self.rows = rows
        self.a = min(rows)
        self.d = max(rows)
        self.top = [(self.a, j) for j in rows[self.a]]
        self.l = len(self.top)
        self._validate()
        edges = []
        for (i, j) in sorted(vs):
            if (i - 1, j) in vs:
                edges.append(((i - 1, j), (i, j)))      # upper-left >= lower
            if (i - 1, j + 1) in vs:
                edges.append(((i, j), (i - 1, j + 1)))  # lower >= upper-right
        self.edges = edges                               # (hi, lo) pairs
        self._adj = {v: [] for v in vs}
        for hi, lo in edges:
            self._adj[hi].append(lo)
            self._adj[lo].append(hi)
        # same-row pairs with their forced diamond completions
        self.row_pairs = []
        for (i, j) in sorted(vs):
            if (i, j + 1) in vs:
                above = (i - 1, j + 1) if i > self.a else None
                self.row_pairs.append(((i, j), (i, j + 1), (i + 1, j), above))

    def _validate(self):
        vs = self.vertices
        for (i, j) in vs:
            if (i, j + 1) in vs:
                if (i + 1, j) not in vs:
                    raise NotClosedDown(f"pair ({i},{j}),({i},{j+1}) misses ({i+1},{j})")
                if i > self.a and (i - 1, j + 1) not in vs:
                    raise NotClosedUp(f"pair ({i},{j}),({i},{j+1}) misses ({i-1},{j+1})")
        seen = set()
        stack = [next(iter(vs))]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            i, j = v
            for u in ((i - 1, j), (i - 1, j + 1), (i + 1, j - 1), (i + 1, j)):
                if u in vs and u not in seen:
                    stack.append(u)
        if seen != vs:
            raise NotConnected("graph is not connected")
        assert len(self.rows[self.d]) == 1, "last row must hold one vertex"

    def signature(self):
        return tuple(sorted(self.vertices))

    def row_counts(self):
        return {i: len(js) for i, js in self.rows.items()}

    def violates_row_monotonicity(self):
        """True when some row i >= a has fewer vertices than row i+1."""
        rc = self.row_counts()
        return any(rc.get(i + 1, 0) > rc.get(i, 0) for i in range(self.a, self.d))

    def to_json(self):
        import json
        return json.dumps(sorted(self.vertices))

    @staticmethod
    def from_json(data):
        import json
        if isinstance(data, str):
            data = json.loads(data)
        return OrdinaryGraph([tuple(v) for v in data])

    def __repr__(self):
        return f"OrdinaryGraph({sorted(self.vertices)})"


def check_ordinary(vertices):
    return OrdinaryGraph(vertices)


def triangle_graph(n):
    """The graph whose polyhedra are the classical interlacing polytopes."""
    return OrdinaryGraph([(i, j) for i in range(n) for j in range(1, n - i + 1)])


class BSeq:
    def __init__(self, values):
        self.values = tuple(int(v) for v in values)
        if any(a < b for a, b in zip(self.values, self.values[1:])):
            raise ValueError("b must be nonincreasing")

    def run_lengths(self):
        out = []
        for v, grp in itertools.groupby(self.values):
            out.append(len(list(grp)))
        return out

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)


# ---------------------------------------------------------------------------
# face subgraphs
# ---------------------------------------------------------------------------

class FaceSubgraph:
    """A face of D_Gamma(b), stored as the partition into components."""

    __slots__ = ("graph", "blocks", "_block_of")

    def __init__(self, graph, blocks):
        self.graph = graph
        self.blocks = tuple(sorted((frozenset(b) for b in blocks),
                                   key=lambda s: min(s)))
        self._block_of = {}
        for bi, blk in enumerate(self.blocks):
            for v in blk:
                self._block_of[v] = bi

    def block_of(self, v):
        return self._block_of[v]

    def same_block(self, u, v):
        return self._block_of[u] == self._block_of[v]

    def edge_set(self):
        return frozenset((hi, lo) for hi, lo in self.graph.edges
                         if self.same_block(hi, lo))

    @property
    def dim(self):
        top = set(self.graph.top)
        return sum(1 for blk in self.blocks if not (blk & top))

    def phi(self):
        """prod (1 - t^l)^{d_l} from component row counts."""
        out = T_ONE
        a = self.graph.a
        for blk in self.blocks:
            counts = {}
            for (i, _) in blk:
                counts[i] = counts.get(i, 0) + 1
            for i, l in counts.items():
                if i > a and counts.get(i - 1, 0) == l - 1:
                    out = out * (T_ONE - TPoly.t(l))
        return out

    def top_values(self, b):
        """Value carried by each block that meets the top row, as a dict."""
        vals = {}
        for idx, (i, j) in enumerate(self.graph.top):
            vals[self.block_of((i, j))] = b[idx]
        return vals

    def vertex_coordinates(self, b):
        """Coordinates of a 0-dimensional face."""
        assert self.dim == 0
        vals = self.top_values(b)
        return {v: vals[self.block_of(v)] for v in self.graph.vertices}

    def edges_json(self):
        import json
        return json.dumps(sorted([list(hi), list(lo)] for hi, lo in self.edge_set()))

    def __eq__(self, other):
        return self.graph is other.graph and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        return f"FaceSubgraph(dim={self.dim}, blocks={[sorted(b) for b in self.blocks]})"


class _DSU:
    def __init__(self, items):
        self.p = {v: v for v in items}

    def find(self, v):
        p = self.p
        while p[v] != v:
            p[v] = p[p[v]]
            v = p[v]
        return v

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[ra] = rb

    def copy(self):
        d = _DSU([])
        d.p = dict(self.p)
        return d

    def blocks(self):
        out = {}
        for v in self.p:
            out.setdefault(self.find(v), []).append(v)
        return list(out.values())


def _closure(G, dsu, forbidden):
    """Apply the diamond-completion merges; False when a forbidden pair joins."""
    changed = True
    while changed:
        changed = False
        for v, w, below, above in G.row_pairs:
            if dsu.find(v) == dsu.find(w):
                for u in (below, above):
                    if u is not None and dsu.find(u) != dsu.find(v):
                        dsu.union(u, v)
                        changed = True
    for x, y in forbidden:
        if dsu.find(x) == dsu.find(y):
            return False
    return True


def enumerate_faces(G, b, only_vertices=False):
    """Faces of D_G(b), as FaceSubgraph partitions.

    Branches over edges (merge vs separate) with closure propagation; equal
    top values must end up in one connected component, distinct values must
    stay apart.  With only_vertices the search prunes any branch in which a
    component can no longer reach the top row, returning the 0-dimensional
    faces only.
    """
    b = BSeq(b) if not isinstance(b, BSeq) else b
    if len(b) != G.l:
        raise ValueError("b length must match the top row")
    forbidden = []
    ties = []
    for p in range(G.l):
        for q in range(p + 1, G.l):
            if b[p] == b[q]:
                ties.append((G.top[p], G.top[q]))
            else:
                forbidden.append((G.top[p], G.top[q]))
    out = []
    edges = G.edges
    top = set(G.top)

    def feasible(dsu, eidx):
        # admissible prune over the most-merged completion: tied pairs must
        # still be connectable and (for vertices) every block must reach the
        # top row
        if not ties and not only_vertices:
            return True
        link = _DSU(G.vertices)
        for v in G.vertices:
            link.union(v, dsu.find(v))
        for hi, lo in edges[eidx:]:
            link.union(hi, lo)
        if any(link.find(x) != link.find(y) for x, y in ties):
            return False
        if only_vertices:
            reach = {link.find(v) for v in top}
            if any(link.find(v) not in reach for v in G.vertices):
                return False
        return True

    def recurse(dsu, sep_pairs, eidx):
        while eidx < len(edges):
            hi, lo = edges[eidx]
            if dsu.find(hi) == dsu.find(lo):
                eidx += 1
                continue
            if any(dsu.find(x) == dsu.find(hi) and dsu.find(y) == dsu.find(lo)
                   or dsu.find(x) == dsu.find(lo) and dsu.find(y) == dsu.find(hi)
                   for x, y in sep_pairs):
                eidx += 1
                continue
            break
        else:
            if all(dsu.find(x) == dsu.find(y) for x, y in ties):
                face = FaceSubgraph(G, dsu.blocks())
                if not only_vertices or face.dim == 0:
                    out.append(face)
            return
        hi, lo = edges[eidx]
        # branch: edge absent (endpoints stay separated)
        dsu2 = dsu.copy()
        sep2 = sep_pairs + [(hi, lo)]
        if _closure(G, dsu2, forbidden + sep2) and feasible(dsu2, eidx + 1):
            recurse(dsu2, sep2, eidx + 1)
        # branch: edge present
        dsu3 = dsu.copy()
        dsu3.union(hi, lo)
        if _closure(G, dsu3, forbidden + sep_pairs) and \
           feasible(dsu3, eidx + 1):
            recurse(dsu3, sep_pairs, eidx + 1)

    dsu0 = _DSU(G.vertices)
    if _closure(G, dsu0, forbidden) and feasible(dsu0, 0):
        recurse(dsu0, [], 0)
    return out


def phi_face(face):
    return face.phi()


def faces_by_dim(faces):
    out = {}
    for f in faces:
        out.setdefault(f.dim, []).append(f)
    return out


# ---------------------------------------------------------------------------
# polyhedra and boundedness
# ---------------------------------------------------------------------------

def polyhedron_of(G, b):
    """D_G(b) in the coordinates of the below-top vertices."""
    b = BSeq(b) if not isinstance(b, BSeq) else b
    fixed = {v: b[k] for k, v in enumerate(G.top)}
    free = [v for v in sorted(G.vertices) if v not in fixed]
    index = {v: k for k, v in enumerate(free)}
    ineqs = []
    for hi, lo in G.edges:
        # s_hi >= s_lo  ->  -s_hi + s_lo <= 0
        row = [0] * len(free)
        rhs = 0
        if hi in index:
            row[index[hi]] -= 1
        else:
            rhs += fixed[hi]
        if lo in index:
            row[index[lo]] += 1
        else:
            rhs -= fixed[lo]
        ineqs.append((tuple(row), rhs))
    return Polyhedron(len(free), ineqs, labels=[svar(v) for v in free])


def minimal_face(G, b):
    """The face subgraph of D_G(b) itself (no tight edges beyond the forced)."""
    b = BSeq(b) if not isinstance(b, BSeq) else b
    faces = enumerate_faces(G, b)
    return max(faces, key=lambda f: f.dim)


def is_bounded(G, b):
    """Boundedness of D_G(b) by the chain criterion on its minimal subgraph."""
    mf = minimal_face(G, BSeq(b) if not isinstance(b, BSeq) else b)
    es = mf.edge_set()
    for i in range(G.a, G.d):
        jl = G.rows[i][0]
        if (i + 1) in G.rows:
            jl2 = G.rows[i + 1][0]
            if jl2 == jl - 1:  # both leftmost, lower-left step
                e = ((i + 1, jl - 1), (i, jl))
                if e not in es:
                    return False
            jr = G.rows[i][-1]
            jr2 = G.rows[i + 1][-1]
            if jr2 == jr:      # both rightmost, lower-right step
                e = ((i, jr), (i + 1, jr))
                if e not in es:
                    return False
    return True


# ---------------------------------------------------------------------------
# the x-specialization
# ---------------------------------------------------------------------------

def f_monomial_map(vertices):
    """t_(i,j) -> x_i^{-1} x_{i+1} on the given lattice vertices."""
    out = {}
    for (i, j) in vertices:
        out[svar((i, j))] = Monomial({xvar(i): -1, xvar(i + 1): 1})
    return out


def apply_F(fn, vertices):
    """Specialize a RationalFn in the s-variables to the x-variables."""
    return fn.subs_monomials(f_monomial_map(vertices), collapse=FCollapse)


def x_variables(G):
    return [xvar(i) for i in range(G.a, G.d + 2)]


# ---------------------------------------------------------------------------
# cone transforms and the vertex route
# ---------------------------------------------------------------------------

_plan_cache = {}


def t_factorial(l):
    out = T_ONE
    for j in range(2, l + 1):
        out = out * TPoly({e: 1 for e in range(j)})
    return out


def t_multinomial(n, parts):
    if sum(parts) != n:
        raise ValueError("parts must sum to n")
    num = t_factorial(n)
    for l in parts:
        num = num.exact_div(t_factorial(l))
    return num


class ConePlan:
    """Combinatorial data for sigma_phi of the cone D_G(b,...,b).

    Lattice points sorted by value split into "runs" of equal coordinates;
    run sequences are ordered partitions of the block poset whose prefixes
    are up-sets, the run weights multiply, and consecutive runs contribute a
    geometric cut factor that depends only on the prefix.  The transform is
    therefore a sum over chains of up-sets, evaluated by dynamic programming.
    """

    def __init__(self, G):
        self.graph = G
        dsu = _DSU(G.vertices)
        for v in G.top[1:]:
            dsu.union(G.top[0], v)
        ok = _closure(G, dsu, [])
        assert ok
        self.blocks = [frozenset(b) for b in sorted(dsu.blocks(), key=min)]
        self.n = len(self.blocks)
        block_of = {}
        for bi, blk in enumerate(self.blocks):
            for v in blk:
                block_of[v] = bi
        self.pin = block_of[G.top[0]]
        covers = set()
        for hi, lo in G.edges:
            bh, bl = block_of[hi], block_of[lo]
            if bh != bl:
                covers.add((bh, bl))
        self.covers = covers
        self.parents = {b: set() for b in range(self.n)}
        for bh, bl in covers:
            self.parents[bl].add(bh)
        self._assert_acyclic()
        self._phi_cache = {}
        self._phi_trat = {}
        self._upsets = None
        self._moves = {}
        self._topo = None

    def _assert_acyclic(self):
        indeg = {b: len(self.parents[b]) for b in range(self.n)}
        ready = [b for b in range(self.n) if indeg[b] == 0]
        seen = 0
        while ready:
            b = ready.pop()
            seen += 1
            for bh, bl in self.covers:
                if bh == b:
                    indeg[bl] -= 1
                    if indeg[bl] == 0:
                        ready.append(bl)
        assert seen == self.n, "block order relation has a cycle"

    def phi_run(self, run):
        """Weight factor of a run: the face components inside the run."""
        cached = self._phi_cache.get(run)
        if cached is not None:
            return cached
        verts = set()
        for b in run:
            verts |= self.blocks[b]
        a = self.graph.a
        out = T_ONE
        remaining = set(verts)
        while remaining:
            start = remaining.pop()
            comp = {start}
            stack = [start]
            while stack:
                v = stack.pop()
                for u in self.graph._adj[v]:
                    if u in remaining:
                        remaining.remove(u)
                        comp.add(u)
                        stack.append(u)
            counts = {}
            for (i, _) in comp:
                counts[i] = counts.get(i, 0) + 1
            for i, l in counts.items():
                if i > a and counts.get(i - 1, 0) == l - 1:
                    out = out * (T_ONE - TPoly.t(l))
        self._phi_cache[run] = out
        return out

    def upsets(self):
        """All up-closed block sets (cached)."""
        if self._upsets is None:
            out = set()

            def rec(current, rest):
                if not rest:
                    out.add(frozenset(current))
                    return
                b = rest[0]
                # b excluded: everything below b must also be excluded later
                rec(current, rest[1:])
                if self.parents[b] <= current:
                    current.add(b)
                    rec(current, rest[1:])
                    current.remove(b)

            order = self._topo_order()
            rec(set(), order)
            self._upsets = sorted(out, key=lambda s: (len(s), sorted(s)))
        return self._upsets

    def _topo_order(self):
        if self._topo is not None:
            return self._topo
        indeg = {b: len(self.parents[b]) for b in range(self.n)}
        ready = sorted(b for b in range(self.n) if indeg[b] == 0)
        order = []
        children = {b: [] for b in range(self.n)}
        for bh, bl in self.covers:
            children[bh].append(bl)
        while ready:
            b = ready.pop()
            order.append(b)
            for c in children[b]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        self._topo = order
        return order

    def next_runs(self, placed):
        """Valid next runs: nonempty sets whose parents lie in placed + run."""
        cached = self._moves.get(placed)
        if cached is not None:
            return cached
        rest = [b for b in self._topo_order() if b not in placed]
        out = []

        def rec(current, idx):
            if current:
                out.append(frozenset(current))
            for k in range(idx, len(rest)):
                b = rest[k]
                if self.parents[b] <= (placed | current | {b}):
                    if self.parents[b] - placed <= current:
                        current.add(b)
                        rec(current, k + 1)
                        current.remove(b)

        rec(set(), 0)
        self._moves[placed] = out
        return out

    def phi_run_trat(self, run):
        got = self._phi_trat.get(run)
        if got is None:
            got = TRat.from_tpoly(self.phi_run(run))
            self._phi_trat[run] = got
        return got


def cone_plan(G):
    key = G.signature()
    plan = _plan_cache.get(key)
    if plan is None:
        plan = ConePlan(G)
        _plan_cache[key] = plan
    return plan


class ConeTransform:
    """sigma_phi of an all-equal-values cone, as a lazily evaluated object.

    Holds the plan plus the current monomial images of the blocks (so that
    specializations are plain monomial maps) and the apex monomial.
    """

    __slots__ = ("plan", "block_monos", "apex", "_cuts")

    def __init__(self, plan, block_monos, apex):
        self.plan = plan
        self.block_monos = block_monos
        self.apex = apex
        self._cuts = {}

    @staticmethod
    def of_cone(G, b_value):
        plan = cone_plan(G)
        monos = [Monomial({svar(v): 1 for v in blk}) for blk in plan.blocks]
        apex = Monomial({svar(v): b_value for v in G.vertices}) if b_value \
            else Monomial.unit()
        return ConeTransform(plan, monos, apex)

    def subs_monomials(self, varmap, collapse=CollapseError):
        monos = [m.subs(varmap) for m in self.block_monos]
        ct = ConeTransform(self.plan, monos, self.apex.subs(varmap))
        for m in ct.cut_monomials():
            if m.is_unit():
                raise collapse("cut factor collapses to (1 - 1)")
        return ct

    def _cut_mono(self, upset):
        """Monomial of the cut after prefix `upset`."""
        got = self._cuts.get(upset)
        if got is not None:
            return got
        out = Monomial.unit()
        if self.plan.pin in upset:
            for b in range(self.plan.n):
                if b not in upset:
                    out = out * self.block_monos[b].inv()
        else:
            for b in upset:
                out = out * self.block_monos[b]
        self._cuts[upset] = out
        return out

    def cut_monomials(self):
        full = frozenset(range(self.plan.n))
        return [self._cut_mono(u) for u in self.plan.upsets()
                if u and u != full]

    def den_monomials(self):
        return self.cut_monomials()

    def eval(self, point, memo=None, shared=None):
        """Exact value at a rational point, t symbolic.

        `shared` caches whole-transform values across calls with one point.
        """
        if memo is None:
            memo = {}
        key = None
        if shared is not None:
            # the apex only scales the transform, so cache the cone part
            key = (id(self.plan), self.block_monos_key())
            got = shared.get(key)
            if got is not None:
                return got * self.apex.eval(point, memo)
        plan = self.plan
        full = frozenset(range(plan.n))
        cache = {}

        def H(upset):
            if upset == full:
                return TRat.const(1)
            got = cache.get(upset)
            if got is not None:
                return got
            total = TRat()
            for run in plan.next_runs(upset):
                u2 = upset | run
                val = plan.phi_run_trat(run) * H(u2)
                if u2 != full:
                    c = self._cut_mono(u2).eval(point, memo)
                    if c == 1:
                        raise ZeroDivisionError("cut factor vanishes at point")
                    val = val * (c / (1 - c))
                total = total + val
            cache[upset] = total
            return total

        out = H(frozenset())
        if shared is not None:
            shared[key] = out
        return out * self.apex.eval(point, memo)

    def block_monos_key(self):
        return tuple(self.block_monos)

    def expand(self):
        """Full RationalFn expansion (small cones only)."""
        plan = self.plan
        full = frozenset(range(plan.n))
        cache = {}

        def H(upset):
            if upset == full:
                return RationalFn(LaurentPoly.one())
            got = cache.get(upset)
            if got is not None:
                return got
            total = None
            for run in plan.next_runs(upset):
                u2 = upset | run
                val = H(u2) * plan.phi_run(run)
                if u2 != full:
                    m = self._cut_mono(u2)
                    val = val * RationalFn(LaurentPoly.from_monomial(m), [(m, 1)])
                total = val if total is None else total + val
            cache[upset] = total
            return total

        return H(frozenset()) * self.apex

    def series_unit(self, order, domain, zpoint=None):
        """Truncated q-series of the transform without its apex monomial.

        The block monomials must already live in the z/q variables (apply a
        monomial substitution first); with zpoint given the z-variables are
        evaluated at rationals.  All cut factors have nonnegative q-valuation
        as series, so the result is exact to the requested order.
        """
        from .ring import Coeff, TruncatedSeries, UnitFactor, split_zq
        plan = self.plan
        full = frozenset(range(plan.n))
        cache = {}

        def zcoeff(z):
            if zpoint is None:
                return Coeff(LaurentPoly.from_monomial(z))
            return evaluate_zmono(z, zpoint)

        def cut_series(mono):
            z, q = split_zq(mono)
            if q == 0 and z.is_unit():
                raise UnitFactor("cut factor equals 1")
            coeff = zcoeff(z)
            # geometric sum m/(1 - m), built directly so no precision is lost:
            # deg m > 0: sum_{j>=1} m^j;  deg m < 0: -sum_{j>=0} m^{-j};
            # deg m = 0: a single coefficient in the fraction field.
            coeffs = {}
            if q > 0:
                j = 1
                while j * q <= order:
                    coeffs[j * q] = _coeff_pow(coeff, j)
                    j += 1
            elif q < 0:
                j = 0
                while -j * q <= order:
                    c = _coeff_pow(coeff, -j)
                    prev = coeffs.get(-j * q)
                    coeffs[-j * q] = -c if prev is None else prev - c
                    j += 1
            else:
                coeffs[0] = coeff / (Coeff.one() - coeff)
            return TruncatedSeries(order, coeffs, domain)

        def H(upset):
            if upset == full:
                return TruncatedSeries.one(order, domain)
            got = cache.get(upset)
            if got is not None:
                return got
            total = TruncatedSeries.zero(order, domain)
            for run in plan.next_runs(upset):
                u2 = upset | run
                val = H(u2).scale(plan.phi_run(run))
                if u2 != full:
                    val = val * cut_series(self._cut_mono(u2))
                total = total + val
            cache[upset] = total
            return total

        return H(frozenset())


def _coeff_pow(coeff, k):
    from .ring import Coeff
    if k < 0:
        coeff = coeff.inv()
        k = -k
    out = Coeff.one()
    base = coeff
    while k:
        if k & 1:
            out = out * base
        base = base * base
        k >>= 1
    return out


class FactoredTransform:
    """Product of cone transforms and simple factors, never expanded."""

    __slots__ = ("factors",)

    def __init__(self, factors=None):
        self.factors = list(factors or [])

    def __mul__(self, other):
        if isinstance(other, FactoredTransform):
            return FactoredTransform(self.factors + other.factors)
        if isinstance(other, ConeTransform):
            return FactoredTransform(self.factors + [other])
        if isinstance(other, (Monomial, TPoly)):
            return FactoredTransform(self.factors +
                                     [RationalFn(LaurentPoly.one()) * other])
        if isinstance(other, RationalFn):
            return FactoredTransform(self.factors + [other])
        raise TypeError(type(other))

    def den_monomials(self):
        out = []
        for fac in self.factors:
            out.extend(fac.den_monomials() if isinstance(fac, ConeTransform)
                       else fac.den_list())
        return out

    def subs_monomials(self, varmap, collapse=CollapseError):
        return FactoredTransform(
            [fac.subs_monomials(varmap, collapse) for fac in self.factors])

    def eval(self, point, memo=None, shared=None):
        if memo is None:
            memo = {}
        total = TRat.const(1)
        for fac in self.factors:
            if isinstance(fac, ConeTransform):
                total = total * fac.eval(point, memo, shared)
            else:
                total = total * fac.eval(point, memo)
        return total

    def expand(self):
        total = RationalFn(LaurentPoly.one())
        for fac in self.factors:
            part = fac.expand() if isinstance(fac, ConeTransform) else fac
            total = total * part
        return total


def sigma_cone(G, b_value, method="auto"):
    """sigma_phi of the cone D_G(b,...,b).

    The default engine is the up-set dynamic program over run sequences;
    method="weighted_cone" routes through the generic polyhedral machinery
    (kept for cross-checks on small graphs) and returns the expanded form.
    """
    if method == "weighted_cone":
        faces = enumerate_faces(G, BSeq([0] * G.l))
        fn = ipt_weighted(_cone_weighted(G, faces))
        if b_value:
            fn = fn * Monomial({svar(v): b_value for v in G.vertices})
        return FactoredTransform([fn])
    return FactoredTransform([ConeTransform.of_cone(G, b_value)])


def _cone_weighted(G, faces):
    """WeightedCone for D_G(0,...,0) from its face subgraphs."""
    labels = [svar(v) for v in sorted(G.vertices)]
    index = {v: k for k, v in enumerate(sorted(G.vertices))}
    apex = tuple(0 for _ in labels)
    rays = []
    ray_edge_sets = []
    for f in faces:
        if f.dim != 1:
            continue
        free = [blk for blk in f.blocks if not (blk & set(G.top))]
        assert len(free) == 1
        blk = free[0]
        sign = None
        for hi, lo in G.edges:
            inb_hi, inb_lo = hi in blk, lo in blk
            if inb_hi == inb_lo:
                continue
            s = 1 if inb_hi else -1
            assert sign is None or sign == s, "inconsistent ray orientation"
            sign = s
        assert sign is not None
        vec = [0] * len(labels)
        for v in blk:
            vec[index[v]] = sign
        rays.append(tuple(vec))
        ray_edge_sets.append(f.edge_set())
    face_records = []
    for f in faces:
        es = f.edge_set()
        rs = frozenset(i for i, res in enumerate(ray_edge_sets) if res >= es)
        face_records.append((rs, f.dim, f.phi()))
    return WeightedCone(apex, rays, face_records, labels)


def subgraph_components(face):
    """Component blocks of a face subgraph as OrdinaryGraphs."""
    return [OrdinaryGraph(blk) for blk in face.blocks]


def vertex_contributions(G, b):
    """(vertex face, sigma_phi of its tangent cone) for every vertex of D_G(b).

    The tangent cone at a vertex is the direct sum over the components of the
    vertex subgraph, each an all-equal-values cone over a smaller graph; the
    transform is returned factored.
    """
    b = BSeq(b) if not isinstance(b, BSeq) else b
    out = []
    for f in enumerate_faces(G, b, only_vertices=True):
        vals = f.top_values(b)
        fn = FactoredTransform()
        for bi, blk in enumerate(f.blocks):
            sub = OrdinaryGraph(blk)
            fn = fn * ConeTransform.of_cone(sub, vals[bi])
        out.append((f, fn))
    return out


_xmapped_cache = {}


def _cone_transform_x(blk, b_value):
    """F-image of the block cone transform; the variable map is intrinsic to
    the lattice vertices, so the cache is global."""
    key = (blk, b_value)
    got = _xmapped_cache.get(key)
    if got is None:
        sub = OrdinaryGraph(blk)
        got = ConeTransform.of_cone(sub, b_value).subs_monomials(
            f_monomial_map(sub.vertices), FCollapse)
        _xmapped_cache[key] = got
    return got


def psi_terms(G, b):
    """Per-vertex contributions to psi_G(b), already in the x-variables."""
    b = BSeq(b) if not isinstance(b, BSeq) else b
    out = []
    for f in enumerate_faces(G, b, only_vertices=True):
        vals = f.top_values(b)
        fn = FactoredTransform()
        for bi, blk in enumerate(f.blocks):
            fn = fn * _cone_transform_x(blk, vals[bi])
        out.append((f, fn))
    return out


def psi_eval(G, b, point):
    """Evaluate psi_G(b) at a rational x-point (t symbolic)."""
    memo = {}
    total = TRat()
    for _, fn in psi_terms(G, b):
        total = total + fn.eval(point, memo)
    return total


def psi_rational(G, b):
    """psi_G(b) as a single RationalFn in the x-variables (small graphs)."""
    total = None
    for _, fn in psi_terms(G, b):
        e = fn.expand()
        total = e if total is None else total + e
    return total


def psi_is_zero(G, b, trials=5, seed=0, rng=None):
    """Randomized test that psi_G(b) vanishes identically."""
    import random as _random
    rng = rng or _random.Random(seed)
    terms = psi_terms(G, b)
    dens = []
    for _, fn in terms:
        dens.extend(fn.den_monomials())
    variables = x_variables(G)
    for _ in range(trials):
        point = random_point(variables, rng, dens)
        memo = {}
        shared = {}
        total = TRat()
        for _, fn in terms:
            total = total + fn.eval(point, memo, shared)
        if not total.is_zero():
            return False
    return True


# ---------------------------------------------------------------------------
# degenerations
# ---------------------------------------------------------------------------

def degeneration_map(G, b, b2, face):
    """Image of a (G, b)-face under degeneration to the values b2.

    The image is the smallest valid-for-b2 subgraph containing the edges of
    the given face.
    """
    b = BSeq(b) if not isinstance(b, BSeq) else b
    b2 = BSeq(b2) if not isinstance(b2, BSeq) else b2
    if len(b) != len(b2):
        raise ValueError("b and b2 must have the same length")
    dsu = _DSU(G.vertices)
    for hi, lo in face.edge_set():
        dsu.union(hi, lo)
    # join equal new values along the top row
    groups = {}
    for k, v in enumerate(G.top):
        groups.setdefault(b2[k], []).append(v)
    for vs in groups.values():
        for u in vs[1:]:
            dsu.union(vs[0], u)
    ok = _closure(G, dsu, [])
    assert ok
    img = FaceSubgraph(G, dsu.blocks())
    # blocks joined only through a tie must be reconnected through edges;
    # when the closure alone does not produce a valid face, fall back to
    # searching the degenerate face lattice for the minimal edge superset
    for p in range(G.l):
        for q in range(p + 1, G.l):
            same = img.same_block(G.top[p], G.top[q])
            if (b2[p] == b2[q]) != same:
                # connect through the unique minimal face containing both:
                # fall back to searching the b2-face lattice
                return _smallest_face_containing(G, b2, face.edge_set())
    if not _blocks_connected(G, img):
        return _smallest_face_containing(G, b2, face.edge_set())
    return img


def _blocks_connected(G, face):
    for blk in face.blocks:
        seen = set()
        start = next(iter(blk))
        stack = [start]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            for u in G._adj[v]:
                if u in blk and u not in seen:
                    stack.append(u)
        if seen != blk:
            return False
    return True


def _smallest_face_containing(G, b2, edge_set):
    cands = [f for f in enumerate_faces(G, b2) if f.edge_set() >= edge_set]
    assert cands, "no face of the degenerate polyhedron contains the edges"
    best = min(cands, key=lambda f: len(f.edge_set()))
    assert all(f.edge_set() >= best.edge_set() for f in cands)
    return best


def verify_graphsum(G, b, b2, face2=None):
    """Exact check of the factorial-weighted face identity for a degeneration.

    For every face f of D_G(b2):
      prod [l_i]_t! * phi_G(b2)(f) = sum over preimages g of
      (-1)^{dim g - dim f} phi_G(b)(g).
    When face2 is given only that face is checked.
    """
    b = BSeq(b) if not isinstance(b, BSeq) else b
    b2 = BSeq(b2) if not isinstance(b2, BSeq) else b2
    fac = T_ONE
    for l in b2.run_lengths():
        fac = fac * t_factorial(l)
    faces_b = enumerate_faces(G, b)
    faces_b2 = enumerate_faces(G, b2)
    sums = {f: TPoly.zero() for f in faces_b2}
    for g in faces_b:
        img = degeneration_map(G, b, b2, g)
        sign = 1 if (g.dim - img.dim) % 2 == 0 else -1
        sums[img] = sums[img] + (g.phi() if sign > 0 else -g.phi())
    targets = [face2] if face2 is not None else faces_b2
    for f in targets:
        if sums[f] != fac * f.phi():
            return False
    return True


def verify_gensingular(G, b, b2, trials=3, seed=0):
    """Randomized check of the degeneration identity for the transforms.

    prod [l_i]_t! * sigma_phi(b2)(D(b2)) = sum over vertices v of D(b) of
    e^{pi(v) - v} sigma_phi(b)(C_v), with both sides computed by the vertex
    route and compared at random rational points in the s-variables.
    """
    import random as _random
    rng = _random.Random(seed)
    b = BSeq(b) if not isinstance(b, BSeq) else b
    b2 = BSeq(b2) if not isinstance(b2, BSeq) else b2
    fac = T_ONE
    for l in b2.run_lengths():
        fac = fac * t_factorial(l)
    lhs = [fn * fac for _, fn in vertex_contributions(G, b2)]
    rhs = []
    for f, fn in vertex_contributions(G, b):
        img = degeneration_map(G, b, b2, f)
        assert img.dim == 0
        coords = f.vertex_coordinates(b)
        coords2 = img.vertex_coordinates(b2)
        shift = Monomial({svar(v): coords2[v] - coords[v]
                          for v in G.vertices if coords2[v] != coords[v]})
        rhs.append(fn * shift)
    dens = []
    for fn in lhs + rhs:
        dens.extend(fn.den_monomials())
    variables = [svar(v) for v in G.vertices]
    for _ in range(trials):
        point = random_point(variables, rng, dens)
        memo = {}
        shared = {}
        va = TRat()
        for fn in lhs:
            va = va + fn.eval(point, memo, shared)
        vb = TRat()
        for fn in rhs:
            vb = vb + fn.eval(point, memo, shared)
        if va != vb:
            return False
    return True


def verify_face_euler_sum(n, lam):
    """Sum of (-1)^dim phi over the faces of the interlacing polytope equals
    the t-multinomial of the part multiplicities."""
    G = triangle_graph(n)
    b = BSeq(list(lam) + [0])
    total = TPoly.zero()
    for f in enumerate_faces(G, b):
        total = total + (f.phi() if f.dim % 2 == 0 else -f.phi())
    return total == t_multinomial(n, b.run_lengths())


# ---------------------------------------------------------------------------
# exhaustive generation of ordinary graphs
# ---------------------------------------------------------------------------

def enumerate_ordinary_graphs(max_vertices, min_vertices=1):
    """All ordinary graphs with at most max_vertices vertices, up to lattice
    translation (top row pinned to 0, leftmost column to j = 1)."""
    out = []
    seen = set()
    for cells in _connected_subsets(max_vertices):
        mins_i = min(i for i, _ in cells)
        mins_j = min(j for _, j in cells)
        norm = frozenset((i - mins_i, j - mins_j + 1) for i, j in cells)
        if norm in seen:
            continue
        seen.add(norm)
        if len(norm) < min_vertices:
            continue
        try:
            out.append(OrdinaryGraph(norm))
        except (NotConnected, NotClosedDown, NotClosedUp):
            continue
    out.sort(key=lambda g: (len(g.vertices), g.signature()))
    return out


def _connected_subsets(max_size):
    """All fixed connected subsets anchored at their lexicographic minimum.

    The adjacency is the lattice one: (i, j) ~ (i-1, j), (i-1, j+1),
    (i+1, j-1), (i+1, j).  Sets are grown from the origin, never adding a
    cell lexicographically below it, so every translation class appears.
    """
    def neighbors(c):
        i, j = c
        return ((i - 1, j), (i - 1, j + 1), (i + 1, j - 1), (i + 1, j))

    origin = (0, 0)
    level = {frozenset([origin])}
    results = set(level)
    for _ in range(max_size - 1):
        nxt = set()
        for s in level:
            for cell in s:
                for nb in neighbors(cell):
                    if nb >= origin and nb not in s:
                        nxt.add(s | {nb})
        results |= nxt
        level = nxt
    return results


# ---------------------------------------------------------------------------
# polyhedral bridges
# ---------------------------------------------------------------------------

def weighted_brion_instance(G, b):
    """Polyhedron, face-weight callback and vertex list for a Brion check.

    The weight of a tight-set face is read off the subgraph of tight edges;
    vertices come from the 0-dimensional face subgraphs and are returned in
    the polyhedron's coordinate order.
    """
    b = BSeq(b) if not isinstance(b, BSeq) else b
    P = polyhedron_of(G, b)
    fixed = {v: b[k] for k, v in enumerate(G.top)}
    free = [v for v in sorted(G.vertices) if v not in fixed]

    def phi(face):
        dsu = _DSU(G.vertices)
        for idx in face.tight:
            hi, lo = G.edges[idx]
            dsu.union(hi, lo)
        return FaceSubgraph(G, dsu.blocks()).phi()

    vertices = []
    for f in enumerate_faces(G, b):
        if f.dim == 0:
            coords = f.vertex_coordinates(b)
            vertices.append(tuple(coords[v] for v in free))
    vertices.sort()
    return P, phi, vertices


def random_bounded_instances(count, seed, max_dim=8, pool_max_vertices=8,
                             value_range=3):
    """Random bounded polyhedron instances (graph, b) for identity checks.

    Bounded members of the family are dominated by the triangle shapes (the
    interlacing polytopes); wider graphs only bound when ties in b force the
    flank chains, so both kinds are sampled.
    """
    import random as _random
    rng = _random.Random(seed)
    triangles = [triangle_graph(n) for n in (2, 3, 4)]
    pool = [g for g in enumerate_ordinary_graphs(pool_max_vertices)
            if 1 <= len(g.vertices) - g.l <= max_dim]
    out = []
    attempts = 0
    while len(out) < count and attempts < 2000 * count:
        attempts += 1
        if rng.random() < 0.6:
            G = rng.choice(triangles)
        else:
            G = rng.choice(pool)
        vals = sorted((rng.randint(0, value_range) for _ in range(G.l)),
                      reverse=True)
        if len(set(vals)) == 1:
            continue
        b = BSeq(vals)
        if len(G.vertices) - G.l <= max_dim and is_bounded(G, b):
            out.append((G, b))
    assert len(out) == count, "could not sample enough bounded instances"
    return out
