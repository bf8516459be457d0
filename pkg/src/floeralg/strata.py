"""Homogeneous posets, word and partition posets, and outer collaring.

Collared points are handled pointwise: a point of the outer collaring is a
base cell ``x``, a component ``alpha`` with ``x`` in the closed stratum of
``alpha``, and rational coordinates in ``[-r, 0]`` indexed by the adjacent
faces of ``alpha``.  Two presentations are identified when one is obtained
from the other by appending zero coordinates.

The coordinate bookkeeping assumes a *corner poset*: the depth of every
element equals the number of its adjacent faces, and for every element
``b`` the map ``c -> F_c`` is an order-reversing bijection from the elements
above ``b`` onto the subsets of ``F_b``.  Word, partition, subset and
product posets all have this property; :meth:`HomogeneousPoset.is_corner`
checks it.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional


class NotHomogeneous(ValueError):
    pass


class NonPositiveEnergy(ValueError):
    pass


class CoordOutOfRange(ValueError):
    pass


class IncompatibleStrata(ValueError):
    pass


# -- posets --------------------------------------------------------------------------


class Poset:
    """Finite poset given by elements and strict relations (closed transitively)."""

    def __init__(self, elements: Iterable, less: Iterable = ()):
        self.elements = list(elements)
        idx = set(self.elements)
        if len(idx) != len(self.elements):
            raise ValueError("duplicate poset elements")
        above = {a: set() for a in self.elements}
        for a, b in less:
            if a not in idx or b not in idx:
                raise ValueError(f"relation {a!r} < {b!r} mentions unknown element")
            above[a].add(b)
        # transitive closure
        changed = True
        while changed:
            changed = False
            for a in self.elements:
                extra = set()
                for b in above[a]:
                    extra |= above[b]
                if not extra <= above[a]:
                    above[a] |= extra
                    changed = True
        for a in self.elements:
            if a in above[a]:
                raise ValueError(f"relation has a cycle through {a!r}")
        self._above = {a: frozenset(s) for a, s in above.items()}

    def lt(self, a, b):
        return b in self._above[a]

    def leq(self, a, b):
        return a == b or b in self._above[a]

    def up(self, a):
        """Elements >= a."""
        return [b for b in self.elements if self.leq(a, b)]

    def down(self, a):
        return [b for b in self.elements if self.leq(b, a)]

    def maximal(self):
        return [a for a in self.elements if not self._above[a]]

    def minimal(self):
        return [a for a in self.elements if not any(self.lt(b, a) for b in self.elements)]

    def covers(self, a):
        """Elements b > a with nothing strictly between."""
        ups = self._above[a]
        return [b for b in ups if not any(c in ups and self.lt(c, b) for c in ups)]

    def relations(self):
        return [(a, b) for a in self.elements for b in self.elements if self.lt(a, b)]


class HomogeneousPoset(Poset):
    """Poset where every saturated chain from an element up to a maximal
    element has the same length, the depth of that element."""

    def __init__(self, elements, less=()):
        super().__init__(elements, less)
        depth: Dict = {}

        def d(a):
            if a in depth:
                return depth[a]
            cov = self.covers(a)
            if not cov:
                depth[a] = 0
                return 0
            vals = {d(b) for b in cov}
            if len(vals) != 1:
                raise NotHomogeneous(f"element {a!r} has saturated chains of different lengths")
            depth[a] = vals.pop() + 1
            return depth[a]

        for a in self.elements:
            d(a)
        self.depth = depth
        self._faces = {a: frozenset(b for b in self.up(a) if depth[b] == 1) for a in self.elements}
        self._by_faces: Dict[frozenset, list] = {}
        for a in self.elements:
            self._by_faces.setdefault(self._faces[a], []).append(a)

    def faces(self, a) -> frozenset:
        """Adjacent faces F_a: elements of depth 1 above a."""
        return self._faces[a]

    def element_with_faces(self, a, N) -> object:
        """The unique b >= a with F_b = N."""
        hits = [b for b in self._by_faces.get(frozenset(N), []) if self.leq(a, b)]
        if len(hits) != 1:
            raise IncompatibleStrata(f"no unique element above {a!r} with faces {sorted(map(repr, N))}")
        return hits[0]

    def top_above(self, a):
        tops = [b for b in self.up(a) if self.depth[b] == 0]
        if len(tops) != 1:
            raise IncompatibleStrata(f"{a!r} lies below {len(tops)} maximal elements")
        return tops[0]

    def is_corner(self) -> bool:
        for b in self.elements:
            F = self.faces(b)
            if len(F) != self.depth[b]:
                return False
            ups = self.up(b)
            if len(ups) != 2 ** len(F):
                return False
            if len({self.faces(c) for c in ups}) != len(ups):
                return False
            for c in ups:
                for c2 in ups:
                    if self.leq(c, c2) != (self.faces(c) >= self.faces(c2)):
                        return False
        return True

    def sub(self, keep) -> "HomogeneousPoset":
        keep = list(keep)
        ks = set(keep)
        return HomogeneousPoset(keep, [(a, b) for a, b in self.relations() if a in ks and b in ks])


def poset_from_json(doc) -> Poset:
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        elems = [_hashable(e) for e in doc["elements"]]
        less = [(_hashable(a), _hashable(b)) for a, b in doc.get("less", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed poset document: {exc!r}") from None
    return Poset(elems, less)


def _hashable(x):
    return tuple(_hashable(y) for y in x) if isinstance(x, list) else x


# -- word posets -------------------------------------------------------------------------


class WordPoset(HomogeneousPoset):
    def __init__(self, ambient: Poset, p, q):
        if not ambient.lt(p, q):
            raise ValueError(f"need {p!r} < {q!r}")
        self.ambient, self.p, self.q = ambient, p, q
        between = [r for r in ambient.elements if ambient.lt(p, r) and ambient.lt(r, q)]
        words = []

        def extend(chain):
            words.append((p,) + tuple(chain) + (q,))
            last = chain[-1] if chain else p
            for r in between:
                if ambient.lt(last, r):
                    extend(chain + [r])

        extend([])
        less = []
        inner = {w: frozenset(w[1:-1]) for w in words}
        for a in words:
            for b in words:
                if a != b and inner[b] <= inner[a]:
                    less.append((a, b))
        super().__init__(words, less)

    @staticmethod
    def interior(word):
        return word[1:-1]


def enumerate_word_poset(P: Poset, p, q) -> WordPoset:
    return WordPoset(P, p, q)


def chain_poset(n, names=None) -> Poset:
    names = list(names) if names is not None else list(range(n))
    return Poset(names, [(names[i], names[i + 1]) for i in range(n - 1)])


def concat(w1, w2):
    if w1[-1] != w2[0]:
        raise ValueError("words do not meet")
    return tuple(w1) + tuple(w2[1:])


def boundary_factorization(W: WordPoset, r) -> Dict[tuple, tuple]:
    """Concatenation A_pr x A_rq -> words of A_pq passing through r."""
    A1 = WordPoset(W.ambient, W.p, r)
    A2 = WordPoset(W.ambient, r, W.q)
    return {(a, b): concat(a, b) for a in A1.elements for b in A2.elements}


def check_boundary_factorization(W: WordPoset, r) -> bool:
    A1 = WordPoset(W.ambient, W.p, r)
    A2 = WordPoset(W.ambient, r, W.q)
    fac = boundary_factorization(W, r)
    image = set(fac.values())
    target = {w for w in W.elements if r in W.interior(w)}
    if image != target or len(image) != len(fac):
        return False
    for (a, b), w in fac.items():
        if w not in W.depth or W.depth[w] != A1.depth[a] + A2.depth[b] + 1:
            return False
    # order isomorphism with the product order
    for (a, b), w in fac.items():
        for (a2, b2), w2 in fac.items():
            if W.leq(w, w2) != (A1.leq(a, a2) and A2.leq(b, b2)):
                return False
    return True


def check_factorization_associativity(P: Poset, p, r, s, q) -> bool:
    """(A_pr x A_rs) x A_sq and A_pr x (A_rs x A_sq) land on the same words."""
    A = WordPoset(P, p, r)
    B = WordPoset(P, r, s)
    C = WordPoset(P, s, q)
    for a in A.elements:
        for b in B.elements:
            for c in C.elements:
                if concat(concat(a, b), c) != concat(a, concat(b, c)):
                    return False
    return True


# -- partitions and the energy map --------------------------------------------------------------


def partition_poset(d: int) -> HomogeneousPoset:
    """Ordered partitions of d, finer below coarser."""
    if d <= 0:
        raise ValueError("d must be positive")
    parts = []
    for k in range(d):
        for cuts in itertools.combinations(range(1, d), k):
            pts = (0,) + cuts + (d,)
            parts.append(tuple(pts[i + 1] - pts[i] for i in range(len(pts) - 1)))
    cut = {a: _cuts(a) for a in parts}
    less = [(a, b) for a in parts for b in parts if a != b and cut[b] <= cut[a]]
    return HomogeneousPoset(parts, less)


def _cuts(part):
    out, acc = set(), 0
    for x in part[:-1]:
        acc += x
        out.add(acc)
    return frozenset(out)


def delta_map(W: WordPoset, actions: Dict) -> Dict[tuple, tuple]:
    """Word -> tuple of consecutive action gaps."""
    out = {}
    for w in W.elements:
        gaps = tuple(actions[w[i + 1]] - actions[w[i]] for i in range(len(w) - 1))
        if any(g <= 0 for g in gaps):
            raise NonPositiveEnergy(f"non-positive action gap along {w!r}")
        out[w] = gaps
    return out


def check_delta(W: WordPoset, actions: Dict) -> bool:
    """delta is order- and depth-preserving and commutes with factorization."""
    d = actions[W.q] - actions[W.p]
    delta = delta_map(W, actions)
    # in the partition poset of d, depth is (number of parts - 1) and the
    # order is reverse inclusion of cut sets; no need to enumerate it
    cuts = {w: _cuts(part) for w, part in delta.items()}
    for w, part in delta.items():
        if sum(part) != d or len(part) - 1 != W.depth[w]:
            return False
    for a in W.elements:
        for b in W.elements:
            if W.leq(a, b) and not cuts[b] <= cuts[a]:
                return False
    for r in {x for w in W.elements for x in W.interior(w)}:
        d1 = delta_map(WordPoset(W.ambient, W.p, r), actions)
        d2 = delta_map(WordPoset(W.ambient, r, W.q), actions)
        for (a, b), w in boundary_factorization(W, r).items():
            if delta[w] != d1[a] + d2[b]:
                return False
    return True


# -- subset and product posets ------------------------------------------------------------------


def subset_poset(F: Iterable) -> HomogeneousPoset:
    F = list(F)
    subsets = [frozenset(c) for k in range(len(F) + 1) for c in itertools.combinations(F, k)]
    less = [(a, b) for a in subsets for b in subsets if a != b and b <= a]
    return HomogeneousPoset(subsets, less)


def product_poset(A1: HomogeneousPoset, A2: HomogeneousPoset) -> HomogeneousPoset:
    elems = [(a, b) for a in A1.elements for b in A2.elements]
    less = [
        ((a, b), (c, e))
        for a, b in elems
        for c, e in elems
        if (a, b) != (c, e) and A1.leq(a, c) and A2.leq(b, e)
    ]
    return HomogeneousPoset(elems, less)


# -- stratified sets -----------------------------------------------------------------------------


class StratifiedSet:
    """Finite set of cells with a stratum label in a homogeneous poset."""

    def __init__(self, poset: HomogeneousPoset, strata: Dict, faces: Iterable = ()):
        self.poset = poset
        self.strata = dict(strata)
        self.cells = list(self.strata)
        for x, a in self.strata.items():
            if a not in poset.depth:
                raise ValueError(f"cell {x!r} has unknown stratum {a!r}")
        self.face_pairs = list(faces)
        for y, x in self.face_pairs:
            if not poset.leq(self.strata[y], self.strata[x]):
                raise IncompatibleStrata(f"face {y!r} of {x!r} sits in a higher stratum")

    def in_closed_stratum(self, x, alpha):
        return self.poset.leq(self.strata[x], alpha)

    def boundary(self, alpha) -> "StratifiedSet":
        """The closed stratum of alpha as a space over the down-set of alpha."""
        cache = self.__dict__.setdefault("_boundary_cache", {})
        if alpha not in cache:
            cache[alpha] = self._boundary(alpha)
        return cache[alpha]

    def _boundary(self, alpha):
        sub = self.poset.sub(self.poset.down(alpha))
        strata = {x: a for x, a in self.strata.items() if self.poset.leq(a, alpha)}
        faces = [(y, x) for y, x in self.face_pairs if y in strata and x in strata]
        return StratifiedSet(sub, strata, faces)


def cone_model(A: HomogeneousPoset) -> StratifiedSet:
    """One cell per stratum, faces given by the order."""
    return StratifiedSet(A, {a: a for a in A.elements}, A.relations())


def product_space(X1: StratifiedSet, X2: StratifiedSet) -> StratifiedSet:
    A = product_poset(X1.poset, X2.poset)
    strata = {(x, y): (X1.strata[x], X2.strata[y]) for x in X1.cells for y in X2.cells}
    return StratifiedSet(A, strata)


# -- collared points ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class CollaredPoint:
    base: object
    alpha: object
    coords: tuple  # sorted (face, Fraction) pairs
    width: Fraction = Fraction(1)

    def coord_map(self):
        return dict(self.coords)


def _key(x):
    return repr(x)


def make_point(base, alpha, coords: Dict, width=1) -> CollaredPoint:
    items = tuple(sorted(((j, Fraction(v)) for j, v in coords.items()), key=lambda kv: _key(kv[0])))
    return CollaredPoint(base, alpha, items, Fraction(width))


def _check_point(X: StratifiedSet, pt: CollaredPoint):
    A = X.poset
    if pt.alpha not in A.depth:
        raise ValueError(f"unknown component {pt.alpha!r}")
    if not X.in_closed_stratum(pt.base, pt.alpha):
        raise IncompatibleStrata(f"cell {pt.base!r} is not in the closed stratum of {pt.alpha!r}")
    t = pt.coord_map()
    if set(t) != set(A.faces(pt.alpha)):
        raise ValueError("coordinates must be indexed by the adjacent faces of the component")
    for v in t.values():
        if v < -pt.width or v > 0:
            raise CoordOutOfRange(f"coordinate {v} outside [-{pt.width}, 0]")


def outer_collar_representative(X: StratifiedSet, pt: CollaredPoint) -> CollaredPoint:
    """Drop zero coordinates, moving to the largest admissible component."""
    _check_point(X, pt)
    t = pt.coord_map()
    N = frozenset(j for j, v in t.items() if v != 0)
    beta = X.poset.element_with_faces(pt.alpha, N)
    return make_point(pt.base, beta, {j: t[j] for j in N}, pt.width)


def deepest_representative(X: StratifiedSet, pt: CollaredPoint) -> CollaredPoint:
    """Re-present the point in the component of the base cell's own stratum."""
    _check_point(X, pt)
    s = X.strata[pt.base]
    t = pt.coord_map()
    full = {j: t.get(j, Fraction(0)) for j in X.poset.faces(s)}
    return make_point(pt.base, s, full, pt.width)


def equivalent(X, p1, p2) -> bool:
    return outer_collar_representative(X, p1) == outer_collar_representative(X, p2)


def collar_stratum_label(X: StratifiedSet, pt: CollaredPoint):
    """Stratum of the point in the outer collaring: coordinates equal to -r
    select the faces."""
    deep = deepest_representative(X, pt)
    t = deep.coord_map()
    at_edge = frozenset(j for j, v in t.items() if v == -pt.width)
    return X.poset.element_with_faces(deep.alpha, at_edge)


def sample_point(X: StratifiedSet, rng: random.Random, width=1, corner=False) -> CollaredPoint:
    x = rng.choice(X.cells)
    alpha = rng.choice(X.poset.up(X.strata[x]))
    w = Fraction(width)
    coords = {}
    for j in sorted(X.poset.faces(alpha), key=_key):
        if corner:
            coords[j] = rng.choice([-w, Fraction(0)])
        else:
            u = rng.random()
            if u < 0.25:
                coords[j] = -w
            elif u < 0.5:
                coords[j] = Fraction(0)
            else:
                coords[j] = -w * Fraction(rng.randint(1, 999), 1000)
    return make_point(x, alpha, coords, w)


def corner_points(X: StratifiedSet, width=1):
    """Every point whose coordinates all lie in {-r, 0}."""
    w = Fraction(width)
    for x in X.cells:
        for alpha in X.poset.up(X.strata[x]):
            F = sorted(X.poset.faces(alpha), key=_key)
            for vals in itertools.product([-w, Fraction(0)], repeat=len(F)):
                yield make_point(x, alpha, dict(zip(F, vals)), w)


# -- closed strata and products ----------------------------------------------------------------------


def boundary_embed(X: StratifiedSet, alpha, pt: CollaredPoint) -> CollaredPoint:
    """Point of the collaring of the closed stratum of alpha, seen in the
    collaring of X: faces of alpha are set to -r, the remaining faces are
    matched through F_gamma = F_alpha + {k}."""
    A = X.poset
    Fa = A.faces(alpha)
    sub = X.boundary(alpha).poset
    t = pt.coord_map()
    out = {k: -pt.width for k in Fa}
    for g, v in t.items():
        extra = A.faces(g) - Fa
        if len(extra) != 1:
            raise IncompatibleStrata("closed stratum faces do not match")
        out[next(iter(extra))] = v
    if set(out) != set(A.faces(pt.alpha)):
        raise IncompatibleStrata("closed stratum faces do not match")
    return make_point(pt.base, pt.alpha, out, pt.width)


def boundary_project(X: StratifiedSet, alpha, pt: CollaredPoint) -> CollaredPoint:
    """Inverse of :func:`boundary_embed` on points labelled at or below alpha."""
    A = X.poset
    canon = outer_collar_representative(X, pt)
    Fa = A.faces(alpha)
    t = canon.coord_map()
    if not Fa <= set(t) or any(t[k] != -pt.width for k in Fa):
        raise IncompatibleStrata("point is not in the closed stratum of alpha")
    beta = canon.alpha
    out = {}
    for k, v in t.items():
        if k in Fa:
            continue
        g = A.element_with_faces(beta, Fa | {k})
        out[g] = v
    return make_point(canon.base, beta, out, pt.width)


def regroup(X1: StratifiedSet, X2: StratifiedSet, p1: CollaredPoint, p2: CollaredPoint) -> CollaredPoint:
    """Pair of collared points -> collared point of the product space."""
    if p1.width != p2.width:
        raise ValueError("widths differ")
    A1, A2 = X1.poset, X2.poset
    top1, top2 = A1.top_above(p1.alpha), A2.top_above(p2.alpha)
    coords = {}
    for j, v in p1.coords:
        coords[(j, top2)] = v
    for j, v in p2.coords:
        coords[(top1, j)] = v
    return make_point((p1.base, p2.base), (p1.alpha, p2.alpha), coords, p1.width)


def ungroup(X1: StratifiedSet, X2: StratifiedSet, pt: CollaredPoint):
    A1 = X1.poset
    a1, a2 = pt.alpha
    c1, c2 = {}, {}
    for (j1, j2), v in pt.coords:
        if A1.depth[j1] == 1:
            c1[j1] = v
        else:
            c2[j2] = v
    x1, x2 = pt.base
    return make_point(x1, a1, c1, pt.width), make_point(x2, a2, c2, pt.width)


@dataclass
class OuterProductReport:
    samples: int
    corner_samples: int
    failures: list

    @property
    def ok(self):
        return not self.failures

    def __bool__(self):
        return self.ok


def check_outer_product(X1: StratifiedSet, X2: StratifiedSet, samples=1000, width=1,
                        rng: Optional[random.Random] = None) -> OuterProductReport:
    """Check the closed-stratum identity on X1, X2 and X1 x X2, and the
    product regrouping, on random points plus every corner point."""
    rng = rng or random.Random(0)
    w = Fraction(width)
    XP = product_space(X1, X2)
    failures = []

    def boundary_identity(X, pt_sub, alpha):
        Y = X.boundary(alpha)
        emb = boundary_embed(X, alpha, pt_sub)
        lab_big = collar_stratum_label(X, emb)
        lab_small = collar_stratum_label(Y, pt_sub)
        if lab_big != lab_small or not X.poset.leq(lab_big, alpha):
            return "label"
        if outer_collar_representative(X, emb) != boundary_embed(X, alpha, outer_collar_representative(Y, pt_sub)):
            return "canonical"
        if boundary_project(X, alpha, emb) != outer_collar_representative(Y, pt_sub):
            return "inverse"
        return None

    def product_identity(p1, p2):
        q = regroup(X1, X2, p1, p2)
        if ungroup(X1, X2, q) != (p1, p2):
            return "ungroup"
        lab = collar_stratum_label(XP, q)
        if lab != (collar_stratum_label(X1, p1), collar_stratum_label(X2, p2)):
            return "label"
        c = outer_collar_representative(XP, q)
        if c != regroup(X1, X2, outer_collar_representative(X1, p1), outer_collar_representative(X2, p2)):
            return "canonical"
        return None

    n_corner = 0
    corner1 = list(corner_points(X1, w))
    corner2 = list(corner_points(X2, w))
    for p1 in corner1:
        for p2 in corner2:
            n_corner += 1
            why = product_identity(p1, p2)
            if why:
                failures.append(("product", why, p1, p2))
    for X in (X1, X2, XP):
        for alpha in X.poset.elements:
            Y = X.boundary(alpha)
            for p in corner_points(Y, w):
                n_corner += 1
                why = boundary_identity(X, p, alpha)
                if why:
                    failures.append(("boundary", why, alpha, p))
    for _ in range(samples):
        corner = rng.random() < 0.2
        p1 = sample_point(X1, rng, w, corner)
        p2 = sample_point(X2, rng, w, corner)
        why = product_identity(p1, p2)
        if why:
            failures.append(("product", why, p1, p2))
        X = rng.choice([X1, X2, XP])
        alpha = rng.choice(X.poset.elements)
        p = sample_point(X.boundary(alpha), rng, w, corner)
        why = boundary_identity(X, p, alpha)
        if why:
            failures.append(("boundary", why, alpha, p))
    return OuterProductReport(samples, n_corner, failures)


# -- maps --------------------------------------------------------------------------------------------


def collar_extend_map(X1: StratifiedSet, X2: StratifiedSet, f: Callable, iota: Callable,
                      pt: CollaredPoint, pad=0) -> CollaredPoint:
    """f x id on collar coordinates, faces matched along iota.

    A face j of alpha goes to the single face of iota(alpha) in
    F_iota(j) minus F_iota(top), where top is the maximal element above
    alpha; faces of iota(alpha) that are not hit get the value ``pad``.
    """
    _check_point(X1, pt)
    A1, A2 = X1.poset, X2.poset
    y = f(pt.base)
    ia = iota(pt.alpha)
    if y not in X2.strata or not A2.leq(X2.strata[y], ia):
        raise IncompatibleStrata(f"f({pt.base!r}) is not in the closed stratum of {ia!r}")
    base_faces = A2.faces(iota(A1.top_above(pt.alpha)))
    coords = {}
    for j, v in pt.coords:
        extra = A2.faces(iota(j)) - base_faces
        if len(extra) != 1:
            raise IncompatibleStrata(f"face {j!r} does not map to a single face")
        coords[next(iter(extra))] = v
    Ft = A2.faces(ia)
    if not set(coords) <= Ft:
        raise IncompatibleStrata("faces leave the target component")
    for k in Ft:
        coords.setdefault(k, Fraction(pad))
    return make_point(y, ia, coords, pt.width)


def check_poset_map(A1: HomogeneousPoset, A2: HomogeneousPoset, iota: Callable) -> bool:
    for a in A1.elements:
        for b in A1.elements:
            if A1.leq(a, b) and not A2.leq(iota(a), iota(b)):
                return False
    return True
