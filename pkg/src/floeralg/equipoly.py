"""Equivariant polynomial maps for finite abelian groups acting diagonally.

A group ``Z/m1 x ... x Z/ms`` acts on a coordinate through a weight
``(w1, ..., ws)``: the element ``g`` multiplies it by
``exp(2 pi i sum wk gk / mk)``.  A polynomial map ``V -> W`` is equivariant
exactly when each monomial ``v^a`` feeding output ``j`` has total weight
``sum ai w(vi)`` equal to ``w(wj)``; everything here is decided by that
rule, with Gaussian-rational coefficients and exact linear algebra.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix


class EmptyStratum(ValueError):
    pass


class NotEquivariant(ValueError):
    pass


def gauss(re, im=0):
    """Gaussian rational from rational-like parts."""
    from fractions import Fraction

    re, im = Fraction(re), Fraction(im)
    return QQ_I(QQ(re.numerator, re.denominator), QQ(im.numerator, im.denominator))


@dataclass(frozen=True)
class AbelianRep:
    group: Tuple[int, ...]
    weights: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        group = tuple(int(m) for m in self.group) or (1,)
        if any(m < 1 for m in group):
            raise ValueError("cyclic orders must be positive")
        ws = []
        for w in self.weights:
            w = tuple(int(x) for x in (w if isinstance(w, (tuple, list)) else (w,)))
            if len(w) != len(group):
                if not w and group == (1,):
                    w = (0,)
                else:
                    raise ValueError(f"weight {w} does not match group {group}")
            ws.append(tuple(x % m for x, m in zip(w, group)))
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "weights", tuple(ws))

    @property
    def dim(self):
        return len(self.weights)

    def elements(self):
        return list(itertools.product(*(range(m) for m in self.group)))

    def order(self):
        n = 1
        for m in self.group:
            n *= m
        return n

    def add_weights(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.group))

    def monomial_weight(self, alpha):
        acc = tuple(0 for _ in self.group)
        for a, w in zip(alpha, self.weights):
            acc = tuple((x + a * y) % m for x, y, m in zip(acc, w, self.group))
        return acc

    def fixes(self, g, i) -> bool:
        """Does g act trivially on coordinate i?"""
        return _pairing(self.weights[i], g, self.group) == 0

    def fixed_coords(self, H) -> List[int]:
        return [i for i in range(self.dim) if all(self.fixes(g, i) for g in H)]


def _pairing(w, g, group):
    """sum wk gk / mk as a fraction of a full turn, reduced mod 1."""
    from fractions import Fraction

    s = sum(Fraction(a * b, m) for a, b, m in zip(w, g, group))
    return s - (s.numerator // s.denominator)


def same_group(V: AbelianRep, W: AbelianRep):
    if V.group != W.group:
        raise ValueError("representations over different groups")


def monomials(n, d):
    """Exponent tuples in n variables of total degree <= d."""
    out = []
    for total in range(d + 1):
        for c in itertools.combinations_with_replacement(range(n), total):
            a = [0] * n
            for i in c:
                a[i] += 1
            out.append(tuple(a))
    return out


def poly_basis(V: AbelianRep, W: AbelianRep, d: int) -> List[Tuple[int, tuple]]:
    same_group(V, W)
    mons = monomials(V.dim, d)
    wts = {a: V.monomial_weight(a) for a in mons}
    return [(j, a) for j in range(W.dim) for a in mons if wts[a] == W.weights[j]]


def dim_poly(V: AbelianRep, W: AbelianRep, d: int) -> int:
    return len(poly_basis(V, W, d))


# -- polynomials ------------------------------------------------------------------


@dataclass
class EquivariantPolynomial:
    V: AbelianRep
    W: AbelianRep
    degree: int
    coeffs: List[Dict[tuple, object]] = field(default_factory=list)

    def __post_init__(self):
        same_group(self.V, self.W)
        if not self.coeffs:
            self.coeffs = [{} for _ in range(self.W.dim)]
        if len(self.coeffs) != self.W.dim:
            raise ValueError("one coefficient map per output coordinate")
        clean = []
        for j, cj in enumerate(self.coeffs):
            out = {}
            for a, c in cj.items():
                c = QQ_I.convert(c) if not isinstance(c, type(QQ_I.zero)) else c
                if c == QQ_I.zero:
                    continue
                a = tuple(a)
                if len(a) != self.V.dim or sum(a) > self.degree or min(a, default=0) < 0:
                    raise ValueError(f"bad exponent {a}")
                if self.V.monomial_weight(a) != self.W.weights[j]:
                    raise NotEquivariant(f"monomial {a} cannot feed output {j}")
                out[a] = c
            clean.append(out)
        self.coeffs = clean

    def is_member(self) -> bool:
        return all(
            self.V.monomial_weight(a) == self.W.weights[j] and sum(a) <= self.degree
            for j, cj in enumerate(self.coeffs)
            for a in cj
        )

    def is_zero(self):
        return not any(self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, EquivariantPolynomial)
            and self.V == other.V
            and self.W == other.W
            and self.coeffs == other.coeffs
        )

    @classmethod
    def from_vector(cls, V, W, d, vec, basis=None):
        basis = basis if basis is not None else poly_basis(V, W, d)
        coeffs = [{} for _ in range(W.dim)]
        for (j, a), c in zip(basis, vec):
            if c != QQ_I.zero:
                coeffs[j][a] = c
        return cls(V, W, d, coeffs)

    def to_vector(self, basis=None):
        basis = basis if basis is not None else poly_basis(self.V, self.W, self.degree)
        return [self.coeffs[j].get(a, QQ_I.zero) for j, a in basis]


def _mono(v, a):
    r = QQ_I.one
    for x, k in zip(v, a):
        if k:
            r = r * x ** k
    return r


def evaluate(v: Sequence, P: EquivariantPolynomial) -> tuple:
    if len(v) != P.V.dim:
        raise ValueError("point has the wrong dimension")
    out = []
    for cj in P.coeffs:
        acc = QQ_I.zero
        for a, c in cj.items():
            acc = acc + c * _mono(v, a)
        out.append(acc)
    return tuple(out)


def random_polynomial(V, W, d, rng: random.Random, density=0.7, bound=5) -> EquivariantPolynomial:
    coeffs = [{} for _ in range(W.dim)]
    for j, a in poly_basis(V, W, d):
        if rng.random() < density:
            coeffs[j][a] = QQ_I(rng.randint(-bound, bound), rng.randint(-bound, bound))
    return EquivariantPolynomial(V, W, d, coeffs)


def random_point(n, rng, bound=4, nonzero=False):
    out = []
    for _ in range(n):
        while True:
            x = QQ_I(QQ(rng.randint(-bound, bound), rng.randint(1, 3)), rng.randint(-bound, bound))
            if not nonzero or x != QQ_I.zero:
                break
        out.append(x)
    return tuple(out)


# -- products -------------------------------------------------------------------------


def product_rep(R1: AbelianRep, R2: AbelianRep) -> AbelianRep:
    """R1 + R2 over G1 x G2, each summand acted on by its own factor."""
    z1 = tuple(0 for _ in R1.group)
    z2 = tuple(0 for _ in R2.group)
    ws = [w + z2 for w in R1.weights] + [z1 + w for w in R2.weights]
    return AbelianRep(R1.group + R2.group, tuple(ws))


def phi_embed(P1: EquivariantPolynomial, P2: EquivariantPolynomial) -> EquivariantPolynomial:
    """(v1, v2) -> (P1(v1), P2(v2))."""
    V = product_rep(P1.V, P2.V)
    W = product_rep(P1.W, P2.W)
    n1, n2 = P1.V.dim, P2.V.dim
    pad2 = (0,) * n2
    pad1 = (0,) * n1
    coeffs = [{a + pad2: c for a, c in cj.items()} for cj in P1.coeffs]
    coeffs += [{pad1 + a: c for a, c in cj.items()} for cj in P2.coeffs]
    return EquivariantPolynomial(V, W, max(P1.degree, P2.degree), coeffs)


def psi_split(v, P: EquivariantPolynomial, split_v: Tuple[AbelianRep, AbelianRep],
              split_w: Tuple[AbelianRep, AbelianRep]):
    """((v1, P_W1(., v2)), (v2, P_W2(v1, .))) for P over a product.

    ``split_v`` and ``split_w`` give the factor representations, so that
    ``P.V == product_rep(*split_v)`` and likewise for W.
    """
    V1, V2 = split_v
    W1, W2 = split_w
    if P.V != product_rep(V1, V2) or P.W != product_rep(W1, W2):
        raise ValueError("polynomial is not over the given product")
    n1 = V1.dim
    v = tuple(v)
    v1, v2 = v[:n1], v[n1:]
    c1 = [_freeze(cj, n1, v2, second=True) for cj in P.coeffs[: W1.dim]]
    c2 = [_freeze(cj, n1, v1, second=False) for cj in P.coeffs[W1.dim:]]
    return (v1, EquivariantPolynomial(V1, W1, P.degree, c1)), (v2, EquivariantPolynomial(V2, W2, P.degree, c2))


def _freeze(cj, n1, fixed, second):
    out: Dict[tuple, object] = {}
    for a, c in cj.items():
        a1, a2 = a[:n1], a[n1:]
        keep, frozen = (a1, a2) if second else (a2, a1)
        val = c * _mono(fixed, frozen)
        if val == QQ_I.zero:
            continue
        out[keep] = out.get(keep, QQ_I.zero) + val
    return {a: c for a, c in out.items() if c != QQ_I.zero}


# -- stabilizers and the zero locus ---------------------------------------------------------


def subgroup(rep: AbelianRep, gens) -> frozenset:
    """Subgroup generated by ``gens`` (tuples of residues)."""
    zero = tuple(0 for _ in rep.group)
    H = {zero}
    frontier = [zero]
    gens = [tuple(x) for x in gens]
    if any(len(x) != len(rep.group) for x in gens):
        raise ValueError(f"subgroup generators must have {len(rep.group)} components")
    gens = [tuple(g % m for g, m in zip(x, rep.group)) for x in gens]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = rep.add_weights(x, g)
            if y not in H:
                H.add(y)
                frontier.append(y)
    return frozenset(H)


def stabilizer(rep: AbelianRep, v) -> frozenset:
    support = [i for i, x in enumerate(v) if x != QQ_I.zero]
    return frozenset(g for g in rep.elements() if all(rep.fixes(g, i) for i in support))


def stratum_nonempty(rep: AbelianRep, H) -> bool:
    """Some point has stabilizer exactly H iff the stabilizer of a generic
    point of the H-fixed subspace is H itself."""
    fixed = rep.fixed_coords(H)
    generic = tuple(QQ_I.one if i in fixed else QQ_I.zero for i in range(rep.dim))
    return stabilizer(rep, generic) == frozenset(H)


def sample_stratum_point(rep: AbelianRep, H, rng: random.Random):
    H = frozenset(H)
    if not stratum_nonempty(rep, H):
        raise EmptyStratum("no point has stabilizer exactly H")
    fixed = set(rep.fixed_coords(H))
    v = tuple(random_point(1, rng, nonzero=True)[0] if i in fixed else QQ_I.zero for i in range(rep.dim))
    assert stabilizer(rep, v) == H
    return v


def evaluation_matrix(V, W, d, v, basis=None) -> DomainMatrix:
    """Matrix of P -> P(v) in the monomial basis."""
    basis = basis if basis is not None else poly_basis(V, W, d)
    rows = [[QQ_I.zero] * len(basis) for _ in range(W.dim)]
    for k, (j, a) in enumerate(basis):
        rows[j][k] = _mono(v, a)
    return DomainMatrix(rows, (W.dim, len(basis)), QQ_I)


@dataclass
class ZPoint:
    v: tuple
    P: EquivariantPolynomial
    stabilizer: frozenset


def sample_z_point(V, W, d, H, rng: random.Random) -> ZPoint:
    """Random (v, P) with P(v) = 0 and the stabilizer of v exactly H."""
    v = sample_stratum_point(V, H, rng)
    basis = poly_basis(V, W, d)
    if not basis:
        return ZPoint(v, EquivariantPolynomial(V, W, d), frozenset(H))
    M = evaluation_matrix(V, W, d, v, basis)
    ns = M.nullspace().to_Matrix() if W.dim else None
    if W.dim == 0:
        vec = [QQ_I(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in basis]
    else:
        vec = [QQ_I.zero] * len(basis)
        for r in range(ns.rows):
            c = QQ_I(rng.randint(-3, 3), rng.randint(-3, 3))
            row = [QQ_I.from_sympy(x) for x in ns.row(r)]
            vec = [a + c * b for a, b in zip(vec, row)]
    P = EquivariantPolynomial.from_vector(V, W, d, vec, basis)
    if any(x != QQ_I.zero for x in evaluate(v, P)):
        raise ArithmeticError("sampled polynomial does not vanish")
    return ZPoint(v, P, frozenset(H))


@dataclass
class DimensionReport:
    dim_poly: int
    dim_v_fixed: int
    dim_w_fixed: int
    ranks: List[int]
    min_degree: Optional[int]

    @property
    def surjective(self):
        return all(r == self.dim_w_fixed for r in self.ranks)

    @property
    def expected_dimension(self):
        return self.dim_poly + self.dim_v_fixed - self.dim_w_fixed

    def to_json(self):
        return {
            "dim_poly": self.dim_poly,
            "dim_V_H": self.dim_v_fixed,
            "dim_W_H": self.dim_w_fixed,
            "trials": len(self.ranks),
            "ranks": self.ranks,
            "surjective": self.surjective,
            "dimension": self.expected_dimension,
            "min_degree": self.min_degree,
        }


def check_dimension_formula(V, W, d, H, trials=50, rng: Optional[random.Random] = None) -> DimensionReport:
    """Rank of P -> P(v) at random v with stabilizer exactly H.

    The image always lies in W^H; when the rank equals dim W^H the zero
    locus over that stratum is smooth of dimension
    dim Poly + dim V^H - dim W^H there.
    """
    rng = rng or random.Random(0)
    H = frozenset(H)
    dw = len(W.fixed_coords(H))
    dv = len(V.fixed_coords(H))
    points = [sample_stratum_point(V, H, rng) for _ in range(trials)]
    ranks = []
    for v in points:
        M = evaluation_matrix(V, W, d, v)
        ranks.append(M.rank() if M.shape[1] else 0)
    min_deg = None
    for dd in range(d + 1):
        ok = True
        for v in points:
            M = evaluation_matrix(V, W, dd, v)
            if (M.rank() if M.shape[1] else 0) != dw:
                ok = False
                break
        if ok:
            min_deg = dd
            break
    return DimensionReport(dim_poly(V, W, d), dv, dw, ranks, min_deg)


# (group, V weights, W weights, degree, generators of H) on which the
# evaluation-rank check is run; each line exercises a different shape of
# fixed subspace.
DIMENSION_TABLE = [
    ((1,), [(0,)], [(0,)], 1, []),
    ((2,), [(1,)], [(1,)], 2, []),
    ((2,), [(1,)], [(1,)], 2, [(1,)]),
    ((3,), [(1,)], [(0,), (2,)], 3, []),
    ((2, 2), [(1, 0), (0, 1)], [(1, 1)], 2, []),
    ((6,), [(2,), (3,)], [(1,)], 3, []),
    ((4,), [(1,), (2,)], [(2,), (0,)], 2, [(2,)]),
]


def table_instances():
    """DIMENSION_TABLE as (V, W, d, H) tuples."""
    out = []
    for group, vw, ww, d, hg in DIMENSION_TABLE:
        V = AbelianRep(group, vw)
        W = AbelianRep(group, ww)
        out.append((V, W, d, subgroup(V, hg)))
    return out
