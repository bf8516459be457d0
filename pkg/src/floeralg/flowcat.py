"""Flow categories and bimodules at the level of signed incidence counts.

A flow category is recorded by one generator per orbit of the deck group
(with an index and an action) and a list of incidences ``from -> to`` with an
exponent ``t`` and a signed count.  The chain complex is free over the
Novikov ring on the generators; the differential sends ``from`` to
``sum count * T^t * to``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .linalg import LambdaMatrix, NovikovRing, kernel_basis, subquotient, ModuleStructure
from .novikov import DEFAULT_PRECISION, ONE, ZERO, NovikovSeries


class ValidationFailed(ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = violations


class ShapeMismatch(ValueError):
    pass


class NotUnitriangular(ValueError):
    pass


class EpsilonTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    id: str
    index: int
    action: int


@dataclass(frozen=True)
class Incidence:
    src: str
    dst: str
    t: int
    count: int


@dataclass
class FlowCategoryData:
    two_n: int
    omega: int
    generators: List[GeneratorSpec]
    incidences: List[Incidence] = field(default_factory=list)

    def gen(self, gid) -> GeneratorSpec:
        return self._by_id()[gid]

    def _by_id(self):
        return {g.id: g for g in self.generators}

    def residue(self, index):
        return index % self.two_n if self.two_n else index


@dataclass
class BimoduleCounts:
    source: FlowCategoryData
    target: FlowCategoryData
    energy_constant: int
    incidences: List[Incidence] = field(default_factory=list)
    degree: int = 0


# -- reports --------------------------------------------------------------------


@dataclass
class CheckResult:
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


# -- validation --------------------------------------------------------------------


def validate(fc: FlowCategoryData) -> CheckResult:
    bad = []
    if fc.two_n < 0 or fc.two_n % 2:
        bad.append(f"two_n must be a nonnegative even integer, got {fc.two_n}")
    if fc.omega <= 0:
        bad.append(f"omega must be positive, got {fc.omega}")
    seen = set()
    for g in fc.generators:
        if g.id in seen:
            bad.append(f"duplicate generator id {g.id!r}")
        seen.add(g.id)
    by_id = fc._by_id()
    for k, inc in enumerate(fc.incidences):
        where = f"incidence {k} ({inc.src}->{inc.dst}, t={inc.t})"
        if inc.src not in by_id or inc.dst not in by_id:
            bad.append(f"{where}: unknown generator")
            continue
        p, q = by_id[inc.src], by_id[inc.dst]
        if fc.residue(q.index - p.index + 1) != 0:
            bad.append(f"{where}: degree rule violated (index {p.index} -> {q.index})")
        if not q.action + fc.omega * inc.t > p.action:
            bad.append(f"{where}: energy not positive ({q.action} + {fc.omega}*{inc.t} <= {p.action})")
    return CheckResult(not bad, bad)


def validate_bimodule(b: BimoduleCounts) -> CheckResult:
    bad = []
    for fc, name in ((b.source, "source"), (b.target, "target")):
        rep = validate(fc)
        bad += [f"{name}: {v}" for v in rep.violations]
    if b.source.two_n != b.target.two_n:
        bad.append("source and target gradings differ")
    if b.source.omega != b.target.omega:
        bad.append("source and target periods differ")
    src, tgt = b.source._by_id(), b.target._by_id()
    two_n = b.source.two_n
    for k, inc in enumerate(b.incidences):
        where = f"incidence {k} ({inc.src}->{inc.dst}, t={inc.t})"
        if inc.src not in src or inc.dst not in tgt:
            bad.append(f"{where}: unknown generator")
            continue
        p, q = src[inc.src], tgt[inc.dst]
        diff = q.index - p.index - b.degree
        if (diff % two_n if two_n else diff) != 0:
            bad.append(f"{where}: degree rule violated (index {p.index} -> {q.index})")
        if not p.action < q.action + b.source.omega * inc.t + b.energy_constant:
            bad.append(f"{where}: energy bound violated")
    return CheckResult(not bad, bad)


# -- graded complexes and maps ------------------------------------------------------


def shift_class(i, k, two_n):
    return (i + k) % two_n if two_n else i + k


@dataclass
class GradedLambdaComplex:
    two_n: int
    gens: Dict[int, List[str]]
    d: Dict[int, LambdaMatrix]
    precision: int = DEFAULT_PRECISION

    @property
    def ring(self):
        return NovikovRing(self.precision)

    def classes(self):
        if self.two_n:
            return list(range(self.two_n))
        present = [i for i, g in self.gens.items() if g]
        return sorted(present)

    def generators(self, i):
        return self.gens.get(i, [])

    def diff(self, i) -> LambdaMatrix:
        """d_i from class i to class i-1."""
        if i in self.d:
            return self.d[i]
        lo = self.generators(shift_class(i, -1, self.two_n))
        return LambdaMatrix.zeros(len(lo), len(self.generators(i)), self.ring)

    def rank(self, i=None):
        if i is None:
            return sum(len(g) for g in self.gens.values())
        return len(self.generators(i))


@dataclass
class GradedMap:
    """Family of Λ-matrices, one per source class, shifting class by ``degree``."""

    degree: int
    blocks: Dict[int, LambdaMatrix]

    def block(self, i, source: GradedLambdaComplex, target: GradedLambdaComplex):
        if i in self.blocks:
            return self.blocks[i]
        j = shift_class(i, self.degree, source.two_n)
        return LambdaMatrix.zeros(len(target.generators(j)), len(source.generators(i)), source.ring)


def _entry_matrix(rows_ids, cols_ids, triples, ring):
    """Matrix with entry (row, col) = sum count * T^t over (col, row, t, count)."""
    ri = {g: k for k, g in enumerate(rows_ids)}
    ci = {g: k for k, g in enumerate(cols_ids)}
    acc: Dict[tuple, dict] = {}
    for src, dst, t, count in triples:
        cell = acc.setdefault((ri[dst], ci[src]), {})
        cell[t] = cell.get(t, 0) + count
    rows = [[ZERO] * len(cols_ids) for _ in rows_ids]
    for (r, c), coeffs in acc.items():
        rows[r][c] = NovikovSeries.from_dict(coeffs)
    return LambdaMatrix(rows, len(cols_ids), ring)


def _class_gens(fc: FlowCategoryData):
    gens: Dict[int, List[str]] = {}
    if fc.two_n:
        for i in range(fc.two_n):
            gens[i] = []
    for g in fc.generators:
        gens.setdefault(fc.residue(g.index), []).append(g.id)
    return gens


def build_complex(fc: FlowCategoryData, precision: int = DEFAULT_PRECISION) -> GradedLambdaComplex:
    rep = validate(fc)
    if not rep:
        raise ValidationFailed(rep.violations)
    ring = NovikovRing(precision)
    gens = _class_gens(fc)
    by_id = fc._by_id()
    per_class: Dict[int, list] = {}
    for inc in fc.incidences:
        i = fc.residue(by_id[inc.src].index)
        per_class.setdefault(i, []).append((inc.src, inc.dst, inc.t, inc.count))
    classes = set(gens)
    if not fc.two_n:
        classes |= {i + 1 for i in gens} | {i - 1 for i in gens}
    d = {}
    for i in sorted(classes):
        lo = gens.get(shift_class(i, -1, fc.two_n), [])
        d[i] = _entry_matrix(lo, gens.get(i, []), per_class.get(i, []), ring)
    return GradedLambdaComplex(fc.two_n, gens, d, precision)


def chain_map(b: BimoduleCounts, precision: int = DEFAULT_PRECISION) -> GradedMap:
    rep = validate_bimodule(b)
    if not rep:
        raise ValidationFailed(rep.violations)
    ring = NovikovRing(precision)
    sg, tg = _class_gens(b.source), _class_gens(b.target)
    src = b.source._by_id()
    two_n = b.source.two_n
    per_class: Dict[int, list] = {}
    for inc in b.incidences:
        i = b.source.residue(src[inc.src].index)
        per_class.setdefault(i, []).append((inc.src, inc.dst, inc.t, inc.count))
    blocks = {}
    for i in sorted(set(sg) | set(per_class)):
        j = shift_class(i, b.degree, two_n)
        blocks[i] = _entry_matrix(tg.get(j, []), sg.get(i, []), per_class.get(i, []), ring)
    return GradedMap(b.degree, blocks)


def _violations(M: LambdaMatrix, label):
    out = []
    for r, row in enumerate(M.entries):
        for c, x in enumerate(row):
            if x.terms:
                out.append({"where": label, "row": r, "col": c, "exponent": x.terms[0][0]})
    return out


def check_d_squared(c: GradedLambdaComplex) -> CheckResult:
    bad = []
    for i in c.classes():
        up = shift_class(i, 1, c.two_n)
        if not c.generators(up) or not c.generators(shift_class(i, -1, c.two_n)):
            continue
        prod = c.diff(i) @ c.diff(up)
        bad += _violations(prod, f"d{i}*d{up}")
    return CheckResult(not bad, bad)


def _all_classes(*cxs):
    out = set()
    for c in cxs:
        out |= set(c.classes())
    return sorted(out)


def compose(f: GradedMap, g: GradedMap, a, b, c) -> GradedMap:
    """f after g, where g: a -> b and f: b -> c."""
    blocks = {}
    for i in a.classes():
        j = shift_class(i, g.degree, a.two_n)
        blocks[i] = f.block(j, b, c) @ g.block(i, a, b)
    return GradedMap(f.degree + g.degree, blocks)


def check_chain_map(psi: GradedMap, source: GradedLambdaComplex, target: GradedLambdaComplex) -> CheckResult:
    """psi_{i-1} d^src_i = d^tgt_i psi_i for every class."""
    if psi.degree != 0:
        raise ShapeMismatch("a chain map has degree 0")
    bad = []
    for i in _all_classes(source, target):
        lo = shift_class(i, -1, source.two_n)
        lhs = psi.block(lo, source, target) @ source.diff(i)
        rhs = target.diff(i) @ psi.block(i, source, target)
        bad += _violations(lhs - rhs, f"class {i}")
    return CheckResult(not bad, bad)


def check_unitriangular(m: GradedMap) -> bool:
    for M in m.blocks.values():
        if M.nrows != M.ncols:
            return False
        for r, row in enumerate(M.entries):
            for c, x in enumerate(row):
                y = x - ONE if r == c else x
                if y.terms and y.terms[0][0] < 1:
                    return False
    return True


def invert_unitriangular(m: GradedMap, out_precision: int = DEFAULT_PRECISION) -> GradedMap:
    """Geometric series sum_k (-N)^k with N = m - Id, cut at T^out_precision.

    Evaluated as (Id - N)(Id + N^2)(Id + N^4)...: val(N) >= 1, so the
    squares vanish mod T^out_precision after about log2 steps.
    """
    if not check_unitriangular(m):
        raise NotUnitriangular("map is not Id plus positive valuation")
    blocks = {}
    for i, M in m.blocks.items():
        ring = NovikovRing(out_precision)
        n = M.nrows
        ident = LambdaMatrix.identity(n, ring)
        N = LambdaMatrix(M.entries, n, ring) - ident
        N = _truncate(N, out_precision)
        total = ident - N
        square = _truncate(N @ N, out_precision)
        while not square.is_zero():
            total = _truncate(total @ (ident + square), out_precision)
            square = _truncate(square @ square, out_precision)
        blocks[i] = _truncate(total, out_precision)
    return GradedMap(m.degree, blocks)


def _truncate(M: LambdaMatrix, K):
    return LambdaMatrix([[x.truncate(K) for x in row] for row in M.entries], M.ncols, M.ring)


def check_homotopy(pearl: GradedMap, ssp: GradedMap, pss: GradedMap, h: GradedMap,
                   morse: GradedLambdaComplex, floer: Optional[GradedLambdaComplex] = None) -> CheckResult:
    """pearl - ssp.pss = d h - h d on the Morse side, h raising class by one."""
    if h.degree != 1 or pearl.degree or ssp.degree or pss.degree:
        raise ShapeMismatch("expected chain maps of degree 0 and h of degree +1")
    floer = floer or morse
    two_n = morse.two_n
    bad = []
    for i in morse.classes():
        up, lo = shift_class(i, 1, two_n), shift_class(i, -1, two_n)
        P = pearl.block(i, morse, morse)
        S = ssp.block(i, floer, morse) @ pss.block(i, morse, floer)
        H_i = h.block(i, morse, morse)
        H_lo = h.block(lo, morse, morse)
        if P.shape != S.shape:
            raise ShapeMismatch(f"class {i}: pearl {P.shape} vs composite {S.shape}")
        dh = morse.diff(up) @ H_i if morse.generators(up) else None
        hd = H_lo @ morse.diff(i) if morse.generators(lo) else None
        rhs = LambdaMatrix.zeros(P.nrows, P.ncols, morse.ring)
        if dh is not None:
            rhs = rhs + dh
        if hd is not None:
            rhs = rhs - hd
        bad += _violations(P - S - rhs, f"class {i}")
    return CheckResult(not bad, bad)


def homology(c: GradedLambdaComplex) -> Dict[int, ModuleStructure]:
    out = {}
    for i in c.classes():
        n = len(c.generators(i))
        if n == 0:
            out[i] = ModuleStructure(0, [], "Lambda", c.precision)
            continue
        K = kernel_basis(c.diff(i))
        up = shift_class(i, 1, c.two_n)
        img = c.diff(up)
        if K.ncols == 0:
            out[i] = ModuleStructure(0, [], "Lambda", c.precision)
            continue
        s = subquotient(K, img)
        if s.certified_precision is None:
            s.certified_precision = c.precision
        out[i] = s
    return out


# -- Morse data --------------------------------------------------------------------------


def morse_flow_category(crit, incidences, two_n=0, omega=1000, shift=0, epsilon=None) -> FlowCategoryData:
    """Flow category of a Morse function on a closed manifold.

    ``crit`` lists (id, morse_index, f_value); flows ascend, so an incidence
    goes from a critical point of Morse index k to one of index k+1.  The
    index is ``shift - morse_index`` (``shift`` is half the real dimension
    in the symplectic convention) and the action is ``epsilon * f`` after
    moving the minimum to 0.  ``epsilon=None`` picks the smallest scale
    making all actions integral.
    """
    from fractions import Fraction
    from math import gcd

    vals = {cid: Fraction(f) for cid, _, f in crit}
    fmin = min(vals.values()) if vals else Fraction(0)
    rel = {cid: v - fmin for cid, v in vals.items()}
    if epsilon is None:
        den = 1
        for v in rel.values():
            den = den * v.denominator // gcd(den, v.denominator)
        nums = [int(v * den) for v in rel.values()]
        g = 0
        for x in nums:
            g = gcd(g, x)
        epsilon = Fraction(den, g) if g else Fraction(1)
    epsilon = Fraction(epsilon)
    gens = []
    for cid, morse_index, _ in crit:
        a = epsilon * rel[cid]
        if a.denominator != 1:
            raise ValueError(f"action of {cid} is not integral for epsilon={epsilon}")
        if a >= omega:
            raise EpsilonTooLarge(f"action {a} of {cid} is not below omega={omega}")
        idx = shift - morse_index
        gens.append(GeneratorSpec(cid, idx % two_n if two_n else idx, int(a)))
    incs = []
    for inc in incidences:
        if isinstance(inc, Incidence):
            incs.append(inc)
        else:
            src, dst, count = inc[:3]
            incs.append(Incidence(src, dst, 0, count))
    return FlowCategoryData(two_n, omega, gens, incs)


def regrade(fc: FlowCategoryData, two_n: int) -> FlowCategoryData:
    """Collapse an integer grading to Z/two_n."""
    if fc.two_n and two_n and fc.two_n % two_n:
        raise ValueError("new period must divide the old one")
    gens = [GeneratorSpec(g.id, g.index % two_n if two_n else g.index, g.action) for g in fc.generators]
    return FlowCategoryData(two_n, fc.omega, gens, list(fc.incidences))


def direct_sum(a: FlowCategoryData, b: FlowCategoryData, prefix="pad_") -> FlowCategoryData:
    if a.two_n != b.two_n or a.omega != b.omega:
        raise ValueError("incompatible flow categories")
    ren = {g.id: prefix + g.id for g in b.generators}
    gens = list(a.generators) + [GeneratorSpec(ren[g.id], g.index, g.action) for g in b.generators]
    incs = list(a.incidences) + [Incidence(ren[i.src], ren[i.dst], i.t, i.count) for i in b.incidences]
    return FlowCategoryData(a.two_n, a.omega, gens, incs)


# -- JSON -------------------------------------------------------------------------------------


def flow_category_from_json(doc) -> FlowCategoryData:
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        gens = [GeneratorSpec(str(g["id"]), int(g["index"]), int(g["action"])) for g in doc["generators"]]
        incs = [
            Incidence(str(i["from"]), str(i["to"]), int(i.get("t", 0)), int(i["count"]))
            for i in doc.get("incidences", [])
        ]
        return FlowCategoryData(int(doc["two_n"]), int(doc["omega"]), gens, incs)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed flow category document: {exc!r}") from None


def flow_category_to_json(fc: FlowCategoryData) -> dict:
    return {
        "two_n": fc.two_n,
        "omega": fc.omega,
        "generators": [{"id": g.id, "index": g.index, "action": g.action} for g in fc.generators],
        "incidences": [
            {"from": i.src, "to": i.dst, "t": i.t, "count": i.count} for i in fc.incidences
        ],
    }


def bimodule_from_json(doc, source=None, target=None) -> BimoduleCounts:
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        src = source or flow_category_from_json(doc["source"])
        tgt = target or flow_category_from_json(doc["target"])
        incs = [
            Incidence(str(i["from"]), str(i["to"]), int(i.get("t", 0)), int(i["count"]))
            for i in doc.get("incidences", [])
        ]
        return BimoduleCounts(src, tgt, int(doc["energy_constant"]), incs, int(doc.get("degree", 0)))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed bimodule document: {exc!r}") from None


def identity_bimodule(fc: FlowCategoryData, energy_constant=1) -> BimoduleCounts:
    incs = [Incidence(g.id, g.id, 0, 1) for g in fc.generators]
    return BimoduleCounts(fc, fc, energy_constant, incs)


# -- synthetic homotopy data -----------------------------------------------------------------


@dataclass
class SyntheticHomotopy:
    morse: GradedLambdaComplex
    floer: GradedLambdaComplex
    pss: GradedMap
    ssp: GradedMap
    h: GradedMap
    pearl: GradedMap
    comparison: GradedMap  # ssp after pss, of the form Id + T*A


def _rand_laurent(rng, lo=-1, hi=2, cmax=3, terms=2):
    coeffs = {}
    for _ in range(rng.randint(1, terms)):
        coeffs[rng.randint(lo, hi)] = rng.randint(-cmax, cmax)
    return NovikovSeries.from_dict(coeffs)


def _elementary_pair(n, rng):
    """A random unimodular Λ-matrix and its inverse, as products of
    elementary row operations with Laurent monomial multipliers."""
    E = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    Einv = [row[:] for row in E]
    if n < 2:
        return E, Einv
    for _ in range(2 * n):
        i, j = rng.sample(range(n), 2)
        c = NovikovSeries.monomial(rng.choice([-2, -1, 1, 2]), rng.randint(-1, 1))
        # row_i += c row_j on E; inverse: column_j -= c column_i
        E[i] = [a + c * b for a, b in zip(E[i], E[j])]
        for row in Einv:
            row[j] = row[j] - c * row[i]
    return E, Einv


def _mat(rows, ncols, ring):
    return LambdaMatrix(rows, ncols, ring)


def _detectable(cx: GradedLambdaComplex):
    """Every single-entry change of a degree +1 map changes d h - h d."""
    for i in cx.classes():
        up = shift_class(i, 1, cx.two_n)
        D = cx.diff(up)  # class up -> class i
        # entry (a in class up, b in class i) of h_i: seen via column a or row b of D
        zero_cols = [c for c in range(D.ncols) if all(not D[r, c].terms for r in range(D.nrows))]
        zero_rows = [r for r in range(D.nrows) if all(not x.terms for x in D.entries[r])]
        if zero_cols and zero_rows:
            return False
    return True


def synthetic_homotopy(rng: random.Random, precision=DEFAULT_PRECISION) -> SyntheticHomotopy:
    """Random Z/2-graded Morse/Floer data satisfying the homotopy identity.

    The Morse complex is a random basis change of a direct sum of small
    blocks with d^2 = 0; the Floer complex adds an acyclic summand and a
    further basis change W.  Then pss = W o inclusion, ssp = phi o projection
    o W^-1 with phi = Id + T(dk + kd), and pearl is defined through the
    homotopy identity from a random h.
    """
    ring = NovikovRing(precision)
    two_n = 2
    for _attempt in range(100):
        # base blocks: (a0 -> b1), (a1 -> b0) plus a few cycles
        n_pairs = [rng.randint(1, 2), rng.randint(1, 2)]
        n_free = [rng.randint(0, 1), rng.randint(0, 1)]
        gens = {0: [], 1: []}
        edges = []  # (src class, src pos, dst pos, coefficient)
        for cls in (0, 1):
            for k in range(n_pairs[cls]):
                gens[cls].append(f"a{cls}_{k}")
                gens[1 - cls].append(f"b{1 - cls}_{k}")
                edges.append((cls, f"a{cls}_{k}", f"b{1 - cls}_{k}", rng.choice([1, 2, 3, -2])))
            for k in range(n_free[cls]):
                gens[cls].append(f"z{cls}_{k}")
        base = _base_diffs(gens, edges, ring)
        # change of basis per class: new = G old, d' = G d G^-1
        G = {c: _elementary_pair(len(gens[c]), rng) for c in (0, 1)}
        d = {}
        for c in (0, 1):
            lo = 1 - c
            d[c] = _mat(G[lo][0], len(gens[lo]), ring) @ base[c] @ _mat(G[c][1], len(gens[c]), ring)
        morse = GradedLambdaComplex(two_n, {c: list(gens[c]) for c in (0, 1)}, d, precision)
        if _detectable(morse):
            break
    else:  # pragma: no cover - the generic case succeeds immediately
        raise RuntimeError("could not draw a detectable synthetic complex")

    # Floer side: morse plus an acyclic pair p1 -> p0, then a basis change W
    fgens = {c: morse.generators(c) + [f"p{c}"] for c in (0, 1)}
    fd = {}
    for c in (0, 1):
        lo = 1 - c
        M = morse.diff(c)
        rows = [list(r) + [ZERO] for r in M.entries] + [[ZERO] * (M.ncols + 1)]
        if c == 1:
            rows[-1][-1] = ONE
        fd[c] = _mat(rows, M.ncols + 1, ring)
    W = {c: _elementary_pair(len(fgens[c]), rng) for c in (0, 1)}
    fdw = {c: _mat(W[1 - c][0], len(fgens[1 - c]), ring) @ fd[c] @ _mat(W[c][1], len(fgens[c]), ring)
           for c in (0, 1)}
    floer = GradedLambdaComplex(two_n, fgens, fdw, precision)

    pss_blocks, proj_blocks = {}, {}
    for c in (0, 1):
        n = len(morse.generators(c))
        incl = _mat([[ONE if i == j else ZERO for j in range(n)] for i in range(n)] + [[ZERO] * n], n, ring)
        proj = _mat([[ONE if i == j else ZERO for j in range(n + 1)] for i in range(n)], n + 1, ring)
        pss_blocks[c] = _mat(W[c][0], n + 1, ring) @ incl
        proj_blocks[c] = proj @ _mat(W[c][1], n + 1, ring)
    k = _random_degree_one(morse, rng, ring)
    A = {}
    for c in (0, 1):
        up = lo = 1 - c
        A[c] = morse.diff(up) @ k.blocks[c] + k.blocks[lo] @ morse.diff(c)
    # T^s (dk + kd) with s large enough for strictly positive valuation
    low = [x.terms[0][0] for M in A.values() for row in M.entries for x in row if x.terms]
    s = 1 - min(low + [0])
    phi = {c: LambdaMatrix.identity(A[c].nrows, ring) + _scale_T(A[c], ring, s) for c in (0, 1)}
    ssp_blocks = {c: phi[c] @ proj_blocks[c] for c in (0, 1)}
    pss = GradedMap(0, pss_blocks)
    ssp = GradedMap(0, ssp_blocks)
    comparison = GradedMap(0, {c: ssp_blocks[c] @ pss_blocks[c] for c in (0, 1)})
    h = _random_degree_one(morse, rng, ring)
    pearl = {}
    for c in (0, 1):
        up = lo = 1 - c
        pearl[c] = comparison.blocks[c] + morse.diff(up) @ h.blocks[c] - h.blocks[lo] @ morse.diff(c)
    return SyntheticHomotopy(morse, floer, pss, ssp, h, GradedMap(0, pearl), comparison)


def _base_diffs(gens, edges, ring):
    out = {}
    for c in (0, 1):
        lo = 1 - c
        triples = []
        for cls, src, dst, coeff in edges:
            if cls == c:
                triples.append((src, dst, 0, coeff))
        out[c] = _entry_matrix(gens[lo], gens[c], triples, ring)
    return out


def _random_degree_one(cx, rng, ring):
    blocks = {}
    for c in cx.classes():
        up = shift_class(c, 1, cx.two_n)
        rows = [[_rand_laurent(rng, 0, 2) if rng.random() < 0.6 else ZERO
                 for _ in cx.generators(c)] for _ in cx.generators(up)]
        blocks[c] = LambdaMatrix(rows, len(cx.generators(c)), ring)
    return GradedMap(1, blocks)


def _scale_T(M, ring, s=1):
    return LambdaMatrix([[x.shift(s) for x in row] for row in M.entries], M.ncols, ring)


def perturb(m: GradedMap, cls, row, col, delta: NovikovSeries) -> GradedMap:
    blocks = dict(m.blocks)
    M = blocks[cls]
    rows = [list(r) for r in M.entries]
    rows[row][col] = rows[row][col] + delta
    blocks[cls] = LambdaMatrix(rows, M.ncols, M.ring)
    return GradedMap(m.degree, blocks)
