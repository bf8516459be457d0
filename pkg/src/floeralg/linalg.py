"""Matrices over Z and the Novikov ring, Smith normal form and module structure.

One elimination engine serves both rings.  A ring object supplies the few
primitives the engine needs (zero tests, a 2x2 elimination transform,
divisibility, a canonical form for associates); everything else is shared.

Module conventions: :func:`cokernel` reads the rows of a matrix as
relations, so an ``r x n`` matrix presents ``R^n / rowspace``.  Maps between
free modules (differentials, inclusions) act on column vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .novikov import (
    DEFAULT_PRECISION,
    ONE,
    ZERO,
    NotDivisible,
    NovikovSeries,
    divide,
    dot,
    format_series,
    ideal_generator,
    int_bezout,
    normalize,
    parse_series,
)


class NotASubmodule(ValueError):
    pass


# -- rings ------------------------------------------------------------------


class IntegerRing:
    name = "Z"
    zero = 0
    one = 1

    def coerce(self, x):
        if isinstance(x, NovikovSeries):
            raise TypeError("Novikov series entry in an integer matrix")
        return int(x)

    def is_zero(self, x):
        return x == 0

    def is_unit(self, x):
        return abs(x) == 1

    def pivot_key(self, x):
        return abs(x)

    def canonical(self, x):
        return (-x, -1) if x < 0 else (x, 1)

    def divides(self, a, b):
        return b % a == 0 if a else b == 0

    def eliminate(self, a, b):
        """2x2 matrix (p, q, r, s) with p*a + q*b = g, r*a + s*b = 0, unit det."""
        if b % a == 0:
            return (1, 0, -(b // a), 1), 1
        g, (s, t) = int_bezout([a, b])
        return (s, t, -(b // g), a // g), 1

    def fmt(self, x):
        return str(x)

    def parse(self, text):
        return int(text)


class NovikovRing:
    name = "Lambda"
    zero = ZERO
    one = ONE

    def __init__(self, precision: int = DEFAULT_PRECISION):
        self.precision = precision

    def coerce(self, x):
        if type(x) is NovikovSeries:
            return x
        return NovikovSeries.coerce(x)

    def is_zero(self, x):
        return not x.terms

    def is_unit(self, x):
        return bool(x.terms) and abs(x.terms[0][1]) == 1

    def pivot_key(self, x):
        # T is a unit, so only the leading coefficient matters
        return (abs(x.terms[0][1]), len(x.terms))

    def canonical(self, x):
        return normalize(x, self.precision)

    def divides(self, a, b):
        if not b.terms:
            return True
        try:
            divide(b, a, self.precision)
        except NotDivisible:
            return False
        return True

    def eliminate(self, a, b):
        K = self.precision
        if self.is_unit(a) and a.is_exact and b.is_exact:
            if len(a.terms) == 1:
                q = b * NovikovSeries.monomial(a.terms[0][1], -a.terms[0][0])
                return (ONE, ZERO, -q, ONE), ONE
            # fraction-free step keeps exact entries exact; det is the unit a
            return (ONE, ZERO, -b, a), a
        try:
            q = divide(b, a, K)
            return (ONE, ZERO, -q, ONE), ONE
        except NotDivisible:
            pass
        lift_a = NovikovSeries(a.terms)
        lift_b = NovikovSeries(b.terms)
        ig = ideal_generator([lift_a, lift_b], K)
        g = ig.generator
        u1, u2 = ig.witnesses
        return (u1, u2, -divide(b, g, K), divide(a, g, K)), None

    def fmt(self, x):
        return format_series(x)

    def parse(self, text):
        return parse_series(text)


Z = IntegerRing()


def ring_for(name: str, precision: int = DEFAULT_PRECISION):
    if name == "Z":
        return Z
    if name in ("Lambda", "Λ"):
        return NovikovRing(precision)
    raise ValueError(f"unknown ring {name!r}")


# -- matrices -----------------------------------------------------------------


class Matrix:
    """Dense immutable matrix with entries in ``ring``."""

    ring_name = None

    def __init__(self, rows, ncols: Optional[int] = None, ring=None):
        rows = [list(r) for r in rows]
        if ring is None:
            ring = Z if self.ring_name == "Z" else NovikovRing()
        self.ring = ring
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
        coerce = ring.coerce
        self.entries = tuple(tuple(coerce(x) for x in r) for r in rows)
        self.nrows = len(rows)
        self.ncols = ncols

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def tolist(self):
        return [list(r) for r in self.entries]

    def _new(self, rows, ncols=None):
        return type(self)(rows, self.ncols if ncols is None else ncols, self.ring)

    @classmethod
    def zeros(cls, n, m, ring=None):
        r = ring or (Z if cls.ring_name == "Z" else NovikovRing())
        return cls([[r.zero] * m for _ in range(n)], m, r)

    @classmethod
    def identity(cls, n, ring=None):
        r = ring or (Z if cls.ring_name == "Z" else NovikovRing())
        return cls([[r.one if i == j else r.zero for j in range(n)] for i in range(n)], n, r)

    def transpose(self):
        return type(self)([list(c) for c in zip(*self.entries)] if self.nrows else [],
                          self.nrows, self.ring)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        zero = self.ring.zero
        cols = list(zip(*other.entries)) if other.nrows else [()] * other.ncols
        out = []
        lam = self.ring.name != "Z"
        for row in self.entries:
            line = []
            for col in cols:
                if lam:
                    line.append(dot(row, col))
                    continue
                acc = zero
                for a, b in zip(row, col):
                    if a and b:
                        acc += a * b
                line.append(acc)
            out.append(line)
        return type(self)(out, other.ncols, self.ring)

    def __add__(self, other):
        return self._new([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return self._new([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __neg__(self):
        return self._new([[-a for a in r] for r in self.entries])

    def is_zero(self):
        return all(self.ring.is_zero(x) for r in self.entries for x in r)

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.shape == other.shape
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.shape, self.entries))

    def __repr__(self):
        return f"{type(self).__name__}({[[self.ring.fmt(x) for x in r] for r in self.entries]})"


def _exact0(x):
    if isinstance(x, NovikovSeries):
        return x.is_exact_zero()
    return x == 0


class IntMatrix(Matrix):
    ring_name = "Z"


class LambdaMatrix(Matrix):
    ring_name = "Lambda"

    @property
    def precision(self):
        return self.ring.precision


def matrix_over(ring, rows, ncols=None):
    cls = IntMatrix if ring.name == "Z" else LambdaMatrix
    return cls(rows, ncols, ring)


# -- Smith normal form ----------------------------------------------------------


@dataclass
class SmithForm:
    diagonal: list
    left: Matrix
    right: Matrix
    det_left: object = 1
    det_right: object = 1
    certified_precision: Optional[int] = None

    @property
    def rank(self):
        return sum(1 for d in self.diagonal if not _is_zero_entry(d))


def _is_zero_entry(x):
    if isinstance(x, NovikovSeries):
        return not x.terms
    return x == 0


def smith(m: Matrix) -> SmithForm:
    """Smith normal form ``left @ m @ right = diag`` over the matrix's ring."""
    ring = m.ring
    n, c = m.shape
    A = [list(r) for r in m.entries]
    U = [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]
    V = [[ring.one if i == j else ring.zero for j in range(c)] for i in range(c)]
    det_l, det_r = ring.one, ring.one
    cert = [getattr(ring, "precision", None)]
    lambda_ring = ring.name != "Z"

    def note_zero(x):
        # an entry forced to exact zero is only known to its precision
        if lambda_ring and x.precision is not None:
            cert[0] = x.precision if cert[0] is None else min(cert[0], x.precision)

    def row_op(t, i, tr):
        p, q, r, s = tr
        for M in (A, U):
            rt, ri = M[t], M[i]
            M[t] = [p * x + q * y for x, y in zip(rt, ri)]
            M[i] = [r * x + s * y for x, y in zip(rt, ri)]

    def col_op(t, j, tr):
        p, q, r, s = tr
        for M in (A, V):
            for row in M:
                x, y = row[t], row[j]
                row[t] = p * x + q * y
                row[j] = r * x + s * y

    def tr_det(tr, d):
        if d is not None:
            return d
        p, q, r, s = tr
        return p * s - q * r

    for t in range(min(n, c)):
        best = None
        for i in range(t, n):
            for j in range(t, c):
                x = A[i][j]
                if not ring.is_zero(x):
                    key = ring.pivot_key(x)
                    if best is None or key < best[0]:
                        best = (key, i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            A[t], A[pi] = A[pi], A[t]
            U[t], U[pi] = U[pi], U[t]
            det_l = -det_l
        if pj != t:
            for M in (A, V):
                for row in M:
                    row[t], row[pj] = row[pj], row[t]
            det_r = -det_r
        while True:
            for i in range(t + 1, n):
                if not ring.is_zero(A[i][t]):
                    tr, d = ring.eliminate(A[t][t], A[i][t])
                    row_op(t, i, tr)
                    det_l = det_l * tr_det(tr, d)
                    _check_killed(A[i][t], ring)
                    note_zero(A[i][t])
                    A[i][t] = ring.zero
                elif lambda_ring:
                    A[i][t] = _settle(A[i][t], note_zero)
            for j in range(t + 1, c):
                if not ring.is_zero(A[t][j]):
                    tr, d = ring.eliminate(A[t][t], A[t][j])
                    col_op(t, j, tr)
                    det_r = det_r * tr_det(tr, d)
                    _check_killed(A[t][j], ring)
                    note_zero(A[t][j])
                    A[t][j] = ring.zero
                elif lambda_ring:
                    A[t][j] = _settle(A[t][j], note_zero)
            if any(not ring.is_zero(A[i][t]) for i in range(t + 1, n)):
                continue
            bad = None
            for i in range(t + 1, n):
                for j in range(t + 1, c):
                    if not ring.is_zero(A[i][j]) and not ring.divides(A[t][t], A[i][j]):
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # fold the offending row into the pivot row; det unchanged
            for M in (A, U):
                M[t] = [x + y for x, y in zip(M[t], M[bad])]
        cval, unit = ring.canonical(A[t][t])
        if unit != ring.one:
            A[t] = [unit * x for x in A[t]]
            U[t] = [unit * x for x in U[t]]
            det_l = det_l * unit
        A[t][t] = cval
        if lambda_ring and cval.precision is not None:
            cert[0] = min(cert[0], cval.precision)

    diag = []
    for t in range(min(n, c)):
        x = A[t][t]
        if lambda_ring and not x.terms:
            note_zero(x)
            x = ZERO
        diag.append(x)
    left = matrix_over(ring, U, n)
    right = matrix_over(ring, V, c)
    return SmithForm(diag, left, right, det_l, det_r, cert[0] if lambda_ring else None)


def _check_killed(x, ring):
    if not ring.is_zero(x):
        raise ArithmeticError(f"elimination left a nonzero entry {x!r}")


def _settle(x, note):
    if not x.terms and not x.is_exact_zero():
        note(x)
        return ZERO
    return x


def snf_int(m) -> tuple:
    """(diagonal, left, right) with left @ m @ right diagonal, d1 | d2 | ..."""
    if not isinstance(m, Matrix):
        m = IntMatrix(m)
    sf = smith(m)
    return sf.diagonal, sf.left, sf.right


def snf_lambda(m, precision: int = DEFAULT_PRECISION) -> SmithForm:
    if not isinstance(m, Matrix):
        m = LambdaMatrix(m, ring=NovikovRing(precision))
    return smith(m)


def diagonal_matrix(diag, shape, ring):
    n, c = shape
    rows = [[ring.zero] * c for _ in range(n)]
    for i, d in enumerate(diag):
        rows[i][i] = d
    return matrix_over(ring, rows, c)


# -- module structure -----------------------------------------------------------


@dataclass
class ModuleStructure:
    rank: int
    invariant_factors: list = field(default_factory=list)
    base_ring: str = "Z"
    certified_precision: Optional[int] = None

    @property
    def torsion_count(self):
        return len(self.invariant_factors)

    def torsion_leading(self):
        """Integer leading coefficients of the torsion factors."""
        out = []
        for a in self.invariant_factors:
            out.append(a.terms[0][1] if isinstance(a, NovikovSeries) else a)
        return out

    def describe(self):
        ring = "Λ" if self.base_ring != "Z" else "Z"
        parts = []
        if self.rank:
            parts.append(ring if self.rank == 1 else f"{ring}^{self.rank}")
        for a in self.invariant_factors:
            s = format_series(a) if isinstance(a, NovikovSeries) else str(a)
            parts.append(f"{ring}/({s})" if ring == "Λ" else f"Z/{s}")
        return " ⊕ ".join(parts) if parts else "0"

    def to_json(self):
        fs = [format_series(a) if isinstance(a, NovikovSeries) else a for a in self.invariant_factors]
        out = {"rank": self.rank, "torsion": fs, "ring": self.base_ring}
        if self.certified_precision is not None:
            out["certified_precision"] = self.certified_precision
        return out


def structure_from_smith(sf: SmithForm, ncols: int, ring) -> ModuleStructure:
    nonzero = [d for d in sf.diagonal if not _is_zero_entry(d)]
    factors = [d for d in nonzero if not ring.is_unit(d)]
    return ModuleStructure(
        ncols - len(nonzero), factors, ring.name, sf.certified_precision
    )


def cokernel(m: Matrix) -> ModuleStructure:
    """Structure of R^cols / (row space of m)."""
    return structure_from_smith(smith(m), m.ncols, m.ring)


def kernel_basis(m: Matrix) -> Matrix:
    """Columns spanning {v : m v = 0}, as a cols x k matrix (a direct summand)."""
    sf = smith(m)
    r = sf.rank
    keep = list(range(r, m.ncols))
    rows = [[sf.right[i, j] for j in keep] for i in range(m.ncols)]
    return matrix_over(m.ring, rows, len(keep))


def solve_columns(K: Matrix, B: Matrix) -> Matrix:
    """X with K X = B, raising NotASubmodule when B is outside the column span."""
    ring = K.ring
    if K.nrows != B.nrows:
        raise ValueError("row count mismatch")
    sf = smith(K)
    UB = sf.left @ B
    r = sf.rank
    Y = [[ring.zero] * B.ncols for _ in range(K.ncols)]
    for i in range(UB.nrows):
        for j in range(B.ncols):
            x = UB[i, j]
            if i < r:
                d = sf.diagonal[i]
                if ring.name == "Z":
                    if x % d:
                        raise NotASubmodule("image not contained in kernel span")
                    Y[i][j] = x // d
                else:
                    if not x.terms:
                        continue
                    try:
                        Y[i][j] = divide(x, d, ring.precision)
                    except NotDivisible:
                        raise NotASubmodule("image not contained in kernel span") from None
            elif not ring.is_zero(x):
                raise NotASubmodule("image not contained in kernel span")
    return sf.right @ matrix_over(ring, Y, B.ncols)


def subquotient(ker_basis: Matrix, img_basis: Matrix) -> ModuleStructure:
    """(column span of ker_basis) / (column span of img_basis).

    ``ker_basis`` must have independent columns.
    """
    ring = ker_basis.ring
    k = ker_basis.ncols
    if img_basis.ncols == 0 or img_basis.is_zero():
        return ModuleStructure(k, [], ring.name, getattr(ring, "precision", None))
    X = solve_columns(ker_basis, img_basis)
    return cokernel(X.transpose())


# -- structural inequalities for f.g. modules over Z ---------------------------------


def _factor(n):
    from sympy import factorint

    return factorint(n)


def elementary_divisor_counts(factors: Sequence[int]) -> dict:
    """prime -> number of invariant factors divisible by it."""
    counts: dict = {}
    for a in factors:
        for p in _factor(abs(a)):
            counts[p] = counts.get(p, 0) + 1
    return counts


def check_quotient_rank_bound(Z_rank: int, S_basis: Matrix) -> bool:
    """For S spanned by the columns of S_basis inside Z^Z_rank with
    Z/S = F + R/(a1) + ... + R/(ak): rank Z >= rank F + k and rank S >= k."""
    if not isinstance(S_basis, Matrix):
        S_basis = IntMatrix(S_basis, None if S_basis else 0)
    if S_basis.nrows not in (0, Z_rank):
        raise ValueError("S_basis rows must match Z_rank")
    if S_basis.ncols == 0 or S_basis.nrows == 0:
        return True
    q = cokernel(S_basis.transpose())
    k = q.torsion_count
    rank_s = smith(S_basis).rank
    return Z_rank >= q.rank + k and rank_s >= k


def submodule_structure(relations: Matrix, generators: Matrix) -> ModuleStructure:
    """Structure of the submodule of M = Z^n / rowspace(relations) generated by
    the rows of ``generators``."""
    g = generators.nrows
    n = generators.ncols
    rel_rows = relations.nrows
    if g == 0:
        return ModuleStructure(0, [], "Z")
    stacked = IntMatrix(
        [list(r) for r in generators.entries] + [list(r) for r in relations.entries], n
    )
    sf = smith(stacked)
    r = sf.rank
    # rows of left beyond the rank span the left kernel of the stacked matrix
    syz = [list(sf.left.entries[i][:g]) for i in range(r, g + rel_rows)]
    if not syz:
        return ModuleStructure(g, [], "Z")
    return cokernel(IntMatrix(syz, g))


def check_submodule_torsion_bound(relations: Matrix, generators: Matrix) -> bool:
    """N inside M: rank N <= rank M, per-prime elementary divisor counts and
    the number of invariant factors of N bounded by those of M."""
    if relations.nrows:
        M = cokernel(relations)
    else:
        M = ModuleStructure(relations.ncols, [], "Z")
    N = submodule_structure(relations, generators)
    if N.rank > M.rank or N.torsion_count > M.torsion_count:
        return False
    cm = elementary_divisor_counts(M.invariant_factors)
    cn = elementary_divisor_counts(N.invariant_factors)
    return all(cn[p] <= cm.get(p, 0) for p in cn)


# -- matrix files ----------------------------------------------------------------


def format_matrix(m: Matrix) -> str:
    lines = [f"{m.nrows} {m.ncols} {m.ring.name}"]
    for row in m.entries:
        for x in row:
            lines.append(m.ring.fmt(x))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, precision: int = DEFAULT_PRECISION) -> Matrix:
    """Header ``rows cols Z|Lambda`` then one entry per line, row-major."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError(f"bad matrix header {lines[0]!r}")
    n, c = int(head[0]), int(head[1])
    ring = ring_for(head[2], precision)
    body = lines[1:]
    if len(body) != n * c:
        raise ValueError(f"expected {n * c} entries, found {len(body)}")
    vals = [ring.parse(x) for x in body]
    rows = [vals[i * c:(i + 1) * c] for i in range(n)]
    return matrix_over(ring, rows, c)
