"""Precision-tracked arithmetic in the integral Novikov ring Z[[T]][T^-1].

A :class:`NovikovSeries` is a finite set of integer terms together with a
precision marker.  ``precision=None`` means the element is an exact Laurent
polynomial; an integer ``K`` means every coefficient at an exponent below
``K`` is known and nothing is known at or above ``K``.  Every operation
derives the precision of its output from the precisions of its inputs, so
a result is always correct below its own precision.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

DEFAULT_PRECISION = 32


class NovikovError(ArithmeticError):
    pass


class NotAUnit(NovikovError):
    pass


class ZeroToPrecision(NovikovError):
    """The element has no nonzero coefficient below its precision."""


class PrecisionExhausted(NovikovError):
    pass


class NotDivisible(NovikovError):
    """Long division hit a coefficient not divisible by the divisor's leading one.

    ``order`` is the exponent where the integer division failed,
    ``quotient`` the partial quotient built so far and ``remainder`` the
    element ``x - quotient * g`` whose lowest term sits at ``order``.
    """

    def __init__(self, order, quotient, remainder):
        super().__init__(f"not divisible at order {order}")
        self.order = order
        self.quotient = quotient
        self.remainder = remainder


def _min_prec(*precs):
    finite = [p for p in precs if p is not None]
    return min(finite) if finite else None


@dataclass(frozen=True)
class NovikovSeries:
    terms: tuple = ()
    precision: Optional[int] = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, int], precision: Optional[int] = None):
        items = sorted(
            (int(e), int(c))
            for e, c in coeffs.items()
            if c != 0 and (precision is None or e < precision)
        )
        return cls(tuple(items), precision)

    @classmethod
    def const(cls, c: int, precision: Optional[int] = None):
        return cls.from_dict({0: c}, precision)

    @classmethod
    def monomial(cls, c: int, e: int = 0):
        return cls.from_dict({e: c})

    @classmethod
    def coerce(cls, x) -> "NovikovSeries":
        if isinstance(x, NovikovSeries):
            return x
        if isinstance(x, int):
            return cls.const(x)
        if isinstance(x, str):
            return parse_series(x)
        raise TypeError(f"cannot interpret {x!r} as a Novikov series")

    # -- inspection -------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.precision is None

    def as_dict(self) -> dict:
        return dict(self.terms)

    def coeff(self, e: int) -> int:
        for ee, c in self.terms:
            if ee == e:
                return c
        return 0

    def is_zero(self) -> bool:
        """True for exact zero and for elements that are zero to precision."""
        return not self.terms

    def is_exact_zero(self) -> bool:
        return not self.terms and self.precision is None

    def lowest(self) -> Optional[int]:
        return self.terms[0][0] if self.terms else None

    def leading_coefficient(self) -> int:
        if not self.terms:
            raise ZeroToPrecision("zero has no leading coefficient")
        return self.terms[0][1]

    def degree(self) -> Optional[int]:
        return self.terms[-1][0] if self.terms else None

    def _val_bound(self):
        """Lower bound for the true valuation (None means exact zero)."""
        if self.terms:
            return self.terms[0][0]
        return self.precision

    # -- ring operations --------------------------------------------------

    def _combine(self, other, sign):
        prec = _min_prec(self.precision, other.precision)
        a, b = self.terms, other.terms
        if prec is not None:
            if a and a[-1][0] >= prec:
                a = tuple(t for t in a if t[0] < prec)
            if b and b[-1][0] >= prec:
                b = tuple(t for t in b if t[0] < prec)
        if not b:
            return NovikovSeries(a, prec)
        if not a and sign == 1:
            return NovikovSeries(b, prec)
        # merge of two sorted term lists
        out = []
        i = j = 0
        while i < len(a) and j < len(b):
            ea, eb = a[i][0], b[j][0]
            if ea < eb:
                out.append(a[i])
                i += 1
            elif eb < ea:
                out.append((eb, sign * b[j][1]))
                j += 1
            else:
                c = a[i][1] + sign * b[j][1]
                if c:
                    out.append((ea, c))
                i += 1
                j += 1
        out.extend(a[i:])
        out.extend((e, sign * c) for e, c in b[j:])
        return NovikovSeries(tuple(out), prec)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._combine(other, 1)

    __radd__ = __add__

    def __neg__(self):
        return NovikovSeries(tuple((e, -c) for e, c in self.terms), self.precision)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._combine(other, -1)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.is_exact_zero() or other.is_exact_zero():
            return ZERO
        precs = []
        if self.precision is not None:
            precs.append(self.precision + other._val_bound())
        if other.precision is not None:
            precs.append(other.precision + self._val_bound())
        prec = _min_prec(*precs)
        out: dict = {}
        get = out.get
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                if prec is not None and e >= prec:
                    break  # terms are sorted
                out[e] = get(e, 0) + c1 * c2
        return NovikovSeries.from_dict(out, prec)

    __rmul__ = __mul__

    def scale(self, c: int) -> "NovikovSeries":
        if c == 0:
            return ZERO
        return NovikovSeries(tuple((e, c * v) for e, v in self.terms), self.precision)

    def shift(self, k: int) -> "NovikovSeries":
        """Multiply by T^k (exact; precision moves with the exponents)."""
        prec = None if self.precision is None else self.precision + k
        return NovikovSeries(tuple((e + k, c) for e, c in self.terms), prec)

    def truncate(self, K: Optional[int]) -> "NovikovSeries":
        if K is None:
            return self
        prec = _min_prec(self.precision, K)
        return NovikovSeries(tuple((e, c) for e, c in self.terms if e < prec), prec)

    def agrees_with(self, other, K: Optional[int] = None) -> bool:
        """Coefficient-wise equality below ``K`` and below both precisions."""
        other = NovikovSeries.coerce(other)
        bound = _min_prec(self.precision, other.precision, K)
        a = self.truncate(bound) if bound is not None else self
        b = other.truncate(bound) if bound is not None else other
        return a.terms == b.terms

    def __str__(self):
        return format_series(self)

    def __repr__(self):
        return f"NovikovSeries({format_series(self)!r})"


def _coerce(x):
    if isinstance(x, NovikovSeries):
        return x
    if isinstance(x, int):
        return NovikovSeries.const(x)
    return NotImplemented


ZERO = NovikovSeries()
ONE = NovikovSeries.const(1)
T = NovikovSeries.monomial(1, 1)


# -- valuation ---------------------------------------------------------------


@dataclass(frozen=True)
class Valuation:
    """``value`` is None for +infinity; ``zero_to_precision`` flags a jet
    with no known nonzero coefficient (as opposed to an exact zero)."""

    value: Optional[int]
    zero_to_precision: bool = False

    @property
    def is_infinite(self) -> bool:
        return self.value is None


def dot(xs, ys) -> NovikovSeries:
    """sum x_i * y_i in one pass; same precision rule as repeated mul/add."""
    prec = None
    pairs = []
    for x, y in zip(xs, ys):
        xt, yt = x.terms, y.terms
        xp, yp = x.precision, y.precision
        if (not xt and xp is None) or (not yt and yp is None):
            continue
        if xp is not None:
            p = xp + (yt[0][0] if yt else yp)
            prec = p if prec is None else min(prec, p)
        if yp is not None:
            p = yp + (xt[0][0] if xt else xp)
            prec = p if prec is None else min(prec, p)
        if xt and yt:
            pairs.append((xt, yt))
    if not pairs:
        return NovikovSeries((), prec)
    out: dict = {}
    get = out.get
    for xt, yt in pairs:
        for e1, c1 in xt:
            for e2, c2 in yt:
                e = e1 + e2
                if prec is not None and e >= prec:
                    break
                out[e] = get(e, 0) + c1 * c2
    return NovikovSeries(tuple(sorted((e, c) for e, c in out.items() if c)), prec)


def val(x) -> Valuation:
    x = NovikovSeries.coerce(x)
    if x.terms:
        return Valuation(x.terms[0][0])
    return Valuation(None, zero_to_precision=x.precision is not None)


def add(x, y):
    return NovikovSeries.coerce(x) + NovikovSeries.coerce(y)


def mul(x, y):
    return NovikovSeries.coerce(x) * NovikovSeries.coerce(y)


def is_unit(x) -> bool:
    x = NovikovSeries.coerce(x)
    if not x.terms:
        if x.precision is None:
            return False
        raise ZeroToPrecision("cannot decide whether a zero-to-precision jet is a unit")
    return abs(x.terms[0][1]) == 1


def invert_unit(x, out_precision: int = DEFAULT_PRECISION) -> NovikovSeries:
    """Inverse of a unit, with ``x * y == 1`` below ``out_precision``."""
    x = NovikovSeries.coerce(x)
    if not is_unit(x):
        raise NotAUnit(f"{format_series(x)} is not a unit")
    v, c0 = x.terms[0]
    if len(x.terms) == 1 and x.precision is None:
        return NovikovSeries.monomial(c0, -v)
    # u = T^{-v} x = c0 + u1 T + ...; invert u as a power series
    R = out_precision
    if x.precision is not None:
        R = min(R, x.precision - v)
    u = {e - v: c for e, c in x.terms}
    b = []
    for k in range(max(R, 0)):
        if k == 0:
            b.append(c0)
            continue
        s = 0
        for j in range(1, k + 1):
            uj = u.get(j)
            if uj:
                s += uj * b[k - j]
        b.append(-c0 * s)
    return NovikovSeries.from_dict({k - v: bk for k, bk in enumerate(b)}, R - v)


def divide(x, g, out_precision: int = DEFAULT_PRECISION) -> NovikovSeries:
    """Quotient q with x - q*g of valuation >= out_precision.

    Order-by-order long division: at every step the lowest remaining
    coefficient must be divisible by the leading coefficient of ``g``,
    otherwise :class:`NotDivisible` reports the offending exponent.
    """
    x = NovikovSeries.coerce(x)
    g = NovikovSeries.coerce(g)
    if not g.terms:
        raise ZeroToPrecision("division by zero")
    v, g0 = g.terms[0]
    if x.is_exact_zero():
        return ZERO
    out = out_precision
    if x.precision is not None:
        out = min(out, x.precision)
    if g.precision is not None:
        out = min(out, g.precision + x._val_bound() - v)
    gpoly = g.truncate(out - x._val_bound() + v + 1) if g.precision is None else g
    r = x.truncate(out)
    q: dict = {}
    while r.terms and r.terms[0][0] < out:
        e, c = r.terms[0]
        if c % g0:
            quot = NovikovSeries.from_dict(q)
            raise NotDivisible(e, quot, x - quot * g)
        qc = c // g0
        q[e - v] = qc
        r = (r - NovikovSeries.monomial(qc, e - v) * gpoly).truncate(out)
    exact = x.precision is None and g.precision is None
    if exact:
        quot = NovikovSeries.from_dict(q)
        if (x - quot * g).is_exact_zero():
            return quot
    return NovikovSeries.from_dict(q, out - v)


# -- ideals and normal forms -----------------------------------------------


def int_bezout(values: Sequence[int]):
    """(g, coeffs) with sum(coeffs[i] * values[i]) == g == gcd(values) >= 0."""
    g, coeffs = 0, [0] * len(values)
    for i, a in enumerate(values):
        if a == 0:
            continue
        if g == 0:
            g = abs(a)
            coeffs[i] = 1 if a > 0 else -1
            continue
        # extended gcd of (g, a)
        old_r, r = g, a
        old_s, s = 1, 0
        old_t, t = 0, 1
        while r:
            qq = old_r // r
            old_r, r = r, old_r - qq * r
            old_s, s = s, old_s - qq * s
            old_t, t = t, old_t - qq * t
        if old_r < 0:
            old_r, old_s, old_t = -old_r, -old_s, -old_t
        coeffs = [c * old_s for c in coeffs]
        coeffs[i] = old_t
        g = old_r
    return g, coeffs


def canonical_associate(x, precision: Optional[int] = None) -> NovikovSeries:
    """Normal form of the associate class of ``x`` (see :func:`normalize`)."""
    return normalize(x, precision)[0]


def normalize(x, precision: Optional[int] = None):
    """Canonical associate of ``x`` together with the unit producing it.

    Returns ``(c, u)`` where ``u`` is a unit and ``c = u * x`` has valuation
    0, positive leading coefficient ``a0`` and every higher coefficient in
    ``[0, a0)``; when ``a0 == 1`` the normal form is exactly 1.
    """
    x = NovikovSeries.coerce(x)
    if not x.terms:
        raise ZeroToPrecision("zero has no canonical associate")
    v, c0 = x.terms[0]
    sign = 1 if c0 > 0 else -1
    y = x.shift(-v).scale(sign)
    unit = NovikovSeries.monomial(sign, -v)
    a0 = abs(c0)
    if precision is None:
        precision = y.precision if y.precision is not None else DEFAULT_PRECISION
    elif y.precision is not None:
        precision = min(precision, y.precision)
    if a0 == 1:
        if len(y.terms) == 1 and y.precision is None:
            return ONE, unit
        return ONE, invert_unit(x, precision)
    if y.precision is None and all(0 <= c < a0 for e, c in y.terms[1:]):
        return y, unit
    y = y.truncate(precision)
    u_poly = ONE
    for k in range(1, precision):
        q = y.coeff(k) // a0
        if q:
            step = ONE - NovikovSeries.monomial(q, k)
            y = (y * step).truncate(precision)
            u_poly = (u_poly * step).truncate(precision)
    return y, (unit * u_poly)


@dataclass(frozen=True)
class IdealGenerator:
    generator: NovikovSeries
    witnesses: tuple
    verified_to: int
    gcd_chain: tuple = ()


def _combine(pool):
    """Bezout combination of a pool of (series, witness) with val-0 series."""
    lcs = [s.terms[0][1] for s, _ in pool]
    g, coeffs = int_bezout(lcs)
    n = len(pool[0][1])
    w = ZERO
    wit = [ZERO] * n
    for (s, sw), c in zip(pool, coeffs):
        if c == 0:
            continue
        w = w + s.scale(c)
        wit = [a + b.scale(c) for a, b in zip(wit, sw)]
    return w, wit, g


def ideal_generator(gens: Iterable, precision: int = DEFAULT_PRECISION) -> IdealGenerator:
    """Single generator of the ideal spanned by exact Laurent polynomials.

    The candidate is the Bezout combination of the leading coefficients of
    the T-normalised generators.  Each input is long-divided by it; a
    division failure produces a remainder in the ideal whose leading
    coefficient is not a multiple of the current one, so the gcd chain
    strictly drops and the candidate is rebuilt.  When every input divides
    to ``precision`` the candidate is returned in canonical form together
    with cofactors valid to the same precision.
    """
    gens = [NovikovSeries.coerce(x) for x in gens]
    if not gens:
        raise ValueError("ideal_generator needs at least one generator")
    if any(not x.is_exact for x in gens):
        raise ValueError("ideal_generator expects exact Laurent polynomials")
    n = len(gens)

    def unit_vec(i, shift):
        return [NovikovSeries.monomial(1, shift) if j == i else ZERO for j in range(n)]

    pool = []
    for i, x in enumerate(gens):
        if x.terms:
            v = x.terms[0][0]
            pool.append((x.shift(-v), unit_vec(i, -v)))
    if not pool:
        raise ValueError("all generators are zero")

    w, wit, g = _combine(pool)
    chain = [g]
    budget = max(g.bit_length(), 1) + 1
    for _ in range(budget + 1):
        failure = None
        for i, x in enumerate(gens):
            if not x.terms:
                continue
            try:
                divide(x, w, precision)
            except NotDivisible as exc:
                r = exc.remainder
                rw = [a - exc.quotient * b for a, b in zip(unit_vec(i, 0), wit)]
                failure = (r, rw)
                break
        if failure is None:
            break
        r, rw = failure
        e = r.terms[0][0]
        pool = [(w, wit), (r.shift(-e), [c.shift(-e) for c in rw])]
        w, wit, g = _combine(pool)
        chain.append(g)
    else:
        raise PrecisionExhausted("gcd chain did not stabilise")

    # cofactors may carry negative valuations; invert with enough headroom
    margin = 0
    for x, u in zip(gens, wit):
        if x.terms and u.terms:
            margin = max(margin, -(x.terms[0][0] + u.terms[0][0]))
    canon, unit = normalize(w, precision + margin)
    witnesses = tuple((unit * u) for u in wit)
    return IdealGenerator(canon, witnesses, precision, tuple(chain))


# -- literal syntax -----------------------------------------------------------

_TERM = re.compile(r"([+-]?)(?:(\d+)(?:\*T(?:\^(-?\d+))?)?|T(?:\^(-?\d+))?)")


def format_series(x: NovikovSeries) -> str:
    parts = []
    for idx, (e, c) in enumerate(x.terms):
        mag = abs(c)
        if e == 0:
            body = str(mag)
        else:
            tpart = "T" if e == 1 else f"T^{e}"
            body = tpart if mag == 1 else f"{mag}*{tpart}"
        if idx == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    text = " ".join(parts) if parts else "0"
    if x.precision is not None:
        text += f" @{x.precision}"
    return text


def parse_series(text: str) -> NovikovSeries:
    raw = text
    precision = None
    if "@" in text:
        text, _, ptxt = text.partition("@")
        try:
            precision = int(ptxt.strip())
        except ValueError:
            raise ValueError(f"bad precision in series literal {raw!r}") from None
    body = "".join(text.split())
    if not body:
        raise ValueError(f"empty series literal {raw!r}")
    coeffs: dict = {}
    pos = 0
    first = True
    while pos < len(body):
        m = _TERM.match(body, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse series literal {raw!r} at {body[pos:]!r}")
        sign, num, e1, e2 = m.groups()
        if not sign and not first:
            raise ValueError(f"missing operator in series literal {raw!r}")
        if num is not None:
            c = int(num)
            e = 0 if "T" not in m.group(0) else (int(e1) if e1 is not None else 1)
        else:
            c = 1
            e = int(e2) if e2 is not None else 1
        if sign == "-":
            c = -c
        coeffs[e] = coeffs.get(e, 0) + c
        pos = m.end()
        first = False
    if precision is not None and any(e >= precision and c for e, c in coeffs.items()):
        raise ValueError(f"term at or above declared precision in {raw!r}")
    return NovikovSeries.from_dict(coeffs, precision)
