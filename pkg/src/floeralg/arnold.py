"""Grading collapse, torsion counts and the integral Arnold-type lower bound."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List

from .linalg import IntMatrix, ModuleStructure, cokernel, smith


class ChainBroken(ArithmeticError):
    def __init__(self, report):
        failed = next(c for c in report.checks if not c.holds)
        super().__init__(f"inequality failed: {failed.name} ({failed.lhs} vs {failed.rhs})")
        self.report = report


@dataclass
class GradedGroupData:
    """Integral homology by degree: degree -> (betti, torsion coefficients)."""

    groups: Dict[int, tuple] = field(default_factory=dict)

    def betti(self, j):
        return self.groups.get(j, (0, []))[0]

    def torsion(self, j):
        return list(self.groups.get(j, (0, []))[1])

    def degrees(self):
        return sorted(self.groups)

    @classmethod
    def from_lists(cls, betti, torsion=None):
        torsion = torsion or {}
        groups = {}
        for j, b in enumerate(betti):
            groups[j] = (b, list(torsion.get(j, [])))
        for j, ts in torsion.items():
            if j not in groups:
                groups[j] = (0, list(ts))
        return cls(groups)


@dataclass
class CollapsedClassData:
    residue: int
    structure: ModuleStructure


def collapse(h: GradedGroupData, N: int) -> List[CollapsedClassData]:
    """Sum degrees j = i mod 2N; torsion re-normalised through an SNF."""
    buckets: Dict[int, list] = {}
    betti: Dict[int, int] = {}
    if N:
        for i in range(2 * N):
            buckets[i], betti[i] = [], 0
    for j in h.degrees():
        i = j % (2 * N) if N else j
        buckets.setdefault(i, [])
        betti[i] = betti.get(i, 0) + h.betti(j)
        buckets[i] += [t for t in h.torsion(j) if abs(t) != 1]
    out = []
    for i in sorted(buckets):
        ts = buckets[i]
        if ts:
            pres = IntMatrix([[t if r == c else 0 for c in range(len(ts))] for r, t in enumerate(ts)])
            tor = cokernel(pres).invariant_factors
        else:
            tor = []
        out.append(CollapsedClassData(i, ModuleStructure(betti[i], tor, "Z")))
    return out


def tau(c: CollapsedClassData) -> int:
    return len(c.structure.invariant_factors)


def arnold_bound(h: GradedGroupData, N: int) -> int:
    total = sum(h.betti(j) for j in h.degrees())
    return total + 2 * sum(tau(c) for c in collapse(h, N))


def fp_dimension_total(h: GradedGroupData, p: int) -> int:
    """sum_j dim H_j(M; F_p).  By universal coefficients each Z/t with p | t
    contributes once in its own degree and once (as Tor) one degree up."""
    total = 0
    for j in h.degrees():
        total += h.betti(j) + 2 * sum(1 for t in h.torsion(j) if t % p == 0)
    return total


# -- verifying the inequality chain on a concrete complex -----------------------------


@dataclass
class Inequality:
    name: str
    lhs: int
    rhs: int
    kind: str = ">="

    @property
    def holds(self):
        return self.lhs == self.rhs if self.kind == "==" else self.lhs >= self.rhs

    @property
    def slack(self):
        return self.lhs - self.rhs


@dataclass
class BoundReport:
    checks: List[Inequality]
    per_class: Dict[int, dict]
    total_rank: int
    bound: int

    @property
    def ok(self):
        return all(c.holds for c in self.checks)

    @property
    def slack(self):
        return self.total_rank - self.bound

    def to_json(self):
        return {
            "ok": self.ok,
            "total_rank": self.total_rank,
            "bound": self.bound,
            "slack": self.slack,
            "per_class": {str(i): v for i, v in sorted(self.per_class.items())},
            "checks": [
                {"name": c.name, "lhs": c.lhs, "rhs": c.rhs, "relation": c.kind,
                 "slack": c.slack, "holds": c.holds}
                for c in self.checks
            ],
        }


def verify_bound_chain(cf, reference: GradedGroupData, N: int, raise_on_failure=True) -> BoundReport:
    """Walk the rank inequalities from a Floer-type complex down to the bound.

    For each class i: rank CF_i = rank ker d_i + rank im d_i,
    rank ker d_i >= rank H_i + tau_i and rank im d_{i+1} >= tau_i, where
    H_i and tau_i come from the collapsed reference homology.  Summing gives
    rank CF >= arnold_bound(reference, N).
    """
    from .flowcat import shift_class

    if cf.two_n != 2 * N:
        raise ValueError(f"complex is graded mod {cf.two_n}, expected {2 * N}")
    ref = {c.residue: c for c in collapse(reference, N)}
    classes = sorted(set(cf.classes()) | set(ref))
    rank_d = {}
    for i in classes:
        D = cf.diff(i)
        rank_d[i] = smith(D).rank if D.nrows and D.ncols else 0
    checks, per_class = [], {}
    for i in classes:
        n = cf.rank(i)
        ker = n - rank_d[i]
        up = shift_class(i, 1, cf.two_n)
        im_up = rank_d.get(up)
        if im_up is None:
            D = cf.diff(up)
            im_up = smith(D).rank if D.nrows and D.ncols else 0
        c = ref.get(i)
        b = c.structure.rank if c else 0
        t = tau(c) if c else 0
        checks.append(Inequality(f"rank CF_{i} = rank ker d_{i} + rank im d_{i}", n, ker + rank_d[i], "=="))
        checks.append(Inequality(f"rank ker d_{i} >= rank H_{i} + tau_{i}", ker, b + t))
        checks.append(Inequality(f"rank im d_{up} >= tau_{i}", im_up, t))
        per_class[i] = {"rank": n, "rank_ker": ker, "rank_im_in": im_up, "betti": b, "tau": t}
    total = sum(cf.rank(i) for i in classes)
    bound = arnold_bound(reference, N)
    checks.append(Inequality("rank CF >= arnold bound", total, bound))
    report = BoundReport(checks, per_class, total, bound)
    if raise_on_failure and not report.ok:
        raise ChainBroken(report)
    return report


# -- JSON ---------------------------------------------------------------------------


def homology_from_json(doc):
    """Returns (GradedGroupData, minimal Chern number or None)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        groups = {}
        for k, v in doc["homology"].items():
            betti = int(v.get("betti", 0))
            tors = [int(t) for t in v.get("torsion", [])]
            if betti < 0 or any(t < 2 for t in tors):
                raise ValueError(f"bad homology entry for degree {k}")
            groups[int(k)] = (betti, tors)
        N = doc.get("minimal_chern")
        return GradedGroupData(groups), (None if N is None else int(N))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed homology document: {exc!r}") from None


def homology_to_json(h: GradedGroupData, N=None):
    doc = {"homology": {str(j): {"betti": h.betti(j), "torsion": h.torsion(j)} for j in h.degrees()}}
    if N is not None:
        doc["minimal_chern"] = N
    return doc
