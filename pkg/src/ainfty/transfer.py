"""Transferred A-infinity structure on the harmonic space and its verifiers.

``lambda_n`` is built recursively from the product and the homotopy ``Q``;
the transferred operations are ``m_k = pi_H lambda_k`` on harmonic inputs,
which equals ``(1 - [d, Q]) lambda_k`` because ``dQ + Qd = 1 - pi_H``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .dga import DGA, CohomologyRing
from .hodge import HarmonicSpace, HodgeData, NotHarmonic
from .linalg import (
    ZERO,
    Element,
    NoSolution,
    SubspaceCoordinates,
    format_element,
    format_terms,
    particular_solution,
    rank,
    rref,
)

Coords = Dict[int, Fraction]
Table = Dict[Tuple[int, ...], Coords]

VARIANTS = ("printed", "uniform")


class ArityError(ValueError):
    pass


class NotDefined(ValueError):
    pass


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


def _axpy(acc: Dict[int, Fraction], s: Fraction, x: Dict[int, Fraction]):
    for i, c in x.items():
        acc[i] = acc.get(i, ZERO) + s * c


def _clean(acc: Dict[int, Fraction]) -> Dict[int, Fraction]:
    return {i: c for i, c in acc.items() if c}


@dataclass
class CheckReport:
    check: str
    status: str
    witnesses: List[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        out = {"check": self.check, "status": self.status, "witnesses": self.witnesses}
        if self.details:
            out["details"] = self.details
        return out


# ---------------------------------------------------------------------------
# the recursion


class LambdaCache:
    """Memo of ``lambda_n`` and ``Q lambda_n`` on tuples of registered homogeneous inputs.

    Inputs are registered once and referred to by index; every recursive
    call works on a contiguous sub-tuple of the original indices.
    """

    def __init__(self, dga: DGA, hodge: HodgeData, variant: str = "printed"):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        self.dga = dga
        self.hodge = hodge
        self.variant = variant
        self.top = dga.space.top
        self._ids: Dict[tuple, int] = {}
        self.vectors: List[Dict[int, Fraction]] = []
        self.degrees: List[int] = []
        self.lam: Dict[Tuple[int, ...], Dict[int, Fraction]] = {}
        self.qlam: Dict[Tuple[int, ...], Dict[int, Fraction]] = {}

    def register(self, e: Element) -> int:
        deg = e.homogeneous_degree
        if deg is None:
            raise ValueError("lambda inputs must be nonzero and homogeneous")
        key = e.key
        idx = self._ids.get(key)
        if idx is None:
            idx = len(self.vectors)
            self._ids[key] = idx
            self.vectors.append(dict(e.coeffs))
            self.degrees.append(deg)
        return idx

    def lambda_raw(self, idx: Tuple[int, ...]) -> Dict[int, Fraction]:
        hit = self.lam.get(idx)
        if hit is not None:
            return hit
        n = len(idx)
        degs = [self.degrees[i] for i in idx]
        out_deg = sum(degs) + 2 - n
        if n < 2:
            raise ArityError("lambda needs at least two arguments")
        if not 0 <= out_deg <= self.top:
            val: Dict[int, Fraction] = {}
        elif n == 2:
            val = self.dga.multiply_raw(self.vectors[idx[0]], self.vectors[idx[1]])
        elif self.variant == "printed":
            val = self._printed(idx, degs)
        else:
            val = self._uniform(idx, degs)
        self.lam[idx] = val
        return val

    def q_lambda_raw(self, idx: Tuple[int, ...]) -> Dict[int, Fraction]:
        hit = self.qlam.get(idx)
        if hit is None:
            if len(idx) == 1:
                # Q lambda_1 := -identity, used by the uniform form only
                hit = {i: -c for i, c in self.vectors[idx[0]].items()}
            else:
                hit = self.hodge.homotopy.apply_raw(self.lambda_raw(idx))
            self.qlam[idx] = hit
        return hit

    def _printed(self, idx, degs) -> Dict[int, Fraction]:
        n = len(idx)
        mul = self.dga.multiply_raw
        acc: Dict[int, Fraction] = {}
        left = self.q_lambda_raw(idx[:-1])
        if left:
            _axpy(acc, Fraction(_sign(n - 1)), mul(left, self.vectors[idx[-1]]))
        right = self.q_lambda_raw(idx[1:])
        if right:
            _axpy(acc, Fraction(-_sign(n * degs[0])), mul(self.vectors[idx[0]], right))
        for k in range(2, n - 1):
            l = n - k
            a = self.q_lambda_raw(idx[:k])
            if not a:
                continue
            b = self.q_lambda_raw(idx[k:])
            if not b:
                continue
            _axpy(acc, Fraction(-_sign(k + (l - 1) * sum(degs[:k]))), mul(a, b))
        return _clean(acc)

    def _uniform(self, idx, degs) -> Dict[int, Fraction]:
        n = len(idx)
        mul = self.dga.multiply_raw
        acc: Dict[int, Fraction] = {}
        for k in range(1, n):
            l = n - k
            a = self.q_lambda_raw(idx[:k])
            if not a:
                continue
            b = self.q_lambda_raw(idx[k:])
            if not b:
                continue
            _axpy(acc, Fraction(-_sign(k + (l - 1) * sum(degs[:k]))), mul(a, b))
        return _clean(acc)


def lambda_eval(dga: DGA, hodge: HodgeData, *args: Element, cache: Optional[LambdaCache] = None,
                variant: str = "printed") -> Element:
    """``lambda_n(v_1, ..., v_n)``, extended multilinearly over mixed-degree inputs."""
    if len(args) < 2:
        raise ArityError(f"lambda needs n >= 2 arguments, got {len(args)}")
    if cache is None:
        cache = LambdaCache(dga, hodge, variant)
    parts = [a.homogeneous_parts() for a in args]
    acc: Dict[int, Fraction] = {}
    for combo in itertools.product(*parts):
        idx = tuple(cache.register(p) for p in combo)
        _axpy(acc, Fraction(1), cache.lambda_raw(idx))
    return Element(dga.space, _clean(acc))


# ---------------------------------------------------------------------------
# transferred structure


def harmonic_tuples(basis: HarmonicSpace, k: int, top: int, shift: int) -> Iterator[Tuple[int, ...]]:
    """All ``k``-tuples of harmonic indices whose total degree plus ``shift`` lies in ``[0, top]``.

    Yields in degree-lexicographic order: total degree first, then indices.
    """
    by_deg: Dict[int, List[int]] = {}
    for i, d in enumerate(basis.degrees):
        by_deg.setdefault(d, []).append(i)
    degs = sorted(by_deg)
    seqs = [s for s in itertools.product(degs, repeat=k) if 0 <= sum(s) + shift <= top]
    seqs.sort(key=lambda s: (sum(s), s))
    for total, group in itertools.groupby(seqs, key=sum):
        tuples = []
        for s in group:
            tuples.extend(itertools.product(*(by_deg[d] for d in s)))
        tuples.sort()
        yield from tuples


@dataclass
class AInfinityStructure:
    """Tables of ``m_k`` on harmonic basis tuples, values in harmonic coordinates.

    ``m_1`` is identically zero: harmonic elements are closed.
    """

    max_arity: int
    basis: HarmonicSpace
    tables: Dict[int, Table]
    variant: str = "printed"
    top: int = 0

    def entry(self, k: int, tup: Tuple[int, ...]) -> Coords:
        if k == 1:
            return {}
        if k > self.max_arity:
            raise ArityError(f"m_{k} not computed (max arity {self.max_arity})")
        return self.tables[k].get(tup, {})

    def evaluate(self, k: int, inputs: Sequence[Coords]) -> Coords:
        """Multilinear evaluation on inputs given in harmonic coordinates."""
        acc: Coords = {}
        for combo in itertools.product(*(sorted(x.items()) for x in inputs)):
            coeff = Fraction(1)
            for _, c in combo:
                coeff *= c
            _axpy(acc, coeff, self.entry(k, tuple(h for h, _ in combo)))
        return _clean(acc)

    def apply(self, k: int, *elements: Element) -> Element:
        """``m_k`` on harmonic elements of the ambient algebra."""
        coords = [self.basis.coordinates(e) for e in elements]
        out = self.evaluate(k, coords)
        return self.basis.combine(out) if out else elements[0].space.zero()

    def format_coords(self, c: Coords) -> str:
        return format_terms((self.basis.labels[h], c[h]) for h in sorted(c))

    def entries(self, k: int) -> List[Tuple[Tuple[int, ...], Coords]]:
        degs = self.basis.degrees
        return sorted(self.tables.get(k, {}).items(), key=lambda kv: (sum(degs[i] for i in kv[0]), kv[0]))

    def lines(self) -> List[str]:
        out = []
        for k in range(2, self.max_arity + 1):
            for tup, val in self.entries(k):
                args = ",".join(self.basis.labels[i] for i in tup)
                out.append(f"m{k}({args}) = {self.format_coords(val)}")
        return out

    def to_json(self) -> dict:
        labels = self.basis.labels
        return {
            "max_arity": self.max_arity,
            "variant": self.variant,
            "harmonic_basis": {str(n): labs for n, labs in sorted(self.basis.by_degree().items())},
            "harmonic_vectors": {
                lab: [{"basis": b, "coeff": str(c)} for b, c in v.by_label().items()]
                for lab, v in zip(labels, self.basis.vectors)},
            "tables": {
                str(k): [{"inputs": [labels[i] for i in tup],
                          "output": [{"basis": labels[h], "coeff": str(val[h])} for h in sorted(val)]}
                         for tup, val in self.entries(k)]
                for k in range(2, self.max_arity + 1)},
        }


def _compute_entries(cache: LambdaCache, k: int, tuples: Sequence[Tuple[int, ...]]) -> List[Tuple[Tuple[int, ...], Coords]]:
    proj = cache.hodge.projector
    basis = cache.hodge.basis
    out = []
    for tup in tuples:
        lam = cache.lambda_raw(tup)
        if not lam:
            continue
        coords = basis.coordinates_raw(proj.apply_raw(lam))
        if coords:
            out.append((tup, coords))
    return out


_worker_cache: Optional[LambdaCache] = None


def _init_worker(dga: DGA, hodge: HodgeData, variant: str):
    global _worker_cache
    _worker_cache = LambdaCache(dga, hodge, variant)
    for v in hodge.basis.vectors:
        _worker_cache.register(v)


def _worker(job):
    k, tuples = job
    return _compute_entries(_worker_cache, k, tuples)


def _chunks(seq: List, n: int) -> List[List]:
    size = max(1, -(-len(seq) // n))
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def transfer_structure(dga: DGA, hodge: HodgeData, max_arity: int = 4, variant: str = "printed",
                       workers: int = 1) -> AInfinityStructure:
    if max_arity < 2:
        raise ArityError("max arity must be at least 2")
    basis = hodge.basis
    top = dga.space.top
    tables: Dict[int, Table] = {}
    if workers <= 1:
        cache = LambdaCache(dga, hodge, variant)
        for v in basis.vectors:
            cache.register(v)
        for k in range(2, max_arity + 1):
            tables[k] = dict(_compute_entries(cache, k, list(harmonic_tuples(basis, k, top, 2 - k))))
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(dga, hodge, variant)) as pool:
            for k in range(2, max_arity + 1):
                tuples = list(harmonic_tuples(basis, k, top, 2 - k))
                jobs = [(k, chunk) for chunk in _chunks(tuples, workers * 4)]
                merged: Table = {}
                for part in pool.map(_worker, jobs):
                    merged.update(part)
                tables[k] = dict(sorted(merged.items()))
    return AInfinityStructure(max_arity, basis, tables, variant, top)


# ---------------------------------------------------------------------------
# harmonic product and the lemmas


def _require_harmonic(hodge: HodgeData, *elements: Element):
    for e in elements:
        if hodge.projector(e) != e:
            raise NotHarmonic(f"element {e!r} has a non-harmonic component")


def harmonic_product(hodge: HodgeData, a: Element, b: Element) -> Element:
    _require_harmonic(hodge, a, b)
    return hodge.projector(hodge.dga.multiply(a, b))


def check_lemma_associativity(hodge: HodgeData) -> CheckReport:
    dga, pi, basis = hodge.dga, hodge.projector, hodge.basis
    vecs = basis.vectors
    report = CheckReport("lemma-associativity", "pass")
    count = 0
    for a, b, c in harmonic_tuples(basis, 3, dga.space.top, 0):
        x, y, z = vecs[a], vecs[b], vecs[c]
        ab = dga.multiply(x, y)
        lhs = pi(dga.multiply(pi(ab), z))
        abc = pi(dga.multiply(ab, z))
        ab_c = harmonic_product(hodge, harmonic_product(hodge, x, y), z)
        a_bc = harmonic_product(hodge, x, harmonic_product(hodge, y, z))
        count += 1
        if lhs != abc or ab_c != a_bc:
            report.status = "fail"
            report.witnesses.append({"inputs": [basis.labels[i] for i in (a, b, c)],
                                     "projected": str(lhs - abc), "associator": str(ab_c - a_bc)})
    report.details["triples"] = count
    return report


def _pairing_rank(table: Dict[Tuple[int, int], Sequence[Fraction]], rows: int, cols: int, out: int) -> int:
    """Rank of ``x -> (y -> x*y)`` as a ``rows x (cols*out)`` matrix."""
    m = [[table.get((i, j), [ZERO] * out)[k] if out else ZERO
          for j in range(cols) for k in range(out)] for i in range(rows)]
    return rank(m, cols * out)


def check_ring_isomorphism(hodge: HodgeData, ring: CohomologyRing) -> CheckReport:
    dga, basis = hodge.dga, hodge.basis
    sp = dga.space
    report = CheckReport("ring-isomorphism", "pass")
    phi: Dict[int, List[Fraction]] = {}
    for n in sp.degrees():
        idx = basis.in_degree(n)
        bn = len(ring.representatives[n])
        if len(idx) != bn:
            report.status = "fail"
            report.witnesses.append({"degree": n, "reason": f"dim H = {len(idx)} but Betti = {bn}"})
            continue
        for i in idx:
            try:
                phi[i] = ring.class_of(basis.vectors[i], n)
            except ValueError:
                report.status = "fail"
                report.witnesses.append({"degree": n, "reason": f"{basis.labels[i]} is not closed"})
        if idx and all(i in phi for i in idx) and rank([phi[i] for i in idx], bn) != bn:
            report.status = "fail"
            report.witnesses.append({"degree": n, "reason": "phi is not invertible"})
    if report.status == "fail":
        return report

    ranks = {}
    for p in sp.degrees():
        for q in sp.degrees():
            if p + q > sp.top:
                continue
            ip, iq = basis.in_degree(p), basis.in_degree(q)
            out = len(ring.representatives[p + q])
            harm_tab, ring_tab = {}, {}
            for a, i in enumerate(ip):
                for b, j in enumerate(iq):
                    lhs = ring.class_of(harmonic_product(hodge, basis.vectors[i], basis.vectors[j]), p + q)
                    rhs = ring.multiply_classes(p, phi[i], q, phi[j])
                    harm_tab[(a, b)], ring_tab[(a, b)] = lhs, rhs
                    if lhs != rhs:
                        report.status = "fail"
                        report.witnesses.append({"inputs": [basis.labels[i], basis.labels[j]],
                                                 "phi(a o b)": [str(x) for x in lhs],
                                                 "phi(a) phi(b)": [str(x) for x in rhs]})
            if ip and iq and out:
                rr = [[ring.multiply_classes(p, _unit(a, len(ip)), q, _unit(b, len(iq)))
                       for b in range(len(iq))] for a in range(len(ip))]
                ring_only = {(a, b): rr[a][b] for a in range(len(ip)) for b in range(len(iq))}
                ranks[f"{p},{q}"] = [_pairing_rank(harm_tab, len(ip), len(iq), out),
                                     _pairing_rank(ring_only, len(ip), len(iq), out)]
    report.details["pairing_ranks"] = ranks
    return report


def _unit(i: int, n: int) -> List[Fraction]:
    return [Fraction(1) if j == i else ZERO for j in range(n)]


# ---------------------------------------------------------------------------
# Stasheff identities


def stasheff_check(s: AInfinityStructure, n: int, max_witnesses: int = 5) -> CheckReport:
    """Exact check of the arity-``n`` Stasheff identity on all harmonic basis tuples.

    sum over r+s+t = n of (-1)^(r + s t + s(|a_1|+...+|a_r|))
        m_{r+1+t}(a_1..a_r, m_s(a_{r+1}..a_{r+s}), a_{r+s+1}..a_n) = 0
    """
    if n < 1 or n > s.max_arity:
        raise ArityError(f"arity {n} outside 1..{s.max_arity}")
    report = CheckReport(f"stasheff-{n}", "pass", details={"variant": s.variant})
    degs = s.basis.degrees
    count = 0
    for tup in harmonic_tuples(s.basis, n, s.top, 3 - n):
        count += 1
        residue: Coords = {}
        prefix = [0]
        for i in tup:
            prefix.append(prefix[-1] + degs[i])
        for inner in range(1, n + 1):
            for r in range(0, n - inner + 1):
                t = n - r - inner
                val = s.entry(inner, tup[r:r + inner])
                if not val:
                    continue
                sign = _sign(r + inner * t + inner * prefix[r])
                head, tail = tup[:r], tup[r + inner:]
                for h, c in val.items():
                    outer = s.entry(r + 1 + t, head + (h,) + tail)
                    if outer:
                        _axpy(residue, sign * c, outer)
        residue = _clean(residue)
        if residue:
            report.status = "fail"
            if len(report.witnesses) < max_witnesses:
                report.witnesses.append({"inputs": [s.basis.labels[i] for i in tup],
                                         "residue": s.format_coords(residue)})
    report.details["tuples"] = count
    return report


def stasheff_suite(dga: DGA, hodge: HodgeData, max_arity: int, workers: int = 1
                   ) -> Tuple[AInfinityStructure, List[CheckReport]]:
    """Transfer and check every arity up to ``max_arity``.

    Tries the printed recursion first and the uniform form second; returns
    the first variant whose identities all hold (or the last attempt).
    """
    for variant in VARIANTS:
        s = transfer_structure(dga, hodge, max_arity, variant, workers)
        reports = [stasheff_check(s, n) for n in range(1, max_arity + 1)]
        if all(r.passed for r in reports):
            break
    return s, reports


# ---------------------------------------------------------------------------
# unit and degeneracy checks


def check_unit_degeneracy(s: AInfinityStructure, hodge: HodgeData, lowest: int = 3) -> CheckReport:
    """``m_k`` vanishes whenever one argument is the unit, ``lowest <= k <= max_arity``."""
    report = CheckReport("unit-degeneracy", "pass")
    unit = hodge.dga.unit
    if unit is None:
        report.status = "skipped"
        return report
    if hodge.projector(unit) != unit:
        report.status = "fail"
        report.witnesses.append({"reason": "unit is not harmonic"})
        return report
    u = s.basis.coordinates(unit)
    count = 0
    for k in range(lowest, s.max_arity + 1):
        for rest in harmonic_tuples(s.basis, k - 1, s.top, 2 - k):
            for pos in range(k):
                acc: Coords = {}
                for h, c in u.items():
                    _axpy(acc, c, s.entry(k, rest[:pos] + (h,) + rest[pos:]))
                count += 1
                acc = _clean(acc)
                if acc:
                    report.status = "fail"
                    if len(report.witnesses) < 5:
                        labels = [s.basis.labels[i] for i in rest]
                        labels.insert(pos, "unit")
                        report.witnesses.append({"k": k, "inputs": labels, "value": s.format_coords(acc)})
    report.details["evaluations"] = count
    return report


# ---------------------------------------------------------------------------
# Massey triple products


@dataclass
class MasseyProduct:
    representative: Element
    indeterminacy: List[Element]
    u: Element
    w: Element


def _primitive(dga: DGA, hodge: HodgeData, x: Element, n: int, method: str) -> Element:
    """Some ``u`` of degree ``n - 1`` with ``d u = x`` for exact ``x`` of degree ``n``."""
    sp = dga.space
    if not x:
        return sp.zero()
    if method == "homotopy":
        return hodge.homotopy(x)
    if n - 1 < 0:
        raise NoSolution("no primitive below degree 0")
    sol = particular_solution(dga.diff.block(n - 1), x.block(n), sp.dim(n - 1))
    return sp.from_block(n - 1, sol)


def _span_basis(vectors: List[Element], basis: HarmonicSpace) -> List[Element]:
    if not vectors:
        return []
    space = vectors[0].space
    ids = sorted({i for v in vectors for i in v.coeffs})
    rows, _ = rref([[v.coeffs.get(i, ZERO) for i in ids] for v in vectors], len(ids))
    return [Element(space, {i: c for i, c in zip(ids, r) if c}) for r in rows]


def massey_triple(dga: DGA, hodge: HodgeData, a: Element, b: Element, c: Element,
                  primitive: str = "homotopy") -> MasseyProduct:
    """Massey product with ``d u = a b``, ``d w = b c`` and representative
    ``pi_H(u c - (-1)^|a| a w)``.

    ``primitive`` picks the primitives: ``"homotopy"`` uses ``Q``,
    ``"echelon"`` an exact particular solution that ignores the Hodge data.
    """
    _require_harmonic(hodge, a, b, c)
    sp = dga.space
    pi = hodge.projector
    if not (a and b and c):
        return MasseyProduct(sp.zero(), [], sp.zero(), sp.zero())
    da, db, dc = a.homogeneous_degree, b.homogeneous_degree, c.homogeneous_degree
    if None in (da, db, dc):
        raise ValueError("Massey product needs homogeneous inputs")
    ab, bc = dga.multiply(a, b), dga.multiply(b, c)
    if pi(ab):
        raise NotDefined(f"a o b = {format_element(pi(ab))} is nonzero")
    if pi(bc):
        raise NotDefined(f"b o c = {format_element(pi(bc))} is nonzero")
    u = _primitive(dga, hodge, ab, da + db, primitive)
    w = _primitive(dga, hodge, bc, db + dc, primitive)
    rep = pi(dga.multiply(u, c) - _sign(da) * dga.multiply(a, w))
    spread = []
    basis = hodge.basis
    for i in basis.in_degree(db + dc - 1):
        spread.append(pi(dga.multiply(a, basis.vectors[i])))
    for i in basis.in_degree(da + db - 1):
        spread.append(pi(dga.multiply(basis.vectors[i], c)))
    return MasseyProduct(rep, _span_basis([v for v in spread if v], basis), u, w)


def compare_m3_massey(s: AInfinityStructure, dga: DGA, hodge: HodgeData,
                      primitive: str = "echelon") -> CheckReport:
    """``m_3(a, b, c)`` against the Massey product on every defined basis triple,
    modulo indeterminacy and up to one global sign."""
    if s.max_arity < 3:
        raise ArityError("need m_3")
    basis = hodge.basis
    rows = []
    for tup in harmonic_tuples(basis, 3, s.top, -1):
        a, b, c = (basis.vectors[i] for i in tup)
        try:
            mp = massey_triple(dga, hodge, a, b, c, primitive)
        except NotDefined:
            continue
        m3 = s.entry(3, tup)
        rows.append((tup, m3, basis.coordinates(mp.representative),
                     [basis.coordinates(v) for v in mp.indeterminacy]))

    def matches(sign: int, m3, rep, indet) -> bool:
        diff = dict(m3)
        _axpy(diff, Fraction(-sign), rep)
        diff = _clean(diff)
        if not diff:
            return True
        if not indet:
            return False
        n = len(basis)
        vecs = [[v.get(i, ZERO) for i in range(n)] for v in indet]
        return SubspaceCoordinates(vecs, n).contains([diff.get(i, ZERO) for i in range(n)])

    report = CheckReport("m3-vs-massey", "fail", details={"triples": len(rows), "primitive": primitive})
    for sign in (1, -1):
        bad = [r for r in rows if not matches(sign, *r[1:])]
        if not bad:
            report.status = "pass"
            report.details["sign"] = sign
            break
        if sign == 1:
            first_bad = bad
    if report.status == "fail":
        for tup, m3, rep, indet in first_bad[:5]:
            report.witnesses.append({"inputs": [basis.labels[i] for i in tup],
                                     "m3": s.format_coords(m3), "massey": s.format_coords(rep),
                                     "indeterminacy_dim": len(indet)})
    nonzero = [r for r in rows if r[1]]
    report.details["nonzero_m3"] = len(nonzero)
    return report
