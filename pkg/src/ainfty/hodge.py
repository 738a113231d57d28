"""Hodge decomposition of a finite DGA with an inner product.

Builds the formal adjoint of the differential, the Laplacian, the harmonic
space, the harmonic projection, the Green's operator and the homotopy
``Q = G d*``, and checks every identity they must satisfy before handing
them out.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .dga import DGA
from .linalg import (
    ZERO,
    Element,
    GradedBilinearForm,
    GradedMap,
    NoSolution,
    compose,
    first_difference,
    format_element,
    identity,
    inverse,
    matmul,
    nullspace,
    free_columns,
    orthogonal_projection,
    rank,
    solve_many,
    transpose,
)


class InvariantViolation(AssertionError):
    def __init__(self, identity: str, witness: str):
        super().__init__(f"{identity} fails at {witness}")
        self.identity = identity
        self.witness = witness


class NotHarmonic(ValueError):
    pass


def adjoint(diff: GradedMap, form: GradedBilinearForm) -> GradedMap:
    """Formal adjoint: per degree ``d*_{n+1} = g_n^{-1} d_n^T g_{n+1}``."""
    sp = diff.space
    blocks = {}
    for n in sp.degrees():
        src, tgt = sp.dim(n), sp.dim(n - 1)
        if tgt == 0 or src == 0:
            blocks[n] = [[ZERO] * src for _ in range(tgt)]
            continue
        d = diff.block(n - 1)                                   # src x tgt
        dt = transpose(d, src, tgt)                             # tgt x src
        dtg = matmul(dt, form.gram[n], inner=src, cols=src)
        blocks[n] = matmul(inverse(form.gram[n - 1]), dtg, inner=tgt, cols=src)
    return GradedMap(sp, -1, blocks)


def laplacian(diff: GradedMap, adj: GradedMap) -> GradedMap:
    return compose(diff, adj) + compose(adj, diff)


def harmonic_basis(lap: GradedMap) -> Dict[int, List[Element]]:
    """Canonical echelon kernel basis of the Laplacian in each degree."""
    sp = lap.space
    return {n: [sp.from_block(n, v) for v in nullspace(lap.block(n), sp.dim(n))] for n in sp.degrees()}


def _green(lap: GradedMap, proj: GradedMap, harmonic: Dict[int, List[Element]],
           form: GradedBilinearForm) -> GradedMap:
    """Green's operator: ``G y`` is the unique ``x`` orthogonal to harmonics with ``lap x = y - proj y``.

    Solved per degree on a basis of the orthogonal complement of the
    harmonic space; the Laplacian is injective there.
    """
    sp = lap.space
    blocks = {}
    for n in sp.degrees():
        d = sp.dim(n)
        if d == 0:
            blocks[n] = []
            continue
        h = [v.block(n) for v in harmonic[n]]
        hg = matmul(h, form.gram[n], inner=d, cols=d) if h else []
        complement = nullspace(hg, d) if h else identity(d)
        k = len(complement)
        if k == 0:
            blocks[n] = [[ZERO] * d for _ in range(d)]
            continue
        lap_c = matmul(lap.block(n), transpose(complement, k, d), inner=d, cols=k)   # d x k
        p = proj.block(n)
        rhs = [[(1 if i == j else 0) - p[i][j] for i in range(d)] for j in range(d)]
        try:
            coeffs = solve_many(lap_c, rhs, k)
        except NoSolution:
            raise InvariantViolation("Green solve", f"degree {n}") from None
        cols = [[sum((c * complement[t][i] for t, c in enumerate(col) if c), ZERO) for i in range(d)]
                for col in coeffs]
        blocks[n] = transpose(cols, d, d)
    return GradedMap(sp, 0, blocks)


@dataclass
class HarmonicSpace:
    """The harmonic basis with labels and coordinate lookup.

    Each basis vector comes from the echelon kernel basis of the Laplacian,
    so it has coefficient 1 at its own free column and 0 at the free columns
    of the other vectors in its degree; coordinates are read off there.
    """

    vectors: List[Element]
    labels: List[str]
    degrees: List[int]
    pivots: List[int]

    def __len__(self):
        return len(self.vectors)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def in_degree(self, n: int) -> List[int]:
        return [i for i, d in enumerate(self.degrees) if d == n]

    def coordinates_raw(self, coeffs: Dict[int, Fraction]) -> Dict[int, Fraction]:
        return {h: coeffs[p] for h, p in enumerate(self.pivots) if coeffs.get(p)}

    def coordinates(self, e: Element) -> Dict[int, Fraction]:
        """Coordinates of a harmonic element; no membership check."""
        return self.coordinates_raw(e.coeffs)

    def combine(self, coords: Dict[int, Fraction]) -> Element:
        sp = self.vectors[0].space if self.vectors else None
        out: Dict[int, Fraction] = {}
        for h, c in coords.items():
            for i, a in self.vectors[h].coeffs.items():
                out[i] = out.get(i, ZERO) + c * a
        return Element(sp, out)

    def by_degree(self) -> Dict[int, List[str]]:
        out: Dict[int, List[str]] = {}
        for lab, d in zip(self.labels, self.degrees):
            out.setdefault(d, []).append(lab)
        return out


def _harmonic_space(dga: DGA, lap: GradedMap, harmonic: Dict[int, List[Element]]) -> HarmonicSpace:
    sp = dga.space
    vectors, labels, degrees, pivots = [], [], [], []
    for n in sp.degrees():
        frees = free_columns(lap.block(n), sp.dim(n))
        for i, (v, f) in enumerate(zip(harmonic[n], frees)):
            g = sp.offset[n] + f
            if len(v.coeffs) == 1:
                lab = sp.labels[g]
            else:
                lab = f"H{n}_{i}"
                while lab in sp.index:
                    lab += "'"
            vectors.append(v)
            labels.append(lab)
            degrees.append(n)
            pivots.append(g)
    return HarmonicSpace(vectors, labels, degrees, pivots)


@dataclass
class HodgeData:
    dga: DGA
    adjoint: GradedMap
    laplacian: GradedMap
    harmonic: Dict[int, List[Element]]
    projector: GradedMap
    green: GradedMap
    homotopy: GradedMap
    basis: HarmonicSpace

    @property
    def harmonic_dims(self) -> Tuple[int, ...]:
        return tuple(len(self.harmonic[n]) for n in self.dga.space.degrees())

    def is_harmonic(self, e: Element) -> bool:
        return self.projector(e) == e

    def summary(self) -> dict:
        sp = self.dga.space
        return {
            "dims": [sp.dim(n) for n in sp.degrees()],
            "harmonic_dims": list(self.harmonic_dims),
            "rank_d": [self.dga.diff.rank(n) for n in sp.degrees()],
        }


def harmonic_part(h: HodgeData, alpha: Element) -> Element:
    return h.projector(alpha)


def _expect_equal(name: str, f: GradedMap, g: GradedMap):
    diff = first_difference(f, g)
    if diff is not None:
        raise InvariantViolation(name, f"basis vector {diff[0]} (residue {format_element(diff[1])})")


def check_hodge_invariants(h: HodgeData) -> List[str]:
    """Verify every Hodge identity exactly; returns the names checked.

    Raises InvariantViolation at the first failure, with a witness.
    """
    dga = h.dga
    sp = dga.space
    d, ds, lap, pi, G, Q = dga.diff, h.adjoint, h.laplacian, h.projector, h.green, h.homotopy
    form = dga.form
    one = GradedMap.identity(sp)
    checked: List[Tuple[str, Callable[[], None]]] = []

    def adjointness():
        for n in sp.degrees():
            for a in sp.indices(n):
                ea = sp.basis_element(sp.labels[a])
                da = d(ea)
                for b in sp.indices(n + 1):
                    eb = sp.basis_element(sp.labels[b])
                    if form.inner(da, eb) != form.inner(ea, ds(eb)):
                        raise InvariantViolation("<d a, b> = <a, d* b>", f"({sp.labels[a]}, {sp.labels[b]})")

    def symmetric(name: str, m: GradedMap):
        for n in sp.degrees():
            k = sp.dim(n)
            gm = matmul(form.gram[n], m.block(n), inner=k, cols=k)
            for i in range(k):
                for j in range(i):
                    if gm[i][j] != gm[j][i]:
                        raise InvariantViolation(name, f"({sp.basis[n][i]}, {sp.basis[n][j]})")

    def harmonic_is_closed_and_coclosed():
        for n in sp.degrees():
            for v in h.harmonic[n]:
                if d(v) or ds(v):
                    raise InvariantViolation("H = Ker d & Ker d*", format_element(v))
            k = sp.dim(n)
            stacked = d.block(n) + ds.block(n)
            if len(nullspace(stacked, k)) != len(h.harmonic[n]):
                raise InvariantViolation("H = Ker d & Ker d*", f"dimension mismatch in degree {n}")

    def dimension_count():
        for n in sp.degrees():
            r_d = rank(d.block(n - 1), sp.dim(n - 1)) if n > 0 else 0
            r_ds = rank(ds.block(n + 1), sp.dim(n + 1)) if n < sp.top else 0
            if sp.dim(n) != len(h.harmonic[n]) + r_d + r_ds:
                raise InvariantViolation("A = H + Im d + Im d*", f"degree {n}")

    def projector_image():
        for n in sp.degrees():
            if rank(pi.block(n), sp.dim(n)) != len(h.harmonic[n]):
                raise InvariantViolation("image(pi_H) = H", f"degree {n}")
            for v in h.harmonic[n]:
                if pi(v) != v:
                    raise InvariantViolation("image(pi_H) = H", format_element(v))

    zero0 = GradedMap.zero(sp, 0)
    zero_m2 = GradedMap.zero(sp, -2)
    checked = [
        ("<d a, b> = <a, d* b>", adjointness),
        ("(d*)^2 = 0", lambda: _expect_equal("(d*)^2 = 0", compose(ds, ds), zero_m2)),
        ("laplacian symmetric", lambda: symmetric("laplacian symmetric", lap)),
        ("H = Ker d & Ker d*", harmonic_is_closed_and_coclosed),
        ("A = H + Im d + Im d*", dimension_count),
        ("pi_H^2 = pi_H", lambda: _expect_equal("pi_H^2 = pi_H", compose(pi, pi), pi)),
        ("image(pi_H) = H", projector_image),
        ("pi_H symmetric", lambda: symmetric("pi_H symmetric", pi)),
        ("G lap = 1 - pi_H", lambda: _expect_equal("G lap = 1 - pi_H", compose(G, lap), one - pi)),
        ("lap G = 1 - pi_H", lambda: _expect_equal("lap G = 1 - pi_H", compose(lap, G), one - pi)),
        ("G pi_H = 0", lambda: _expect_equal("G pi_H = 0", compose(G, pi), zero0)),
        ("pi_H G = 0", lambda: _expect_equal("pi_H G = 0", compose(pi, G), zero0)),
        ("G d = d G", lambda: _expect_equal("G d = d G", compose(G, d), compose(d, G))),
        ("G d* = d* G", lambda: _expect_equal("G d* = d* G", compose(G, ds), compose(ds, G))),
        ("1 - pi_H = dQ + Qd", lambda: _expect_equal(
            "1 - pi_H = dQ + Qd", one - pi, compose(d, Q) + compose(Q, d))),
        ("Q^2 = 0", lambda: _expect_equal("Q^2 = 0", compose(Q, Q), zero_m2)),
        ("pi_H Q = 0", lambda: _expect_equal("pi_H Q = 0", compose(pi, Q), GradedMap.zero(sp, -1))),
        ("Q pi_H = 0", lambda: _expect_equal("Q pi_H = 0", compose(Q, pi), GradedMap.zero(sp, -1))),
    ]
    for _, check in checked:
        check()
    return [name for name, _ in checked]


def build_hodge(dga: DGA, verify: bool = True) -> HodgeData:
    ds = adjoint(dga.diff, dga.form)
    lap = laplacian(dga.diff, ds)
    harm = harmonic_basis(lap)
    proj = orthogonal_projection([v for n in sorted(harm) for v in harm[n]], dga.form)
    green = _green(lap, proj, harm, dga.form)
    Q = compose(green, ds)
    h = HodgeData(dga, ds, lap, harm, proj, green, Q, _harmonic_space(dga, lap, harm))
    if verify:
        check_hodge_invariants(h)
    return h
