"""DGA constructors: simplicial cochains with cup product, Chevalley-Eilenberg algebras."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .dga import DGA, ParseError
from .linalg import ZERO, as_fraction


class InvalidComplex(ValueError):
    pass


class JacobiFailure(ValueError):
    def __init__(self, triple: Tuple[int, int, int], residue: Dict[int, Fraction]):
        i, j, k = triple
        super().__init__(f"Jacobi identity fails on (e{i}, e{j}, e{k}): residue {residue}")
        self.triple = triple
        self.residue = residue


# ---------------------------------------------------------------------------
# simplicial complexes


class SimplicialComplex:
    """Finite abstract simplicial complex; simplices are index tuples sorted by vertex order."""

    def __init__(self, vertices: Sequence[str], simplices: Iterable[Sequence[str]]):
        if not vertices:
            raise InvalidComplex("complex has no vertices")
        self.vertices = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidComplex("duplicate vertex label")
        pos = {v: i for i, v in enumerate(self.vertices)}
        simp = set()
        for s in simplices:
            try:
                idx = tuple(sorted(pos[v] for v in s))
            except KeyError as exc:
                raise InvalidComplex(f"unknown vertex {exc.args[0]!r}") from None
            if not idx or len(set(idx)) != len(idx):
                raise InvalidComplex(f"bad simplex {list(s)}")
            simp.add(idx)
        simp.update((i,) for i in range(len(self.vertices)))
        for s in simp:
            for face in combinations(s, len(s) - 1):
                if face and face not in simp:
                    names = [self.vertices[i] for i in face]
                    raise InvalidComplex(f"face {names} of {[self.vertices[i] for i in s]} is missing")
        self.simplices = sorted(simp, key=lambda s: (len(s), s))

    @classmethod
    def from_facets(cls, vertices: Sequence[str], facets: Iterable[Sequence[str]]) -> "SimplicialComplex":
        closed = set()
        for f in facets:
            f = list(f)
            for r in range(1, len(f) + 1):
                closed.update(combinations(f, r))
        return cls(vertices, closed)

    @property
    def dimension(self) -> int:
        return max(len(s) for s in self.simplices) - 1

    def of_dim(self, p: int) -> List[Tuple[int, ...]]:
        return [s for s in self.simplices if len(s) == p + 1]

    def f_vector(self) -> Tuple[int, ...]:
        return tuple(len(self.of_dim(p)) for p in range(self.dimension + 1))

    def label(self, s: Tuple[int, ...]) -> str:
        return ".".join(self.vertices[i] for i in s)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices),
                "simplices": [[self.vertices[i] for i in s] for s in self.simplices]}


def parse_complex(obj) -> SimplicialComplex:
    if not isinstance(obj, dict) or "vertices" not in obj or "simplices" not in obj:
        raise ParseError("complex file needs 'vertices' and 'simplices'")
    verts = obj["vertices"]
    if not isinstance(verts, list):
        raise ParseError("'vertices' must be a list")
    verts = [str(v) for v in verts]
    simplices = obj["simplices"]
    if not isinstance(simplices, list) or not all(isinstance(s, list) for s in simplices):
        raise ParseError("'simplices' must be a list of vertex lists")
    return SimplicialComplex.from_facets(verts, [[str(v) for v in s] for s in simplices])


def simplicial_cochain_dga(k: SimplicialComplex, name: str = "") -> DGA:
    """Cochains on ``k`` with the simplicial coboundary and the front/back-face cup product.

    The unit is the sum of all vertex duals.
    """
    simplices = k.simplices
    top = k.dimension
    basis = {p: [k.label(s) for s in k.of_dim(p)] for p in range(top + 1)}
    present = set(simplices)

    differential: Dict[str, Dict[str, Fraction]] = {}
    by_dim = {p: k.of_dim(p + 1) for p in range(top)}
    for s in simplices:
        p = len(s) - 1
        if p == top:
            continue
        img = {}
        sset = set(s)
        for t in by_dim[p]:
            if sset <= set(t):
                (extra,) = set(t) - sset
                pos = t.index(extra)
                img[k.label(t)] = Fraction(-1 if pos % 2 else 1)
        if img:
            differential[k.label(s)] = img

    product: Dict[Tuple[str, str], Dict[str, Fraction]] = {}
    by_first: Dict[int, List[Tuple[int, ...]]] = {}
    for t in simplices:
        by_first.setdefault(t[0], []).append(t)
    for s in simplices:
        for t in by_first.get(s[-1], []):
            joined = s + t[1:]
            if len(set(joined)) == len(joined) and tuple(sorted(joined)) == joined and joined in present:
                product[(k.label(s), k.label(t))] = {k.label(joined): Fraction(1)}
    unit = {lab: 1 for lab in basis[0]}
    return DGA.from_labels(basis, differential, product, unit, None, name)


# ---------------------------------------------------------------------------
# Lie algebras


@dataclass
class LieStructure:
    """Structure constants ``[e_i, e_j] = sum_k c[(i, j)][k] e_k`` for ``1 <= i < j <= dim``."""

    dim: int
    brackets: Dict[Tuple[int, int], Dict[int, Fraction]] = field(default_factory=dict)
    names: Optional[List[str]] = None

    def __post_init__(self):
        for (i, j), row in self.brackets.items():
            if not (1 <= i < j <= self.dim) or any(not 1 <= k <= self.dim for k in row):
                raise ValueError(f"bracket index out of range: ({i}, {j})")
        if self.names is None:
            self.names = [f"e{i}" for i in range(1, self.dim + 1)]
        if len(self.names) != self.dim or len(set(self.names)) != self.dim:
            raise ValueError("need one distinct name per generator")

    def bracket(self, i: int, j: int) -> Dict[int, Fraction]:
        if i == j:
            return {}
        if i < j:
            return dict(self.brackets.get((i, j), {}))
        return {k: -c for k, c in self.brackets.get((j, i), {}).items()}

    def bracket_vec(self, x: Dict[int, Fraction], y: Dict[int, Fraction]) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.bracket(i, j).items():
                    out[k] = out.get(k, ZERO) + a * b * c
        return {k: v for k, v in out.items() if v}

    def jacobi_witness(self) -> Optional[Tuple[Tuple[int, int, int], Dict[int, Fraction]]]:
        for i, j, k in combinations(range(1, self.dim + 1), 3):
            ei, ej, ek = {i: Fraction(1)}, {j: Fraction(1)}, {k: Fraction(1)}
            total: Dict[int, Fraction] = {}
            for a, b, c in ((ei, ej, ek), (ej, ek, ei), (ek, ei, ej)):
                for m, v in self.bracket_vec(self.bracket_vec(a, b), c).items():
                    total[m] = total.get(m, ZERO) + v
            total = {m: v for m, v in total.items() if v}
            if total:
                return (i, j, k), total
        return None

    def to_json(self) -> dict:
        out = {"dim": self.dim,
               "brackets": [{"i": i, "j": j, "k": k, "c": str(c)}
                            for (i, j), row in sorted(self.brackets.items()) for k, c in sorted(row.items())]}
        if self.names != [f"e{i}" for i in range(1, self.dim + 1)]:
            out["names"] = list(self.names)
        return out


def parse_lie(obj) -> LieStructure:
    if not isinstance(obj, dict) or "dim" not in obj:
        raise ParseError("Lie structure file needs 'dim'")
    dim = obj["dim"]
    if not isinstance(dim, int) or dim < 0:
        raise ParseError("'dim' must be a non-negative integer")
    brackets: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    for e, b in enumerate(obj.get("brackets", [])):
        if not isinstance(b, dict) or not {"i", "j", "k", "c"} <= set(b):
            raise ParseError(f"brackets[{e}]: expected {{i, j, k, c}}")
        i, j, k = b["i"], b["j"], b["k"]
        if not all(isinstance(x, int) and 1 <= x <= dim for x in (i, j, k)) or i == j:
            raise ParseError(f"brackets[{e}]: indices out of range")
        try:
            c = as_fraction(b["c"])
        except (ValueError, ZeroDivisionError, TypeError):
            raise ParseError(f"brackets[{e}]: bad coefficient {b['c']!r}") from None
        if i > j:
            i, j, c = j, i, -c
        row = brackets.setdefault((i, j), {})
        row[k] = row.get(k, ZERO) + c
    names = obj.get("names")
    try:
        return LieStructure(dim, brackets, names)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _merge_sign(a: Tuple[int, ...], b: Tuple[int, ...]) -> int:
    """Sign of the shuffle sorting ``a + b`` (both sorted, disjoint)."""
    inversions = sum(1 for x in a for y in b if x > y)
    return -1 if inversions % 2 else 1


def chevalley_eilenberg_dga(g: LieStructure, name: str = "", check_jacobi: bool = True) -> DGA:
    """Exterior algebra on the dual generators with ``d xi^k = -sum_{i<j} c_ij^k xi^i xi^j``.

    With ``check_jacobi=False`` the algebra is built regardless; its
    differential then squares to zero exactly when Jacobi holds.
    """
    if check_jacobi:
        bad = g.jacobi_witness()
        if bad is not None:
            raise JacobiFailure(*bad)
    n = g.dim
    names = g.names

    def label(mono: Tuple[int, ...]) -> str:
        return "^".join(names[i - 1] for i in mono) if mono else "1"

    monos = {p: list(combinations(range(1, n + 1), p)) for p in range(n + 1)}
    basis = {p: [label(m) for m in monos[p]] for p in range(n + 1)}

    dgen: Dict[int, Dict[Tuple[int, ...], Fraction]] = {k: {} for k in range(1, n + 1)}
    for (i, j), row in g.brackets.items():
        for k, c in row.items():
            if c:
                acc = dgen[k]
                acc[(i, j)] = acc.get((i, j), ZERO) - c

    def wedge(a: Tuple[int, ...], b: Tuple[int, ...]):
        if set(a) & set(b):
            return None, 0
        return tuple(sorted(a + b)), _merge_sign(a, b)

    differential: Dict[str, Dict[str, Fraction]] = {}
    for p in range(1, n):
        for m in monos[p]:
            img: Dict[str, Fraction] = {}
            for r, gen in enumerate(m):
                before, after = m[:r], m[r + 1:]
                for two, c in dgen[gen].items():
                    left, s1 = wedge(before, two)
                    if left is None:
                        continue
                    full, s2 = wedge(left, after)
                    if full is None:
                        continue
                    coeff = c * s1 * s2 * (-1 if r % 2 else 1)
                    lab = label(full)
                    img[lab] = img.get(lab, ZERO) + coeff
            img = {k: v for k, v in img.items() if v}
            if img:
                differential[label(m)] = img

    product: Dict[Tuple[str, str], Dict[str, Fraction]] = {}
    for p in range(n + 1):
        for a in monos[p]:
            for q in range(n + 1 - p):
                for b in monos[q]:
                    ab, s = wedge(a, b)
                    if ab is not None:
                        product[(label(a), label(b))] = {label(ab): Fraction(s)}
    return DGA.from_labels(basis, differential, product, "1", None, name)
