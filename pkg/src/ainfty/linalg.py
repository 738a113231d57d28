"""Exact graded linear algebra over the rationals.

Matrices are plain lists of rows of ``Fraction``.  Graded objects index
their basis globally in degree-major order; a block of a graded map at
source degree ``n`` is a ``dim(n + shift) x dim(n)`` matrix.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Matrix = List[List[Fraction]]

ZERO = Fraction(0)
ONE = Fraction(1)


class NoSolution(ValueError):
    pass


class DependentInput(ValueError):
    pass


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def format_fraction(q: Fraction) -> str:
    return str(q)


# ---------------------------------------------------------------------------
# dense matrix kernels


def zeros(rows: int, cols: int) -> Matrix:
    return [[ZERO] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = ONE
    return m


def transpose(m: Matrix, rows: Optional[int] = None, cols: Optional[int] = None) -> Matrix:
    if rows is None:
        rows = len(m)
    if cols is None:
        cols = len(m[0]) if m else 0
    return [[m[i][j] for i in range(rows)] for j in range(cols)]


def matmul(a: Matrix, b: Matrix, inner: Optional[int] = None, cols: Optional[int] = None) -> Matrix:
    """Product of an ``r x inner`` and an ``inner x cols`` matrix.

    Shapes are passed explicitly when a factor may have zero rows.
    """
    if inner is None:
        inner = len(b)
    if cols is None:
        cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [ZERO] * cols
        for k, x in enumerate(row):
            if x:
                bk = b[k]
                for j in range(cols):
                    y = bk[j]
                    if y:
                        acc[j] += x * y
        out.append(acc)
    return out


def matvec(a: Matrix, v: Sequence[Fraction]) -> List[Fraction]:
    return [sum((x * y for x, y in zip(row, v) if x and y), ZERO) for row in a]


def rref(m: Matrix, cols: Optional[int] = None) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form with leftmost-nonzero pivoting.

    Returns the nonzero rows of the reduced matrix and the pivot columns.
    The result is canonical: it depends only on the row space.
    """
    if cols is None:
        cols = len(m[0]) if m else 0
    rows = [list(r) for r in m]
    pivots: List[int] = []
    r = 0
    nrows = len(rows)
    for c in range(cols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = ONE / rows[r][c]
        if inv != 1:
            rows[r] = [x * inv for x in rows[r]]
        piv = rows[r]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [x - f * y for x, y in zip(rows[i], piv)]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank(m: Matrix, cols: Optional[int] = None) -> int:
    return len(rref(m, cols)[1])


def nullspace(m: Matrix, cols: int) -> List[List[Fraction]]:
    """Canonical kernel basis: one vector per free column, in column order.

    The vector for free column ``f`` has a 1 at ``f`` and 0 at every other
    free column, so coordinates in this basis are read off the free columns.
    """
    reduced, pivots = rref(m, cols)
    pivset = set(pivots)
    basis = []
    for f in range(cols):
        if f in pivset:
            continue
        v = [ZERO] * cols
        v[f] = ONE
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def free_columns(m: Matrix, cols: int) -> List[int]:
    pivset = set(rref(m, cols)[1])
    return [c for c in range(cols) if c not in pivset]


def column_space(m: Matrix, rows: int, cols: int) -> List[List[Fraction]]:
    """Canonical basis of the column space (rows of rref of the transpose)."""
    return rref(transpose(m, rows, cols), rows)[0]


def solve_many(a: Matrix, rhs: Sequence[Sequence[Fraction]], cols: int) -> List[List[Fraction]]:
    """Solve ``a x = b`` for each ``b`` in ``rhs``; ``a`` must have full column rank.

    Raises NoSolution when some right-hand side is outside the column space.
    """
    nrows = len(a)
    nrhs = len(rhs)
    aug = [list(a[i]) + [b[i] for b in rhs] for i in range(nrows)]
    reduced, pivots = rref(aug, cols + nrhs)
    if any(p >= cols for p in pivots):
        raise NoSolution("right-hand side not in the image")
    if len(pivots) < cols:
        raise ValueError("matrix is not injective on the allowed subspace")
    return [[reduced[i][cols + j] for i in range(cols)] for j in range(nrhs)]


def particular_solution(a: Matrix, b: Sequence[Fraction], cols: int) -> List[Fraction]:
    """Some ``x`` with ``a x = b`` (free variables set to zero)."""
    aug = [list(a[i]) + [b[i]] for i in range(len(a))]
    reduced, pivots = rref(aug, cols + 1)
    if pivots and pivots[-1] == cols:
        raise NoSolution("right-hand side not in the image")
    x = [ZERO] * cols
    for row, p in zip(reduced, pivots):
        x[p] = row[cols]
    return x


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    cols = solve_many(m, [[ONE if i == j else ZERO for i in range(n)] for j in range(n)], n)
    return transpose(cols, n, n)


def is_positive_definite(g: Matrix) -> bool:
    """Leading principal minors all positive.

    Elimination without row exchanges has k-th pivot equal to the ratio of
    consecutive leading minors, so every pivot must be positive.
    """
    n = len(g)
    rows = [list(r) for r in g]
    for k in range(n):
        p = rows[k][k]
        if p <= 0:
            return False
        for i in range(k + 1, n):
            f = rows[i][k] / p
            if f:
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[k])]
    return True


def is_symmetric(g: Matrix) -> bool:
    n = len(g)
    return all(g[i][j] == g[j][i] for i in range(n) for j in range(i))


class SubspaceCoordinates:
    """Coordinates with respect to a fixed linearly independent list of vectors.

    Precomputes a left inverse once so repeated lookups are a matrix-vector
    product plus a membership check.
    """

    def __init__(self, vectors: Sequence[Sequence[Fraction]], ambient: int):
        self.k = len(vectors)
        self.ambient = ambient
        # rows of [V^T | I] reduced; V^T is ambient x k
        aug = [[vectors[j][i] for j in range(self.k)] + [ONE if c == i else ZERO for c in range(ambient)]
               for i in range(ambient)]
        reduced, pivots = rref(aug, self.k + ambient)
        if len([p for p in pivots if p < self.k]) < self.k:
            raise DependentInput("vectors are linearly dependent")
        self._left = [row[self.k:] for row in reduced[: self.k]]
        # remaining rows vanish on the span and cut it out exactly
        self._annihilator = [row[self.k:] for row in reduced[self.k:]]

    def coordinates(self, v: Sequence[Fraction]) -> Optional[List[Fraction]]:
        """Coordinates of ``v``, or None if ``v`` is not in the span."""
        for row in self._annihilator:
            if sum((x * y for x, y in zip(row, v) if x and y), ZERO):
                return None
        return [sum((x * y for x, y in zip(row, v) if x and y), ZERO) for row in self._left]

    def contains(self, v: Sequence[Fraction]) -> bool:
        return self.coordinates(v) is not None


# ---------------------------------------------------------------------------
# graded objects


class GradedVectorSpace:
    """Finite graded space with named basis in degrees ``0..top``."""

    def __init__(self, basis: Dict[int, Sequence[str]]):
        if any(n < 0 for n in basis):
            raise ValueError("negative degree")
        self.top = max(basis) if basis else 0
        self.basis: Dict[int, Tuple[str, ...]] = {
            n: tuple(basis.get(n, ())) for n in range(self.top + 1)
        }
        self.labels: List[str] = []
        self.degree_of: List[int] = []
        self.offset: Dict[int, int] = {}
        for n in range(self.top + 1):
            self.offset[n] = len(self.labels)
            self.labels.extend(self.basis[n])
            self.degree_of.extend([n] * len(self.basis[n]))
        self.index: Dict[str, int] = {}
        for i, lab in enumerate(self.labels):
            if lab in self.index:
                raise ValueError(f"duplicate basis label {lab!r}")
            self.index[lab] = i

    def dim(self, n: int) -> int:
        return len(self.basis[n]) if 0 <= n <= self.top else 0

    @property
    def total_dim(self) -> int:
        return len(self.labels)

    def degrees(self) -> range:
        return range(self.top + 1)

    def indices(self, n: int) -> range:
        if not 0 <= n <= self.top:
            return range(0)
        o = self.offset[n]
        return range(o, o + len(self.basis[n]))

    def basis_element(self, label: str) -> "Element":
        return Element(self, {self.index[label]: ONE})

    def zero(self) -> "Element":
        return Element(self, {})

    def from_block(self, n: int, v: Sequence[Fraction]) -> "Element":
        o = self.offset.get(n, 0)
        return Element(self, {o + i: x for i, x in enumerate(v) if x})

    def __eq__(self, other):
        return isinstance(other, GradedVectorSpace) and self.basis == other.basis

    def __hash__(self):
        return hash(tuple(self.basis.items()))

    def __repr__(self):
        dims = ",".join(str(self.dim(n)) for n in self.degrees())
        return f"GradedVectorSpace(dims=({dims}))"


class Element:
    """Immutable rational vector over the basis of a graded space."""

    __slots__ = ("space", "coeffs", "_key")

    def __init__(self, space: GradedVectorSpace, coeffs: Dict[int, Fraction]):
        self.space = space
        self.coeffs = {i: c for i, c in coeffs.items() if c}
        self._key = None

    @classmethod
    def from_labels(cls, space: GradedVectorSpace, coeffs: Dict[str, object]) -> "Element":
        return cls(space, {space.index[k]: as_fraction(v) for k, v in coeffs.items()})

    @property
    def key(self) -> Tuple[Tuple[int, Fraction], ...]:
        if self._key is None:
            self._key = tuple(sorted(self.coeffs.items()))
        return self._key

    def by_label(self) -> Dict[str, Fraction]:
        return {self.space.labels[i]: c for i, c in sorted(self.coeffs.items())}

    def __getitem__(self, label: str) -> Fraction:
        return self.coeffs.get(self.space.index[label], ZERO)

    @property
    def homogeneous_degree(self) -> Optional[int]:
        degs = {self.space.degree_of[i] for i in self.coeffs}
        if len(degs) == 1:
            return degs.pop()
        return None

    def degrees(self) -> List[int]:
        return sorted({self.space.degree_of[i] for i in self.coeffs})

    def homogeneous_parts(self) -> List["Element"]:
        parts: Dict[int, Dict[int, Fraction]] = {}
        for i, c in self.coeffs.items():
            parts.setdefault(self.space.degree_of[i], {})[i] = c
        return [Element(self.space, parts[n]) for n in sorted(parts)]

    def block(self, n: int) -> List[Fraction]:
        o = self.space.offset.get(n, 0)
        return [self.coeffs.get(o + i, ZERO) for i in range(self.space.dim(n))]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other: "Element") -> "Element":
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, ZERO) + c
        return Element(self.space, out)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-1) * other

    def __neg__(self) -> "Element":
        return Element(self.space, {i: -c for i, c in self.coeffs.items()})

    def __rmul__(self, scalar) -> "Element":
        s = as_fraction(scalar)
        return Element(self.space, {i: s * c for i, c in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.coeffs == other.coeffs and self.space == other.space

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Element({format_element(self)})"


def format_terms(terms: Iterable[Tuple[str, Fraction]]) -> str:
    out = ""
    for label, c in terms:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = label if mag == 1 else f"{mag}*{label}"
        if not out:
            out = body if sign == "+" else f"-{body}"
        else:
            out += f" {sign} {body}"
    return out or "0"


def format_element(e: Element) -> str:
    return format_terms(e.by_label().items())


class GradedMap:
    """Linear map of fixed degree shift, stored as dense blocks per source degree."""

    def __init__(self, space: GradedVectorSpace, shift: int, blocks: Optional[Dict[int, Matrix]] = None):
        self.space = space
        self.shift = shift
        self.blocks: Dict[int, Matrix] = {}
        blocks = blocks or {}
        for n in space.degrees():
            rows, cols = space.dim(n + shift), space.dim(n)
            b = blocks.get(n)
            if b is None:
                b = zeros(rows, cols)
            if len(b) != rows or any(len(r) != cols for r in b):
                raise ValueError(f"block {n} has wrong shape for {rows}x{cols}")
            self.blocks[n] = [[as_fraction(x) for x in r] for r in b]
        self._columns = None

    @classmethod
    def identity(cls, space: GradedVectorSpace) -> "GradedMap":
        return cls(space, 0, {n: identity(space.dim(n)) for n in space.degrees()})

    @classmethod
    def zero(cls, space: GradedVectorSpace, shift: int = 0) -> "GradedMap":
        return cls(space, shift)

    @classmethod
    def from_images(cls, space: GradedVectorSpace, shift: int, images: Dict[int, Element]) -> "GradedMap":
        """Build from images of basis vectors (absent = zero)."""
        blocks = {n: zeros(space.dim(n + shift), space.dim(n)) for n in space.degrees()}
        for i, img in images.items():
            n = space.degree_of[i]
            col = i - space.offset[n]
            tgt = n + shift
            for k, c in img.coeffs.items():
                if space.degree_of[k] != tgt:
                    raise ValueError(
                        f"image of {space.labels[i]} has a component {space.labels[k]} outside degree {tgt}")
                blocks[n][k - space.offset[tgt]][col] = c
        return cls(space, shift, blocks)

    def block(self, n: int) -> Matrix:
        if n in self.blocks:
            return self.blocks[n]
        return zeros(self.space.dim(n + self.shift), self.space.dim(n))

    @property
    def columns(self) -> List[Tuple[Tuple[int, Fraction], ...]]:
        """Sparse image of each global basis vector as ``(index, coeff)`` pairs."""
        if self._columns is None:
            sp = self.space
            cols: List[Tuple[Tuple[int, Fraction], ...]] = []
            for n in sp.degrees():
                b = self.blocks[n]
                to = sp.offset.get(n + self.shift, 0)
                for j in range(sp.dim(n)):
                    cols.append(tuple((to + r, b[r][j]) for r in range(len(b)) if b[r][j]))
            self._columns = cols
        return self._columns

    def apply_raw(self, coeffs: Dict[int, Fraction]) -> Dict[int, Fraction]:
        cols = self.columns
        out: Dict[int, Fraction] = {}
        for i, c in coeffs.items():
            for k, a in cols[i]:
                out[k] = out.get(k, ZERO) + a * c
        return {k: v for k, v in out.items() if v}

    def __call__(self, e: Element) -> Element:
        return Element(self.space, self.apply_raw(e.coeffs))

    def __add__(self, other: "GradedMap") -> "GradedMap":
        self._check_compatible(other)
        return GradedMap(self.space, self.shift, {
            n: [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(self.blocks[n], other.blocks[n])]
            for n in self.space.degrees()})

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        return self + other.scaled(-1)

    def scaled(self, s) -> "GradedMap":
        s = as_fraction(s)
        return GradedMap(self.space, self.shift,
                         {n: [[s * x for x in r] for r in b] for n, b in self.blocks.items()})

    def _check_compatible(self, other: "GradedMap"):
        if self.space != other.space or self.shift != other.shift:
            raise ValueError("incompatible graded maps")

    def is_zero(self) -> bool:
        return all(not x for b in self.blocks.values() for r in b for x in r)

    def rank(self, n: int) -> int:
        return rank(self.block(n), self.space.dim(n))

    def __eq__(self, other):
        if not isinstance(other, GradedMap):
            return NotImplemented
        return self.space == other.space and self.shift == other.shift and self.blocks == other.blocks

    def __repr__(self):
        return f"GradedMap(shift={self.shift}, {self.space!r})"


def compose(f: GradedMap, g: GradedMap) -> GradedMap:
    """``f . g`` (apply ``g`` first)."""
    if f.space != g.space:
        raise ValueError("maps live on different spaces")
    sp = f.space
    blocks = {}
    for n in sp.degrees():
        mid = n + g.shift
        blocks[n] = matmul(f.block(mid), g.block(n), inner=sp.dim(mid), cols=sp.dim(n))
    return GradedMap(sp, f.shift + g.shift, blocks)


def first_difference(f: GradedMap, g: GradedMap) -> Optional[Tuple[str, Element]]:
    """First source basis label where ``f`` and ``g`` disagree, with ``(f - g)`` of it."""
    f._check_compatible(g)
    sp = f.space
    for n in sp.degrees():
        bf, bg = f.blocks[n], g.blocks[n]
        for j in range(sp.dim(n)):
            if any(bf[r][j] != bg[r][j] for r in range(len(bf))):
                i = sp.offset[n] + j
                e = sp.basis_element(sp.labels[i])
                return sp.labels[i], f(e) - g(e)
    return None


class GradedBilinearForm:
    """Per-degree symmetric positive-definite Gram matrices."""

    def __init__(self, space: GradedVectorSpace, gram: Optional[Dict[int, Matrix]] = None, check: bool = True):
        self.space = space
        gram = gram or {}
        self.gram: Dict[int, Matrix] = {}
        for n in space.degrees():
            d = space.dim(n)
            g = gram.get(n)
            g = identity(d) if g is None else [[as_fraction(x) for x in r] for r in g]
            if len(g) != d or any(len(r) != d for r in g):
                raise ValueError(f"Gram matrix in degree {n} must be {d}x{d}")
            self.gram[n] = g
        if check:
            bad = self.failing_degree()
            if bad is not None:
                raise ValueError(f"Gram matrix in degree {bad} is not symmetric positive definite")

    @classmethod
    def standard(cls, space: GradedVectorSpace) -> "GradedBilinearForm":
        return cls(space, check=False)

    def failing_degree(self) -> Optional[int]:
        for n, g in self.gram.items():
            if not (is_symmetric(g) and is_positive_definite(g)):
                return n
        return None

    def is_standard(self) -> bool:
        return all(g == identity(len(g)) for g in self.gram.values())

    def inner(self, a: Element, b: Element) -> Fraction:
        sp = self.space
        total = ZERO
        for n in sp.degrees():
            va, vb = a.block(n), b.block(n)
            if any(va) and any(vb):
                total += sum((x * y for x, y in zip(va, matvec(self.gram[n], vb))), ZERO)
        return total


# ---------------------------------------------------------------------------
# operations on graded maps


def kernel_basis(m: GradedMap, n: int) -> List[Element]:
    sp = m.space
    if not 0 <= n <= sp.top:
        return []
    return [sp.from_block(n, v) for v in nullspace(m.block(n), sp.dim(n))]


def image_basis(m: GradedMap, n: int) -> List[Element]:
    sp = m.space
    if not 0 <= n <= sp.top:
        return []
    tgt = n + m.shift
    return [sp.from_block(tgt, v) for v in column_space(m.block(n), sp.dim(tgt), sp.dim(n))]


def _homogeneous_degree(vectors: Sequence[Element]) -> int:
    degs = {v.homogeneous_degree for v in vectors}
    if len(degs) != 1 or None in degs:
        raise ValueError("vectors must be nonzero and share one homogeneous degree")
    return degs.pop()


def solve_in_subspace(a: GradedMap, rhs: Element, allowed: Sequence[Element]) -> Element:
    """The unique ``x`` in ``span(allowed)`` with ``a(x) = rhs``."""
    if a.shift != 0:
        raise ValueError("solve_in_subspace needs a degree-0 map")
    sp = a.space
    if not allowed:
        if rhs:
            raise NoSolution("right-hand side not in the image")
        return sp.zero()
    n = _homogeneous_degree(allowed)
    if any(sp.degree_of[i] != n for i in rhs.coeffs):
        raise NoSolution("right-hand side lives outside the allowed degree")
    cols = [matvec(a.block(n), v.block(n)) for v in allowed]
    mat = transpose(cols, len(cols), sp.dim(n))
    (coeffs,) = solve_many(mat, [rhs.block(n)], len(allowed))
    out = sp.zero()
    for c, v in zip(coeffs, allowed):
        if c:
            out = out + c * v
    return out


def projection_block(vectors: Sequence[Sequence[Fraction]], g: Matrix) -> Matrix:
    """Matrix of the g-orthogonal projection onto the span of ``vectors``.

    P = V (V^T g V)^{-1} V^T g.
    """
    d = len(g)
    k = len(vectors)
    if k == 0:
        return zeros(d, d)
    vt = [list(v) for v in vectors]                # k x d
    vtg = matmul(vt, g, inner=d, cols=d)           # k x d
    gram = matmul(vtg, transpose(vt, k, d), inner=d, cols=k)
    if rank(gram, k) < k:
        raise DependentInput("subspace vectors are linearly dependent")
    coeffs = matmul(inverse(gram), vtg, inner=k, cols=d)   # k x d
    return matmul(transpose(vt, k, d), coeffs, inner=k, cols=d)


def orthogonal_projection(subspace: Sequence[Element], form: GradedBilinearForm) -> GradedMap:
    sp = form.space
    by_degree: Dict[int, List[List[Fraction]]] = {}
    for v in subspace:
        n = v.homogeneous_degree
        if n is None:
            raise ValueError("projection needs nonzero homogeneous vectors")
        by_degree.setdefault(n, []).append(v.block(n))
    return GradedMap(sp, 0, {n: projection_block(by_degree.get(n, []), form.gram[n])
                             for n in sp.degrees()})
