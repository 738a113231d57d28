"""Differential graded algebras given by structure constants."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .linalg import (
    ZERO,
    Element,
    GradedBilinearForm,
    GradedMap,
    GradedVectorSpace,
    SubspaceCoordinates,
    as_fraction,
    compose,
    first_difference,
    format_element,
    image_basis,
    kernel_basis,
)

ProductTable = Dict[Tuple[int, int], Tuple[Tuple[int, Fraction], ...]]


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class ValidationError(ValueError):
    def __init__(self, report: "ValidationReport"):
        failed = report.failures()[0]
        super().__init__(f"{failed.name} failed: {failed.witness}")
        self.report = report


@dataclass
class AxiomResult:
    name: str
    passed: bool
    witness: Optional[str] = None


@dataclass
class ValidationReport:
    results: List[AxiomResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> List[AxiomResult]:
        return [r for r in self.results if not r.passed]

    def __getitem__(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def lines(self) -> List[str]:
        out = []
        for r in self.results:
            status = "pass" if r.passed else "FAIL"
            line = f"{r.name:<22} {status}"
            if r.witness:
                line += f"  witness: {r.witness}"
            out.append(line)
        return out


class DGA:
    """Finite-dimensional DGA: graded space, differential, product, form.

    ``product`` maps a pair of basis indices to the sparse expansion of
    their product; absent pairs multiply to zero.
    """

    def __init__(self, space: GradedVectorSpace, diff: GradedMap, product: ProductTable,
                 unit: Union[str, Element, None] = None, form: Optional[GradedBilinearForm] = None,
                 name: str = ""):
        if diff.shift != 1:
            raise ValueError("differential must raise degree by one")
        if isinstance(unit, str):
            if unit not in space.index:
                raise ValueError(f"unknown unit label {unit!r}")
            unit = space.basis_element(unit)
        self.space = space
        self.diff = diff
        self.product = {k: v for k, v in product.items() if v}
        self.unit = unit
        self.form = form if form is not None else GradedBilinearForm.standard(space)
        self.name = name

    @classmethod
    def from_labels(cls, basis: Dict[int, Sequence[str]], differential: Dict[str, Dict[str, object]],
                    product: Dict[Tuple[str, str], Dict[str, object]],
                    unit: Union[str, Dict[str, object], None] = None,
                    gram: Optional[Dict[int, list]] = None, name: str = "", check_form: bool = True) -> "DGA":
        space = GradedVectorSpace(basis)
        images = {space.index[a]: Element.from_labels(space, img) for a, img in differential.items()}
        diff = GradedMap.from_images(space, 1, images)
        table: ProductTable = {}
        for (a, b), res in product.items():
            e = Element.from_labels(space, res)
            table[(space.index[a], space.index[b])] = tuple(sorted(e.coeffs.items()))
        form = GradedBilinearForm(space, gram, check=check_form)
        if isinstance(unit, dict):
            unit = Element.from_labels(space, unit)
        return cls(space, diff, table, unit, form, name)

    # -- arithmetic -------------------------------------------------------

    def multiply_raw(self, a: Dict[int, Fraction], b: Dict[int, Fraction]) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        table = self.product
        for i, x in a.items():
            for j, y in b.items():
                terms = table.get((i, j))
                if terms:
                    xy = x * y
                    for k, c in terms:
                        out[k] = out.get(k, ZERO) + xy * c
        return {k: v for k, v in out.items() if v}

    def multiply(self, a: Element, b: Element) -> Element:
        return Element(self.space, self.multiply_raw(a.coeffs, b.coeffs))

    def d(self, a: Element) -> Element:
        return self.diff(a)

    def element(self, coeffs: Dict[str, object]) -> Element:
        return Element.from_labels(self.space, coeffs)

    def basis_element(self, label: str) -> Element:
        return self.space.basis_element(label)

    @property
    def unit_label(self) -> Optional[str]:
        """Label of the unit when it is a single basis vector."""
        u = self.unit
        if u is not None and len(u.coeffs) == 1:
            ((i, c),) = u.coeffs.items()
            if c == 1:
                return self.space.labels[i]
        return None

    def is_formal_zero_differential(self) -> bool:
        return self.diff.is_zero()

    def reordered(self, order: Dict[int, Sequence[str]]) -> "DGA":
        """Same algebra with the basis listed in a different order per degree."""
        sp = self.space
        for n in sp.degrees():
            if sorted(order.get(n, ())) != sorted(sp.basis[n]):
                raise ValueError(f"order for degree {n} is not a permutation")
        lab = sp.labels
        diff = {lab[i]: {lab[k]: c for k, c in cols} for i, cols in enumerate(self.diff.columns)}
        prod = {(lab[i], lab[j]): {lab[k]: c for k, c in terms} for (i, j), terms in self.product.items()}
        gram = {}
        for n in sp.degrees():
            pos = [sp.basis[n].index(x) for x in order.get(n, ())]
            g = self.form.gram[n]
            gram[n] = [[g[p][q] for q in pos] for p in pos]
        unit = None if self.unit is None else self.unit.by_label()
        return DGA.from_labels(dict(order), diff, prod, unit, gram, self.name)


def multiply(dga: DGA, a: Element, b: Element) -> Element:
    return dga.multiply(a, b)


# ---------------------------------------------------------------------------
# validation


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


def validate_dga(dga: DGA) -> ValidationReport:
    sp = dga.space
    labels = sp.labels
    report = ValidationReport()

    bad = dga.form.failing_degree()
    report.results.append(AxiomResult(
        "gram-positive-definite", bad is None,
        None if bad is None else f"Gram matrix in degree {bad}"))

    witness = None
    for (i, j), terms in sorted(dga.product.items()):
        want = sp.degree_of[i] + sp.degree_of[j]
        stray = [k for k, _ in terms if sp.degree_of[k] != want]
        if stray:
            witness = f"{labels[i]}*{labels[j]} has component {labels[stray[0]]}"
            break
    report.results.append(AxiomResult("degree-additivity", witness is None, witness))

    dd = compose(dga.diff, dga.diff)
    diff_ = first_difference(dd, GradedMap.zero(sp, 2))
    report.results.append(AxiomResult(
        "d-squared", diff_ is None,
        None if diff_ is None else f"d(d({diff_[0]})) = {format_element(diff_[1])}"))

    basis = [{i: Fraction(1)} for i in range(sp.total_dim)]
    top = sp.top
    deg = sp.degree_of

    witness = None
    for i in range(sp.total_dim):
        for j in range(sp.total_dim):
            if deg[i] + deg[j] > top:
                continue
            ij = dga.multiply_raw(basis[i], basis[j])
            for k in range(sp.total_dim):
                if deg[i] + deg[j] + deg[k] > top:
                    continue
                left = dga.multiply_raw(ij, basis[k])
                right = dga.multiply_raw(basis[i], dga.multiply_raw(basis[j], basis[k]))
                if left != right:
                    res = Element(sp, left) - Element(sp, right)
                    witness = f"({labels[i]},{labels[j]},{labels[k]}): associator = {format_element(res)}"
                    break
            if witness:
                break
        if witness:
            break
    report.results.append(AxiomResult("associativity", witness is None, witness))

    witness = None
    for i in range(sp.total_dim):
        di = dga.diff.apply_raw(basis[i])
        for j in range(sp.total_dim):
            if deg[i] + deg[j] + 1 > top:
                continue
            lhs = dga.diff.apply_raw(dga.multiply_raw(basis[i], basis[j]))
            r1 = Element(sp, dga.multiply_raw(di, basis[j]))
            r2 = Element(sp, dga.multiply_raw(basis[i], dga.diff.apply_raw(basis[j])))
            rhs = r1 + _sign(deg[i]) * r2
            if Element(sp, lhs) != rhs:
                witness = f"({labels[i]},{labels[j]}): residue = {format_element(Element(sp, lhs) - rhs)}"
                break
        if witness:
            break
    report.results.append(AxiomResult("leibniz", witness is None, witness))

    if dga.unit is not None:
        u = dga.unit.coeffs
        witness = None
        if dga.unit.homogeneous_degree != 0:
            witness = "unit not in degree 0"
        elif dga.diff.apply_raw(u):
            witness = "d(unit) != 0"
        else:
            for i in range(sp.total_dim):
                if dga.multiply_raw(u, basis[i]) != basis[i] or \
                        dga.multiply_raw(basis[i], u) != basis[i]:
                    witness = f"unit law fails on {labels[i]}"
                    break
        report.results.append(AxiomResult("unit", witness is None, witness))
    return report


# ---------------------------------------------------------------------------
# file format


def _error_from_decode(exc: json.JSONDecodeError) -> ParseError:
    return ParseError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno)


def load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _error_from_decode(exc) from None


def _coeff(value, where: str) -> Fraction:
    if not isinstance(value, (str, int)) or isinstance(value, bool):
        raise ParseError(f"{where}: coefficient must be a string 'p/q' or integer")
    try:
        return as_fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: bad coefficient {value!r}") from None


def _terms(raw, known: Dict[str, int], where: str) -> Dict[str, Fraction]:
    if not isinstance(raw, list):
        raise ParseError(f"{where}: expected a list of {{basis, coeff}} terms")
    out: Dict[str, Fraction] = {}
    for t, term in enumerate(raw):
        if not isinstance(term, dict) or "basis" not in term or "coeff" not in term:
            raise ParseError(f"{where}[{t}]: expected {{basis, coeff}}")
        b = term["basis"]
        if b not in known:
            raise ParseError(f"{where}[{t}]: unknown basis label {b!r}")
        out[b] = out.get(b, ZERO) + _coeff(term["coeff"], f"{where}[{t}]")
    return out


def parse_structure(obj, name: str = "") -> DGA:
    """Build (without validating) a DGA from the decoded JSON structure file."""
    if not isinstance(obj, dict) or "degrees" not in obj:
        raise ParseError("structure file needs a top-level object with 'degrees'")
    raw_deg = obj["degrees"]
    if not isinstance(raw_deg, dict):
        raise ParseError("'degrees' must map degree -> label list")
    basis: Dict[int, List[str]] = {}
    seen: Dict[str, int] = {}
    for key, labels in raw_deg.items():
        try:
            n = int(key)
        except ValueError:
            raise ParseError(f"degree key {key!r} is not an integer") from None
        if n < 0:
            raise ParseError(f"negative degree {n}")
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise ParseError(f"degree {n}: labels must be a list of strings")
        for lab in labels:
            if lab in seen:
                raise ParseError(f"duplicate basis label {lab!r}")
            seen[lab] = n
        basis[n] = labels
    if not seen:
        raise ParseError("empty basis")

    differential: Dict[str, Dict[str, Fraction]] = {}
    for e, entry in enumerate(obj.get("differential", [])):
        where = f"differential[{e}]"
        if not isinstance(entry, dict) or "from" not in entry or "to" not in entry:
            raise ParseError(f"{where}: expected {{from, to}}")
        src = entry["from"]
        if src not in seen:
            raise ParseError(f"{where}: unknown basis label {src!r}")
        img = _terms(entry["to"], seen, f"{where}.to")
        for lab in img:
            if seen[lab] != seen[src] + 1:
                raise ParseError(f"{where}: d({src}) has component {lab} of wrong degree")
        acc = differential.setdefault(src, {})
        for lab, c in img.items():
            acc[lab] = acc.get(lab, ZERO) + c

    product: Dict[Tuple[str, str], Dict[str, Fraction]] = {}
    for e, entry in enumerate(obj.get("product", [])):
        where = f"product[{e}]"
        if not isinstance(entry, dict) or not {"left", "right", "result"} <= set(entry):
            raise ParseError(f"{where}: expected {{left, right, result}}")
        a, b = entry["left"], entry["right"]
        for lab in (a, b):
            if lab not in seen:
                raise ParseError(f"{where}: unknown basis label {lab!r}")
        if (a, b) in product:
            raise ParseError(f"{where}: product {a}*{b} given twice")
        product[(a, b)] = _terms(entry["result"], seen, f"{where}.result")

    unit = obj.get("unit")
    if isinstance(unit, list):
        unit = _terms(unit, seen, "unit")
    elif unit is not None and unit not in seen:
        raise ParseError(f"unknown unit label {unit!r}")

    gram = None
    if "gram" in obj:
        gram = {}
        if not isinstance(obj["gram"], dict):
            raise ParseError("'gram' must map degree -> matrix")
        for key, mat in obj["gram"].items():
            try:
                n = int(key)
            except ValueError:
                raise ParseError(f"gram degree key {key!r} is not an integer") from None
            size = len(basis.get(n, []))
            if not isinstance(mat, list) or len(mat) != size or \
                    any(not isinstance(r, list) or len(r) != size for r in mat):
                raise ParseError(f"gram[{n}] must be a {size}x{size} matrix")
            gram[n] = [[_coeff(x, f"gram[{n}]") for x in r] for r in mat]

    return DGA.from_labels(basis, differential, product, unit, gram, name, check_form=False)


def from_structure_file(text: str, name: str = "") -> DGA:
    dga = parse_structure(load_json(text), name)
    report = validate_dga(dga)
    if not report.ok:
        raise ValidationError(report)
    return dga


def _terms_json(e: Element) -> List[dict]:
    return [{"basis": lab, "coeff": str(c)} for lab, c in e.by_label().items()]


def to_structure(dga: DGA) -> dict:
    sp = dga.space
    lab = sp.labels
    out: dict = {"degrees": {str(n): list(sp.basis[n]) for n in sp.degrees()}}
    out["differential"] = [
        {"from": lab[i], "to": [{"basis": lab[k], "coeff": str(c)} for k, c in cols]}
        for i, cols in enumerate(dga.diff.columns) if cols]
    out["product"] = [
        {"left": lab[i], "right": lab[j], "result": [{"basis": lab[k], "coeff": str(c)} for k, c in terms]}
        for (i, j), terms in sorted(dga.product.items())]
    if dga.unit is not None:
        out["unit"] = dga.unit_label or _terms_json(dga.unit)
    if not dga.form.is_standard():
        out["gram"] = {str(n): [[str(x) for x in r] for r in g] for n, g in dga.form.gram.items()}
    return out


def to_structure_file(dga: DGA) -> str:
    return json.dumps(to_structure(dga), indent=2) + "\n"


# ---------------------------------------------------------------------------
# cohomology by quotients (no Hodge theory)


class CohomologyRing:
    """H(A, d) as Ker d / Img d with canonical representatives.

    Per degree the representatives extend the echelon basis of Img d to a
    basis of Ker d, scanning the echelon kernel basis in order.
    """

    def __init__(self, dga: DGA):
        self.dga = dga
        sp = dga.space
        self.representatives: Dict[int, List[Element]] = {}
        self._coords: Dict[int, SubspaceCoordinates] = {}
        self._n_exact: Dict[int, int] = {}
        for n in sp.degrees():
            exact = image_basis(dga.diff, n - 1) if n > 0 else []
            closed = kernel_basis(dga.diff, n)
            chosen = [v.block(n) for v in exact]
            reps: List[Element] = []
            for z in closed:
                trial = chosen + [z.block(n)]
                try:
                    SubspaceCoordinates(trial, sp.dim(n))
                except ValueError:
                    continue
                chosen = trial
                reps.append(z)
            self.representatives[n] = reps
            self._n_exact[n] = len(exact)
            self._coords[n] = SubspaceCoordinates(chosen, sp.dim(n))
        self.products: Dict[Tuple[int, int, int, int], List[Fraction]] = {}
        for p in sp.degrees():
            for q in sp.degrees():
                if p + q > sp.top:
                    continue
                for i, a in enumerate(self.representatives[p]):
                    for j, b in enumerate(self.representatives[q]):
                        c = self.class_of(dga.multiply(a, b), p + q)
                        if any(c):
                            self.products[(p, i, q, j)] = c

    @property
    def betti(self) -> Tuple[int, ...]:
        return tuple(len(self.representatives[n]) for n in self.dga.space.degrees())

    def class_of(self, z: Element, n: int) -> List[Fraction]:
        """Coordinates of the class of a closed degree-``n`` element."""
        if any(self.dga.space.degree_of[i] != n for i in z.coeffs):
            raise ValueError(f"element is not homogeneous of degree {n}")
        coords = self._coords[n].coordinates(z.block(n))
        if coords is None:
            raise ValueError("element is not closed")
        return coords[self._n_exact[n]:]

    def multiply_classes(self, p: int, x: Sequence[Fraction], q: int, y: Sequence[Fraction]) -> List[Fraction]:
        out = [ZERO] * len(self.representatives.get(p + q, []))
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b:
                    continue
                for k, c in enumerate(self.products.get((p, i, q, j), ())):
                    out[k] += a * b * c
        return out


def cohomology_ring(dga: DGA) -> CohomologyRing:
    return CohomologyRing(dga)
