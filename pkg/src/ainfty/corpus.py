"""Desk-scale example algebras and file loading."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, List, Tuple

from .constructions import (
    LieStructure,
    SimplicialComplex,
    chevalley_eilenberg_dga,
    parse_complex,
    parse_lie,
    simplicial_cochain_dga,
)
from .dga import DGA, ParseError, ValidationError, load_json, parse_structure, validate_dga


def _heisenberg_payload() -> dict:
    """Exterior algebra on x, y, z in degree 1 with dz = xy."""
    gens = "xyz"
    monos = {p: ["".join(m) for m in combinations(gens, p)] for p in range(4)}
    monos[0] = ["1"]
    product = []
    for p in range(4):
        for a in monos[p]:
            for q in range(4 - p):
                for b in monos[q]:
                    sa, sb = a.strip("1"), b.strip("1")
                    if set(sa) & set(sb):
                        continue
                    inv = sum(1 for x in sa for y in sb if x > y)
                    res = "".join(sorted(sa + sb)) or "1"
                    product.append({"left": a, "right": b,
                                    "result": [{"basis": res, "coeff": "-1" if inv % 2 else "1"}]})
    return {
        "degrees": {str(p): monos[p] for p in range(4)},
        "differential": [{"from": "z", "to": [{"basis": "xy", "coeff": "1"}]}],
        "product": product,
        "unit": "1",
    }


def torus_complex() -> SimplicialComplex:
    """3x3 grid on the torus, each square split along its diagonal."""
    def v(i, j):
        return str(3 * (i % 3) + (j % 3))
    facets = []
    for i in range(3):
        for j in range(3):
            facets.append([v(i, j), v(i + 1, j), v(i + 1, j + 1)])
            facets.append([v(i, j), v(i, j + 1), v(i + 1, j + 1)])
    return SimplicialComplex.from_facets([str(k) for k in range(9)], facets)


@dataclass
class CorpusEntry:
    name: str
    kind: str            # "structure", "complex" or "lie"
    description: str
    payload: Callable[[], dict]


CORPUS: Dict[str, CorpusEntry] = {e.name: e for e in [
    CorpusEntry("interval", "complex", "two vertices joined by an edge",
                lambda: {"vertices": ["0", "1"], "simplices": [["0", "1"]]}),
    CorpusEntry("circle", "complex", "boundary of a triangle",
                lambda: {"vertices": ["0", "1", "2"], "simplices": [["0", "1"], ["1", "2"], ["0", "2"]]}),
    CorpusEntry("sphere2", "complex", "boundary of a tetrahedron",
                lambda: {"vertices": ["0", "1", "2", "3"],
                         "simplices": [list(f) for f in combinations("0123", 3)]}),
    CorpusEntry("torus", "complex", "9-vertex 3x3 grid triangulation of the torus",
                lambda: torus_complex().to_json()),
    CorpusEntry("heisenberg", "structure", "Heisenberg nilmanifold model: exterior algebra on x,y,z with dz = xy",
                _heisenberg_payload),
    CorpusEntry("abelian3", "lie", "Chevalley-Eilenberg algebra of the abelian 3-dim Lie algebra (d = 0)",
                lambda: {"dim": 3, "brackets": []}),
]}


def dga_from_object(obj, name: str = "", validate: bool = True) -> DGA:
    """Decode any of the three file kinds (structure, complex, Lie) into a DGA."""
    if isinstance(obj, dict) and "degrees" in obj:
        dga = parse_structure(obj, name)
    elif isinstance(obj, dict) and "simplices" in obj:
        dga = simplicial_cochain_dga(parse_complex(obj), name)
    elif isinstance(obj, dict) and "dim" in obj:
        dga = chevalley_eilenberg_dga(parse_lie(obj), name)
    else:
        raise ParseError("unrecognised file: expected 'degrees', 'simplices' or 'dim'")
    if not validate:
        return dga
    report = validate_dga(dga)
    if not report.ok:
        raise ValidationError(report)
    return dga


def load_text(text: str, name: str = "") -> DGA:
    return dga_from_object(load_json(text), name)


def load(path_or_name: str) -> DGA:
    """Load a file, or a corpus entry when no such file exists."""
    if not os.path.exists(path_or_name) and path_or_name in CORPUS:
        return corpus_dga(path_or_name)
    with open(path_or_name, encoding="utf-8") as fh:
        text = fh.read()
    return load_text(text, os.path.splitext(os.path.basename(path_or_name))[0])


def corpus_dga(name: str) -> DGA:
    return dga_from_object(CORPUS[name].payload(), name)


def emit(name: str) -> str:
    return json.dumps(CORPUS[name].payload(), indent=2) + "\n"


def all_corpus() -> List[Tuple[str, DGA]]:
    return [(name, corpus_dga(name)) for name in CORPUS]
