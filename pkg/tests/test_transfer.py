import json
from functools import lru_cache
from fractions import Fraction as F
from itertools import combinations, product

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from ainfty.constructions import LieStructure, chevalley_eilenberg_dga, simplicial_cochain_dga
from ainfty.dga import cohomology_ring
from ainfty.hodge import NotHarmonic, build_hodge
from ainfty.linalg import GradedMap, SubspaceCoordinates, compose
from ainfty.transfer import (
    AInfinityStructure,
    ArityError,
    LambdaCache,
    NotDefined,
    _compute_entries,
    check_lemma_associativity,
    check_ring_isomorphism,
    check_unit_degeneracy,
    compare_m3_massey,
    harmonic_product,
    harmonic_tuples,
    lambda_eval,
    massey_triple,
    stasheff_check,
    transfer_structure,
)

from conftest import cached_dga, cached_hodge
from test_dga import complexes
from test_hodge import with_gram, gram_for


def sign(e):
    return -1 if e % 2 else 1


def naive_lambda(dga, hodge, vs, uniform=False):
    """Plain recursion on Elements: no cache, no index registration, no pruning."""
    n = len(vs)
    if n == 2:
        return dga.multiply(vs[0], vs[1])
    Q, mul = hodge.homotopy, dga.multiply
    deg = [v.homogeneous_degree for v in vs]

    def ql(sub):
        return -sub[0] if len(sub) == 1 else Q(naive_lambda(dga, hodge, sub, uniform))

    out = dga.space.zero()
    lo = 1 if uniform else 2
    for k in range(lo, n - lo + 1):
        l = n - k
        out = out - sign(k + (l - 1) * sum(deg[:k])) * mul(ql(vs[:k]), ql(vs[k:]))
    if not uniform:
        out = out + sign(n - 1) * mul(ql(vs[:-1]), vs[-1])
        out = out - sign(n * deg[0]) * mul(vs[0], ql(vs[1:]))
    return out


@pytest.fixture(scope="module")
def heis_structure():
    return transfer_structure(cached_dga("heisenberg"), cached_hodge("heisenberg"), 5)


# -- worked examples -------------------------------------------------------------


def test_lambda_two_is_product(heisenberg, heisenberg_hodge):
    x, y = heisenberg.basis_element("x"), heisenberg.basis_element("y")
    assert lambda_eval(heisenberg, heisenberg_hodge, x, y) == heisenberg.basis_element("xy")


def test_lambda_three_on_x_x_y(heisenberg, heisenberg_hodge):
    x, y = heisenberg.basis_element("x"), heisenberg.basis_element("y")
    xz = heisenberg.basis_element("xz")
    assert lambda_eval(heisenberg, heisenberg_hodge, x, x, y) == xz
    # the hand evaluation: only the second boundary term survives
    Q = heisenberg_hodge.homotopy
    assert not Q(heisenberg.multiply(x, x))
    assert -sign(3 * 1) * heisenberg.multiply(x, Q(heisenberg.multiply(x, y))) == xz


def test_lambda_with_zero_argument(heisenberg, heisenberg_hodge):
    x = heisenberg.basis_element("x")
    zero = heisenberg.space.zero()
    assert not lambda_eval(heisenberg, heisenberg_hodge, x, zero, x)
    assert not lambda_eval(heisenberg, heisenberg_hodge, zero, x, x, x)


def test_arity_errors(heisenberg, heisenberg_hodge, heis_structure):
    x = heisenberg.basis_element("x")
    with pytest.raises(ArityError):
        lambda_eval(heisenberg, heisenberg_hodge, x)
    with pytest.raises(ArityError):
        transfer_structure(heisenberg, heisenberg_hodge, 1)
    with pytest.raises(ArityError):
        stasheff_check(heis_structure, 6)
    with pytest.raises(ArityError):
        heis_structure.entry(6, (0,) * 6)


def test_heisenberg_m3_and_m2(heisenberg, heisenberg_hodge, heis_structure):
    s = heis_structure
    x, y, xz = (heisenberg.basis_element(l) for l in ("x", "y", "xz"))
    assert s.apply(3, x, x, y) == xz
    assert s.apply(3, x, y, x) == -2 * xz
    assert not s.apply(2, x, y)
    assert s.apply(2, x, heisenberg.basis_element("yz")) == heisenberg.basis_element("xyz")
    assert "m3(x,x,y) = xz" in s.lines()


def test_heisenberg_has_no_m4_or_m5(heis_structure):
    assert not heis_structure.tables[4]
    assert not heis_structure.tables[5]


def test_m1_is_zero(heis_structure):
    assert heis_structure.entry(1, (1,)) == {}


def test_zero_differential_collapses():
    dga, h = cached_dga("abelian3"), cached_hodge("abelian3")
    s = transfer_structure(dga, h, 6)
    for k in range(3, 7):
        assert not s.tables[k]
    basis = s.basis
    for i, j in product(range(len(basis)), repeat=2):
        assert s.apply(2, basis.vectors[i], basis.vectors[j]) == dga.multiply(basis.vectors[i], basis.vectors[j])


def test_sphere_has_no_higher_products():
    s = transfer_structure(cached_dga("sphere2"), cached_hodge("sphere2"), 6)
    assert all(not s.tables[k] for k in range(3, 7))


# -- structural properties ------------------------------------------------------


def test_degree_bookkeeping(corpus_name):
    arity = 4 if corpus_name == "torus" else 5
    s = transfer_structure(cached_dga(corpus_name), cached_hodge(corpus_name), arity)
    degs = s.basis.degrees
    for k, table in s.tables.items():
        for tup, val in table.items():
            for h in val:
                assert degs[h] == sum(degs[i] for i in tup) + 2 - k


def test_m2_is_harmonic_product(corpus_name):
    h = cached_hodge(corpus_name)
    s = transfer_structure(cached_dga(corpus_name), h, 2)
    vecs = s.basis.vectors
    for a, b in product(vecs, repeat=2):
        if a.homogeneous_degree + b.homogeneous_degree <= s.top:
            assert s.apply(2, a, b) == harmonic_product(h, a, b)


def test_projection_equals_one_minus_bracket(heisenberg, heisenberg_hodge):
    h = heisenberg_hodge
    one = GradedMap.identity(heisenberg.space)
    fold = one - compose(heisenberg.diff, h.homotopy) - compose(h.homotopy, heisenberg.diff)
    vecs = h.basis.vectors
    for k in (3, 4):
        for tup in harmonic_tuples(h.basis, k, 3, 2 - k):
            lam = lambda_eval(heisenberg, h, *(vecs[i] for i in tup))
            assert fold(lam) == h.projector(lam)


def test_all_values_are_harmonic(heis_structure, heisenberg_hodge):
    for k in range(2, 6):
        for tup, val in heis_structure.tables[k].items():
            v = heis_structure.basis.combine(val)
            assert heisenberg_hodge.is_harmonic(v)


def test_cache_transparency(heisenberg, heisenberg_hodge):
    vecs = heisenberg_hodge.basis.vectors
    shared = LambdaCache(heisenberg, heisenberg_hodge)
    tuples = list(harmonic_tuples(heisenberg_hodge.basis, 4, 3, -2))
    first = [lambda_eval(heisenberg, heisenberg_hodge, *(vecs[i] for i in t), cache=shared) for t in tuples]
    again = [lambda_eval(heisenberg, heisenberg_hodge, *(vecs[i] for i in t), cache=shared) for t in tuples]
    fresh = [lambda_eval(heisenberg, heisenberg_hodge, *(vecs[i] for i in t)) for t in tuples]
    assert first == again == fresh
    assert first == [naive_lambda(heisenberg, heisenberg_hodge, [vecs[i] for i in t]) for t in tuples]


def test_parallel_matches_serial(heisenberg, heisenberg_hodge, heis_structure):
    par = transfer_structure(heisenberg, heisenberg_hodge, 5, workers=2)
    assert json.dumps(par.to_json()) == json.dumps(heis_structure.to_json())


def test_unknown_variant_rejected(heisenberg, heisenberg_hodge):
    with pytest.raises(ValueError):
        LambdaCache(heisenberg, heisenberg_hodge, "other")


@st.composite
def homogeneous_inputs(draw, dga):
    sp = dga.space
    n = draw(st.integers(2, 4))
    out = []
    for _ in range(n):
        deg = draw(st.integers(0, sp.top))
        coeffs = draw(st.lists(st.fractions(-3, 3, max_denominator=3), min_size=sp.dim(deg), max_size=sp.dim(deg)))
        e = sp.from_block(deg, coeffs)
        assume(e)
        out.append(e)
    return out


@given(st.data())
@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
def test_recursion_matches_naive_oracle_and_variants_agree(data):
    dga, h = cached_dga("heisenberg"), cached_hodge("heisenberg")
    vs = data.draw(homogeneous_inputs(dga))
    got = lambda_eval(dga, h, *vs)
    assert got == naive_lambda(dga, h, vs)
    assert got == naive_lambda(dga, h, vs, uniform=True)
    assert got == lambda_eval(dga, h, *vs, variant="uniform")


@lru_cache(maxsize=None)
def torus_m3():
    return transfer_structure(cached_dga("torus"), cached_hodge("torus"), 3)


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_multilinearity(data):
    dga, h = cached_dga("torus"), cached_hodge("torus")
    s = torus_m3()
    basis = s.basis
    k = data.draw(st.integers(2, 3))
    coeff = st.fractions(-2, 2, max_denominator=3)
    inputs, expanded = [], []
    for _ in range(k):
        deg = data.draw(st.sampled_from(sorted(set(basis.degrees))))
        idx = basis.in_degree(deg)
        cs = data.draw(st.lists(coeff, min_size=len(idx), max_size=len(idx)))
        inputs.append(sum((c * basis.vectors[i] for c, i in zip(cs, idx)), dga.space.zero()))
        expanded.append([(c, i) for c, i in zip(cs, idx) if c])
    want = dga.space.zero()
    for combo in product(*expanded):
        scale = F(1)
        for c, _ in combo:
            scale *= c
        want = want + scale * s.apply(k, *(basis.vectors[i] for _, i in combo))
    if all(inputs):
        assert s.apply(k, *inputs) == want
        total = sum(v.homogeneous_degree for v in inputs)
        if 0 <= total + 2 - k <= dga.space.top:
            assert s.apply(k, *inputs) == h.projector(lambda_eval(dga, h, *inputs))


# -- harmonic product and lemmas ------------------------------------------------


def test_harmonic_product_examples(heisenberg, heisenberg_hodge):
    h = heisenberg_hodge
    x, y, yz, one = (heisenberg.basis_element(l) for l in ("x", "y", "yz", "1"))
    assert not harmonic_product(h, x, y)
    assert harmonic_product(h, x, yz) == heisenberg.basis_element("xyz")
    assert harmonic_product(h, one, x) == x


def test_harmonic_product_rejects_non_harmonic(heisenberg, heisenberg_hodge):
    with pytest.raises(NotHarmonic):
        harmonic_product(heisenberg_hodge, heisenberg.basis_element("z"), heisenberg.basis_element("x"))


def test_harmonic_product_is_associative(corpus_name):
    report = check_lemma_associativity(cached_hodge(corpus_name))
    assert report.passed, report.witnesses


def test_heisenberg_triple_count():
    report = check_lemma_associativity(cached_hodge("heisenberg"))
    # degree-compatible triples over the six harmonic basis vectors
    assert report.details["triples"] == sum(
        1 for t in product([0, 1, 1, 2, 2, 3], repeat=3) if sum(t) <= 3)


def test_ring_isomorphism(corpus_name):
    h = cached_hodge(corpus_name)
    report = check_ring_isomorphism(h, cohomology_ring(cached_dga(corpus_name)))
    assert report.passed, report.witnesses


def test_torus_pairing_rank_two():
    report = check_ring_isomorphism(cached_hodge("torus"), cohomology_ring(cached_dga("torus")))
    assert report.details["pairing_ranks"]["1,1"] == [2, 2]


# -- Stasheff ----------------------------------------------------------------------


def test_stasheff_heisenberg(heis_structure):
    for n in range(1, 6):
        report = stasheff_check(heis_structure, n)
        assert report.passed, report.witnesses


class FlippedBoundary(LambdaCache):
    """The printed recursion with the sign of its first boundary term reversed."""

    def _printed(self, idx, degs):
        n = len(idx)
        left = self.q_lambda_raw(idx[:-1])
        val = dict(super()._printed(idx, degs))
        if left:
            for k, c in self.dga.multiply_raw(left, self.vectors[idx[-1]]).items():
                val[k] = val.get(k, 0) - 2 * sign(n - 1) * c
        return {k: c for k, c in val.items() if c}


def test_stasheff_detects_a_sign_error(heisenberg, heisenberg_hodge):
    s = structure_from(FlippedBoundary(heisenberg, heisenberg_hodge), 4)
    assert not stasheff_check(s, 4).passed


class FlippedSum(LambdaCache):
    """The printed recursion with the sign of every Q lambda_k * Q lambda_l term reversed."""

    def _printed(self, idx, degs):
        n = len(idx)
        val = dict(super()._printed(idx, degs))
        for k in range(2, n - 1):
            a, b = self.q_lambda_raw(idx[:k]), self.q_lambda_raw(idx[k:])
            if a and b:
                for t, c in self.dga.multiply_raw(a, b).items():
                    val[t] = val.get(t, 0) + 2 * sign(k + (n - k - 1) * sum(degs[:k])) * c
        return {t: c for t, c in val.items() if c}


def structure_from(cache, arity):
    basis, top = cache.hodge.basis, cache.top
    for v in basis.vectors:
        cache.register(v)
    tables = {k: dict(_compute_entries(cache, k, list(harmonic_tuples(basis, k, top, 2 - k))))
              for k in range(2, arity + 1)}
    return AInfinityStructure(arity, basis, tables, "printed", top)


def test_filiform_algebra_pins_the_sum_sign():
    # [e1,e2] = e3, [e1,e3] = e4: the first case where Q lambda * Q lambda terms matter
    g = LieStructure(4, {(1, 2): {3: F(1)}, (1, 3): {4: F(1)}})
    dga = chevalley_eilenberg_dga(g)
    h = build_hodge(dga)
    good = structure_from(LambdaCache(dga, h), 5)
    assert all(stasheff_check(good, n).passed for n in range(1, 6))
    bad = structure_from(FlippedSum(dga, h), 5)
    assert all(stasheff_check(bad, n).passed for n in range(1, 5))
    assert not stasheff_check(bad, 5).passed


@st.composite
def complex_with_metric(draw):
    dga = simplicial_cochain_dga(draw(complexes()))
    dims = {n: dga.space.dim(n) for n in dga.space.degrees()}
    return with_gram(dga, draw(gram_for(dims)))


@given(complex_with_metric())
@settings(max_examples=20, deadline=None)
def test_stasheff_on_random_complexes_with_random_metrics(dga):
    s = transfer_structure(dga, build_hodge(dga), 4)
    for n in range(1, 5):
        assert stasheff_check(s, n).passed


@given(gram_for({0: 1, 1: 3, 2: 3, 3: 1}))
@settings(max_examples=10, deadline=None)
def test_heisenberg_with_random_metric(gram):
    dga = with_gram(cached_dga("heisenberg"), gram)
    h = build_hodge(dga)
    s = transfer_structure(dga, h, 4)
    assert s.tables[3]
    for n in range(1, 5):
        assert stasheff_check(s, n).passed
    assert compare_m3_massey(s, dga, h).passed


@st.composite
def nilpotent_lie(draw):
    n = draw(st.integers(3, 4))
    brackets = {}
    for i, j in combinations(range(1, n + 1), 2):
        row = {k: F(c) for k in range(j + 1, n + 1) if (c := draw(st.integers(-1, 1)))}
        if row:
            brackets[(i, j)] = row
    g = LieStructure(n, brackets)
    assume(g.jacobi_witness() is None)
    return g


@given(nilpotent_lie())
@settings(max_examples=15, deadline=None)
def test_stasheff_on_random_nilpotent_lie_algebras(g):
    dga = chevalley_eilenberg_dga(g)
    s = transfer_structure(dga, build_hodge(dga), 4)
    for n in range(1, 5):
        assert stasheff_check(s, n).passed


def test_unit_degeneracy(corpus_name):
    s = transfer_structure(cached_dga(corpus_name), cached_hodge(corpus_name), 4)
    report = check_unit_degeneracy(s, cached_hodge(corpus_name))
    assert report.status == "pass"


# -- Massey ----------------------------------------------------------------------------


def test_massey_x_x_y(heisenberg, heisenberg_hodge):
    x, y = heisenberg.basis_element("x"), heisenberg.basis_element("y")
    mp = massey_triple(heisenberg, heisenberg_hodge, x, x, y)
    assert not mp.u
    assert mp.w == heisenberg.basis_element("z")
    assert mp.representative == heisenberg.basis_element("xz")
    assert mp.indeterminacy == []


def test_massey_with_zero_entry(heisenberg, heisenberg_hodge):
    x = heisenberg.basis_element("x")
    mp = massey_triple(heisenberg, heisenberg_hodge, x, heisenberg.space.zero(), x)
    assert not mp.representative


def test_massey_undefined(heisenberg, heisenberg_hodge):
    x, xz, y = (heisenberg.basis_element(l) for l in ("x", "xz", "y"))
    with pytest.raises(NotDefined, match="b o c"):
        massey_triple(heisenberg, heisenberg_hodge, x, xz, y)


def test_massey_cochain_is_closed(corpus_name):
    dga, h = cached_dga(corpus_name), cached_hodge(corpus_name)
    vecs = h.basis.vectors
    for tup in harmonic_tuples(h.basis, 3, dga.space.top, -1):
        a, b, c = (vecs[i] for i in tup)
        try:
            mp = massey_triple(dga, h, a, b, c, primitive="echelon")
        except NotDefined:
            continue
        assert dga.d(mp.u) == dga.multiply(a, b)
        assert dga.d(mp.w) == dga.multiply(b, c)
        cochain = dga.multiply(mp.u, c) - sign(a.homogeneous_degree) * dga.multiply(a, mp.w)
        assert not dga.d(cochain)


def test_massey_independent_of_primitive_modulo_indeterminacy(heisenberg, heisenberg_hodge):
    vecs = heisenberg_hodge.basis.vectors
    for tup in harmonic_tuples(heisenberg_hodge.basis, 3, 3, -1):
        a, b, c = (vecs[i] for i in tup)
        try:
            m1 = massey_triple(heisenberg, heisenberg_hodge, a, b, c, "homotopy")
        except NotDefined:
            continue
        m2 = massey_triple(heisenberg, heisenberg_hodge, a, b, c, "echelon")
        diff = m1.representative - m2.representative
        if diff:
            n = heisenberg.space.total_dim
            rows = [[v.coeffs.get(i, 0) for i in range(n)] for v in m1.indeterminacy]
            assert rows and SubspaceCoordinates(rows, n).contains([diff.coeffs.get(i, 0) for i in range(n)]), tup


@pytest.mark.parametrize("name", ["heisenberg", "abelian3", "sphere2", "circle", "torus"])
def test_compare_m3_massey(name):
    s = transfer_structure(cached_dga(name), cached_hodge(name), 3)
    report = compare_m3_massey(s, cached_dga(name), cached_hodge(name))
    assert report.passed, report.witnesses
    if name == "heisenberg":
        assert report.details["nonzero_m3"] > 0


def test_compare_requires_m3(heisenberg, heisenberg_hodge):
    s = transfer_structure(heisenberg, heisenberg_hodge, 2)
    with pytest.raises(ArityError):
        compare_m3_massey(s, heisenberg, heisenberg_hodge)
