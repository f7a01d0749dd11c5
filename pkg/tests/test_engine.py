import random
from fractions import Fraction
from itertools import islice

import pytest

from _support import SPHERE4_CYCLE, engine_of, hopf, model_of, random_chain, relabel, trivial
from localeuler.bundle import BundleModel, DualComplex, TriangulatedBundle
from localeuler.chains import boundary
from localeuler.engine import (
    EulerCochain,
    EulerEngine,
    coboundary_check,
    dual_tree,
    euler_cochain,
    necklace,
    necklace_formula,
    pair,
    winding_chain,
    winding_patch,
)
from localeuler.errors import FormulaUnsupported, Inconsistent, NotCycle
from localeuler.oracles import forward_arc
from localeuler.simplicial import boundary_of_simplex


def sphere_dual() -> DualComplex:
    return DualComplex((), boundary_of_simplex(2).dual_complex(), {})


def test_winding_patch_of_zero():
    D = sphere_dual()
    K = D.complex
    assert not winding_patch(D, K.chain(1), K.cells(2)[0])


def test_winding_patch_of_a_cell_boundary():
    D = sphere_dual()
    K = D.complex
    A, B = K.cells(2)[0], K.cells(2)[1]
    C = winding_patch(D, boundary(K.basis(A)), B)
    assert C == K.basis(A)


def test_winding_patch_rejects_open_chains():
    D = sphere_dual()
    K = D.complex
    with pytest.raises(Inconsistent):
        winding_patch(D, K.basis(K.cells(1)[0]), K.cells(2)[0])


def test_winding_patch_does_not_depend_on_the_tree():
    D = sphere_dual()
    K = D.complex
    rng = random.Random(0)
    base = K.cells(2)[2]
    sigma = boundary(random_chain(rng, K, 2))
    ridges = list(K.cells(1))
    trees = [dual_tree(K, base), dual_tree(K, base, depth_first=True), dual_tree(K, base, ridges[::-1], True)]
    assert len({tuple(sorted(t.items())) for t in trees}) == 3
    patches = [winding_patch(D, sigma, base, tree=t) for t in trees]
    assert patches[0] == patches[1] == patches[2]
    assert boundary(patches[0]) == sigma and patches[0][base] == 0


def test_winding_chain_on_a_necklace():
    fx = trivial("simplex2", "cycle3")
    m = model_of(fx)
    sigma = (0, 1, 2)
    D = m.dual(sigma)
    K = D.complex
    fund = m.fundamental_class(sigma)
    assert not winding_chain(D, K.chain(0), D.vertices()[0], fund)
    v1 = D.color_class(1)[0]
    v2 = D.color_class(2)[0]
    s = K.basis(v2) - K.basis(v1)
    W = winding_chain(D, s, v1, fund)
    assert boundary(W) == s
    # the two arcs from v1 to v2 are P and P - fund; W is their average
    P = forward_arc(fund, v1, v2)
    assert W == (P + (P - fund)) * Fraction(1, 2)


def test_winding_chain_is_linear():
    fx = hopf()
    m = model_of(fx)
    D = m.dual((0, 1, 3))
    K = D.complex
    fund = m.fundamental_class((0, 1, 3))
    rng = random.Random(2)
    v = sorted(D.colors)[0]
    for _ in range(5):
        a, b = boundary(random_chain(rng, K, 1)), boundary(random_chain(rng, K, 1))
        x, y = Fraction(rng.randint(-3, 3), 2), Fraction(rng.randint(1, 4), 3)
        lhs = winding_chain(D, a * x + b * y, v, fund)
        assert lhs == winding_chain(D, a, v, fund) * x + winding_chain(D, b, v, fund) * y
        assert boundary(lhs) == a * x + b * y


def test_necklace_formula_single_triples():
    assert necklace_formula([0, 1, 2], {0: 0, 1: 1, 2: 2}) == Fraction(-1, 2)
    assert necklace_formula([0, 2, 1], {0: 0, 1: 1, 2: 2}) == Fraction(1, 2)


def test_necklace_formula_alternating_six_beads():
    assert necklace_formula(range(6), {0: 0, 1: 1, 2: 2, 3: 0, 4: 1, 5: 2}) == Fraction(-1, 4)


def test_necklace_has_every_bead():
    fx = trivial("simplex2", "cycle4", (0, 2, 1))
    order, colors = necklace(model_of(fx), (0, 1, 2))
    assert len(order) == len(set(order)) == 12
    assert sorted(colors.values()) == [0] * 4 + [1] * 4 + [2] * 4


def test_reversed_orientation_negates_local_values():
    fx = hopf()
    en = engine_of(fx)
    sigma = (0, 1, 3)
    swapped = (1, 0, 3)
    for vs in islice(en.vertex_tuples(sigma), 0, 27, 4):
        ws = (vs[1], vs[0], vs[2])
        assert en.local_value_formula1(swapped, ws).value == -en.local_value_formula1(sigma, vs).value
        assert en.local_value_formula2(swapped, ws).value == -en.local_value_formula2(sigma, vs).value


def test_flipped_fiber_negates_every_value():
    fx = hopf(1, 4)
    e1 = euler_cochain(model_of(fx), "winding", engine_of(fx))
    e2 = euler_cochain(BundleModel(fx.bundle.with_flipped_orientation()), "winding")
    assert e2.values == {s: -v for s, v in e1.values.items()}


def test_relabeling_leaves_values_unchanged():
    fx = hopf()
    perm = list(range(12))
    random.Random(11).shuffle(perm)
    e1 = euler_cochain(model_of(fx), "harmonic", engine_of(fx))
    e2 = euler_cochain(BundleModel(relabel(fx.bundle, perm)), "harmonic")
    assert e1.values == e2.values


def test_trivial_pairing_vanishes_on_closed_base():
    fx = trivial("boundary3", "cycle4", (1, 3, 2, 0), 2, 7)
    b = fx.bundle
    for formula in ("harmonic", "winding", "necklace"):
        e = euler_cochain(model_of(fx), formula, engine_of(fx))
        assert pair(e, SPHERE4_CYCLE, b.base) == 0


def test_hopf_pairing_is_a_unit_for_every_formula():
    fx = hopf()
    vals = {f: pair(euler_cochain(model_of(fx), f, engine_of(fx)), SPHERE4_CYCLE, fx.bundle.base) for f in ("harmonic", "winding", "necklace")}
    assert set(vals.values()) in ({1}, {-1})


def test_necklace_cochain_matches_closed_form():
    fx = hopf(2, 3)
    m = model_of(fx)
    e = euler_cochain(m, "necklace")
    for s in fx.bundle.top_simplices():
        order, colors = necklace(m, s)
        assert e.values[s] == necklace_formula(order, colors)


def test_necklace_needs_circles():
    fx = trivial("simplex3", "sphere2")
    with pytest.raises(FormulaUnsupported):
        euler_cochain(BundleModel(fx.bundle), "necklace")
    with pytest.raises(FormulaUnsupported):
        euler_cochain(model_of(hopf()), "spectral")


def test_pair_errors_and_zero_cycle():
    fx = hopf()
    b = fx.bundle
    e = euler_cochain(model_of(fx), "necklace")
    assert pair(e, {}, b.base) == 0
    with pytest.raises(NotCycle):
        pair(e, {(0, 1, 2): 1}, b.base)
    with pytest.raises(NotCycle):
        pair(e, {(0, 1, 4): 1}, b.base)


def test_pair_respects_simplex_orientation():
    fx = hopf()
    e = euler_cochain(model_of(fx), "necklace")
    flipped = {(s[1], s[0], s[2]): -c for s, c in SPHERE4_CYCLE.items()}
    assert pair(e, flipped, fx.bundle.base) == pair(e, SPHERE4_CYCLE, fx.bundle.base)
    assert e.value((1, 0, 2)) == -e.value((0, 1, 2))


def test_stored_base_orientation_is_respected():
    fx = hopf()
    b = fx.bundle
    flipped = TriangulatedBundle(b.base, b.total, b.vertex_map, b.n, b.fiber_orientation, {(0, 1, 2): -1})
    e1 = euler_cochain(model_of(fx), "necklace")
    e2 = euler_cochain(BundleModel(flipped), "necklace")
    assert e2.order[(0, 1, 2)] == (1, 0, 2)
    assert dict(e2.items())[(1, 0, 2)] == -e1.values[(0, 1, 2)]
    assert all(e1.value(s) == e2.value(s) for s in e1.values)


def test_cocycle_on_the_solid_simplex():
    fx = trivial("simplex3", "cycle3", (2, 3, 0, 1))
    b = fx.bundle
    for formula in ("winding", "harmonic"):
        e = euler_cochain(model_of(fx), formula, engine_of(fx))
        rep = coboundary_check(e, b.base, 1)
        assert rep.ok and list(rep.values) == [(0, 1, 2, 3)]
    bad = EulerCochain(dict(e.values), dict(e.order), e.formula)
    bad.values[(0, 1, 2)] += Fraction(1, 7)
    assert coboundary_check(bad, b.base, 1).nonzero() == [(0, 1, 2, 3)]


def test_cocycle_check_is_vacuous_on_a_surface():
    fx = hopf()
    e = euler_cochain(model_of(fx), "necklace")
    rep = coboundary_check(e, fx.bundle.base, 1)
    assert rep.ok and not rep.values


def test_parallel_cochain_matches_serial():
    fx = trivial("boundary3", "cycle3", (3, 1, 0, 2))
    serial = euler_cochain(BundleModel(fx.bundle), "winding")
    parallel = euler_cochain(BundleModel(fx.bundle), "winding", jobs=2)
    assert serial.values == parallel.values


def test_cancellation_is_checked_for_each_tuple():
    fx = trivial("simplex2", "cycle4", (2, 0, 1))
    en = EulerEngine(BundleModel(fx.bundle))
    en.simplex_value((0, 1, 2), "winding")
    assert en.cancellation_checks == 4 ** 3


def test_sphere_fibers_both_formulas():
    fx = trivial("simplex3", "sphere2")
    en = engine_of(fx)
    sigma = (0, 1, 2, 3)
    tuples = list(islice(en.vertex_tuples(sigma), 0, 256, 37))
    for vs in tuples:
        v1 = en.local_value_formula1(sigma, vs).value
        v2 = en.local_value_formula2(sigma, vs).value
        swapped = (sigma[1], sigma[0]) + sigma[2:]
        ws = (vs[1], vs[0]) + vs[2:]
        assert en.local_value_formula1(swapped, ws).value == -v1
        assert en.local_value_formula2(swapped, ws).value == -v2
    flipped = EulerEngine(BundleModel(fx.bundle.with_flipped_orientation()))
    for vs in tuples[:3]:
        assert flipped.local_value_formula2(sigma, vs).value == -en.local_value_formula2(sigma, vs).value
    assert en.cancellation_checks >= len(tuples)
