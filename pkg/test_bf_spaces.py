"""
Tests for solid space norms, translation norms, amalgams and discrete coefficient norms
"""

import math

import numpy as np
import pytest

from phasecover.core.atomic import random_functions
from phasecover.core.group import (
    GFunc,
    GroupCarrier,
    Neighborhood,
    RelSepSet,
    Weight,
    WeightFamily,
    Window,
    involute,
    spreadness,
)
from phasecover.core.spaces import (
    AmalgamKind,
    DiscreteCoeffs,
    SolidSpaceSpec,
    VectorCoeffs,
    amalgam_norm,
    amalgam_ratios,
    discrete_weighted_norm,
    ed_norm,
    edb_norm,
    local_max,
    local_norm_control,
    lp_norm,
    product_embedding_constant,
    sample_on_nodes,
    sampling_constant,
    solidity_excess,
    space_family,
    space_norm,
    translation_norm,
)
from phasecover.utils.exceptions import SpaceSpecError

SEED = 0x5EED


def test_lp_norm_edge_values():
    """Sup norm for p = inf and zero for empty input"""
    assert lp_norm(np.array([3.0, -4.0]), 2.0) == pytest.approx(5.0)
    assert lp_norm(np.array([1.0, -7.0]), math.inf) == pytest.approx(7.0)
    assert lp_norm(np.array([]), 2.0) == 0.0


def test_space_norm_examples(z):
    """||chi_{0..3}||_2 = 2 and ||2 delta_0 + delta_1||_inf = 2"""
    assert space_norm(GFunc.indicator(z, range(4)), SolidSpaceSpec(z, 2.0)) == pytest.approx(2.0)
    f = GFunc.from_dict(z, {0: 2.0, 1: 1.0})
    assert space_norm(f, SolidSpaceSpec(z, math.inf)) == pytest.approx(2.0)
    assert space_norm(GFunc.zero(z), SolidSpaceSpec(z, 1.0)) == 0.0


def test_weighted_space_norm(z):
    """The weight multiplies pointwise before the sum"""
    E = SolidSpaceSpec(z, 1.0, v=Weight.polynomial(1))
    f = GFunc.from_dict(z, {0: 1.0, -2: 1.0})
    assert space_norm(f, E) == pytest.approx(1.0 + 3.0)


def test_mixed_norm_splits_axes():
    """l^{1,inf}: inner l^1 over the first axis, outer sup over the second"""
    z2 = GroupCarrier.lattice(2)
    f = GFunc.from_dict(z2, {(0, 0): 1.0, (1, 0): 2.0, (0, 1): 5.0})
    E = SolidSpaceSpec(z2, 1.0, math.inf)
    assert E.name == "l1,inf"
    assert space_norm(f, E) == pytest.approx(5.0)
    assert space_norm(f, SolidSpaceSpec(z2, math.inf, 1.0)) == pytest.approx(2.0 + 5.0)


def test_invalid_exponents(z):
    """Exponents below one and mixed norms on odd dimensions are rejected"""
    with pytest.raises(SpaceSpecError):
        SolidSpaceSpec(z, 0.5)
    with pytest.raises(SpaceSpecError):
        SolidSpaceSpec(z, 2.0, 2.0)


def test_translation_norm_example(z):
    """v = 1+|x| gives ||L_1|| = 2 over a window containing 0"""
    E = SolidSpaceSpec(z, 2.0, v=Weight.polynomial(1))
    assert translation_norm(E, 1, window=Window.box(z, 10)) == pytest.approx(2.0)
    assert translation_norm(SolidSpaceSpec(z, 2.0), 7) == pytest.approx(1.0)


def test_local_max_of_delta(z):
    """delta_0^# = chi_{-1,0,1} for V = {-1,0,1}"""
    V = Neighborhood.box(z, 1)
    assert local_max(GFunc.delta(z), V).allclose(GFunc.indicator(z, [-1, 0, 1]))


def test_local_max_dominates(z):
    """|f| <= f^# pointwise"""
    rng = np.random.default_rng(1)
    window = Window.box(z, 6)
    f = GFunc.from_window(window, rng.normal(size=window.size))
    sharp = local_max(f, Neighborhood.box(z, 2))
    assert np.all(sharp.on(window).real >= np.abs(f.on(window)) - 1e-15)


def test_amalgam_norms_of_delta(z):
    """Left and right amalgam norms of delta_0 in l^1 equal |V| = 3"""
    V = Neighborhood.box(z, 1)
    E = SolidSpaceSpec(z, 1.0)
    assert amalgam_norm(GFunc.delta(z), AmalgamKind.LEFT, E, V) == pytest.approx(3.0)
    assert amalgam_norm(GFunc.delta(z), AmalgamKind.RIGHT, E, V) == pytest.approx(3.0)


def test_amalgam_norms_dominate_l1(z):
    """Every amalgam kind dominates the plain l^1 norm for the constant weight"""
    rng = np.random.default_rng(2)
    window = Window.box(z, 5)
    f = GFunc.from_window(window, rng.normal(size=window.size))
    V = Neighborhood.box(z, 1)
    l1 = space_norm(f, SolidSpaceSpec(z, 1.0))
    for kind in (AmalgamKind.LEFT, AmalgamKind.WEAK_LEFT, AmalgamKind.WEAK_RIGHT, AmalgamKind.STRONG):
        assert amalgam_norm(f, kind, Weight(), V) >= l1 - 1e-12


def test_local_norm_control(z):
    """K(f)(x) sums |f| over x + V"""
    V = Neighborhood.box(z, 1)
    f = GFunc.from_dict(z, {0: 1.0, 1: -2.0})
    K = local_norm_control(f, V)
    assert K(0) == pytest.approx(3.0)
    assert K(2) == pytest.approx(2.0)
    assert amalgam_norm(f, AmalgamKind.L1_LINF, None, V) == pytest.approx(3.0)


def test_ed_norm_examples(z):
    """One unit coefficient gives ||chi_V||_1 = 3; two separated ones give 6"""
    V = Neighborhood.box(z, 1)
    E = SolidSpaceSpec(z, 1.0)
    one = RelSepSet(z, ((0,),))
    assert ed_norm(DiscreteCoeffs(one, [1.0]), E, V) == pytest.approx(3.0)
    two = RelSepSet(z, ((0,), (10,)))
    assert ed_norm(DiscreteCoeffs(two, [1.0, -1.0j]), E, V) == pytest.approx(6.0)


def test_ed_norm_overlapping_nodes(z):
    """Overlapping neighborhoods add up before the norm"""
    V = Neighborhood.box(z, 1)
    nodes = RelSepSet(z, ((0,), (1,)))
    c = DiscreteCoeffs(nodes, [1.0, 1.0])
    assert ed_norm(c, SolidSpaceSpec(z, math.inf), V) == pytest.approx(2.0)


def test_edb_norm_uses_entry_norms(z):
    """E_d(B) applies the B-norm entrywise first"""
    V = Neighborhood.trivial(z)
    nodes = RelSepSet(z, ((0,), (5,)), V)
    F = VectorCoeffs(nodes, (GFunc.indicator(z, range(4)), GFunc.delta(z, 3, 2.0)))
    B = SolidSpaceSpec(z, 2.0)
    assert edb_norm(F, SolidSpaceSpec(z, 1.0), B, V) == pytest.approx(2.0 + 2.0)


def test_discrete_weighted_norm(z):
    """Weighted l^p norm of node coefficients"""
    nodes = RelSepSet(z, ((0,), (1,)))
    c = DiscreteCoeffs(nodes, [3.0, 2.0])
    assert discrete_weighted_norm(c, 1.0, Weight.polynomial(1)) == pytest.approx(3.0 + 4.0)


def test_sample_on_nodes(z4):
    """Sampling reads the function at every node"""
    nodes = RelSepSet.regular(z4, [2])
    c = sample_on_nodes(GFunc.from_dict(z4, {0: 1.0, 2: 5.0, 3: 9.0}), nodes)
    np.testing.assert_allclose(c.values, [1.0, 5.0])
    assert c.as_function()(2) == pytest.approx(5.0)


def test_space_family(z):
    """Spaces share one weight and keep their exponents"""
    family = space_family(z, [(1.0, None), (math.inf, None)], v=Weight.polynomial(1))
    assert [E.name for E in family] == ["l1", "linf"]
    assert all(E.v == Weight.polynomial(1) for E in family)


@pytest.fixture
def z16():
    return GroupCarrier.cyclic(16)


@pytest.fixture
def skew_weight():
    """Table weight that is not symmetric, so left and right amalgams differ"""
    return Weight(WeightFamily.TABLE, table=(((1,), 4.0), ((2,), 2.0), ((15,), 1.5)))


def test_solidity_over_every_amalgam_kind(z16, skew_weight):
    """Shrinking |f| pointwise never increases the E norm or any amalgam norm"""
    window = Window.full(z16)
    V = Neighborhood.box(z16, 1)
    rng = np.random.default_rng(SEED)
    spaces = [
        SolidSpaceSpec(z16, p, v=Weight.polynomial(1), w=Weight.polynomial(1)) for p in (1.0, 2.0, math.inf)
    ] + [SolidSpaceSpec(z16, 2.0, v=skew_weight, w=skew_weight)]
    for f in random_functions(window, 10, SEED):
        g = f * GFunc.from_window(window, rng.uniform(size=window.size))
        for E in spaces:
            assert solidity_excess(f, g, E, V) <= 1e-12


def test_right_amalgam_is_involuted_left(z16, skew_weight):
    """||f||_{W_R(E)} = ||f^v||_{W(E)}, also for a non-symmetric weight"""
    window = Window.full(z16)
    V = Neighborhood.box(z16, 1)
    E = SolidSpaceSpec(z16, 1.0, v=skew_weight, w=skew_weight)
    for f in random_functions(window, 10, SEED):
        right = amalgam_norm(f, AmalgamKind.RIGHT, E, V)
        assert right == pytest.approx(amalgam_norm(involute(f), AmalgamKind.LEFT, E, V), rel=1e-12)


def test_amalgam_ratios_are_bounded(z16):
    """Weak amalgam over l^1 lies in [1, |V+V|]; strong over left in [1, 2]; right equals left"""
    V = Neighborhood.box(z16, 1)
    report = amalgam_ratios(random_functions(Window.full(z16), 100, SEED), Weight(), V)
    assert report.trials == 100
    assert 1 - 1e-12 <= report.weak_min <= report.weak_max <= 5 + 1e-12
    assert 1 - 1e-12 <= report.strong_min <= report.strong_max <= 2 + 1e-12
    assert report.right_min == pytest.approx(1.0, rel=1e-12)
    assert report.right_max == pytest.approx(1.0, rel=1e-12)


def test_amalgam_ratios_reject_zero_functions(z16):
    """A list of zero functions has no ratios"""
    with pytest.raises(SpaceSpecError):
        amalgam_ratios([GFunc.zero(z16)], Weight(), Neighborhood.box(z16, 1))


def test_product_embedding_constant_stays_bounded(z):
    """||fg||_1 <= |V|^-1 ||f||_{W(l^1, l^inf)} ||g||_{W(l^inf, l^1)} as the window grows"""
    V = Neighborhood.box(z, 1)
    for radius in (4, 8, 16):
        window = Window.box(z, radius)
        fs = random_functions(window, 10, SEED)
        gs = random_functions(window, 10, SEED + radius)
        constant = product_embedding_constant(list(zip(fs, gs)), V)
        assert 0 < constant <= (1 + 1e-12) / len(V)


def test_sampling_constant_bounded_by_spreadness(z):
    """||f|_Lambda||_{E_d} <= spreadness(Lambda) ||f||_{W(E)} for 2Z and l^1, l^2, l^inf"""
    V = Neighborhood.box(z, 1)
    nodes = RelSepSet(z, tuple((x,) for x in range(-16, 17, 2)))
    rho = spreadness(nodes, V)
    assert rho == 2
    functions = random_functions(Window.box(z, 16), 20, SEED)
    for p in (1.0, 2.0, math.inf):
        constant = sampling_constant(functions, nodes, SolidSpaceSpec(z, p), V)
        assert 0 < constant <= rho * (1 + 1e-12)
