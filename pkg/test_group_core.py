"""
Tests for carriers, finitely supported functions, convolution, weights and node sets
"""

import numpy as np
import pytest

from phasecover.core.group import (
    GFunc,
    GroupCarrier,
    Neighborhood,
    RelSepSet,
    Weight,
    Window,
    check_fgl_shells,
    check_grs,
    check_moderate,
    check_weight_admissible,
    convolve,
    convolve_fft,
    involute,
    is_v_dense,
    spreadness,
    translate,
)
from phasecover.utils.config import INVARIANT_N_MAX
from phasecover.utils.exceptions import (
    CarrierError,
    NeighborhoodError,
    NodeSetError,
    SubgroupError,
    WeightError,
)

SEED = 0x5EED


def test_cyclic_group_axioms_exhaustive(z4):
    """Z_4 satisfies associativity, identity and inverses on all triples"""
    assert z4.check_group_axioms()
    assert GroupCarrier.cyclic(3, 2).check_group_axioms()


def test_lattice_group_axioms_sampled():
    """Z^2 passes the randomized axiom check"""
    assert GroupCarrier.lattice(2).check_group_axioms(samples=200, seed=3)


def test_cyclic_normalization(z4):
    """Elements of Z_N are reduced mod N and have centered norms"""
    assert z4.normalize(-1) == (3,)
    assert z4.product(3, 2) == (1,)
    assert z4.inverse(1) == (3,)
    assert z4.norm(3) == pytest.approx(1.0)
    assert z4.order == 4


def test_invalid_carriers_rejected():
    """Non-positive modulus, zero dimension and wrong coordinate counts raise CarrierError"""
    with pytest.raises(CarrierError):
        GroupCarrier.cyclic(0)
    with pytest.raises(CarrierError):
        GroupCarrier.lattice(0)
    with pytest.raises(CarrierError):
        GroupCarrier.lattice(2).normalize((1, 2, 3))


def test_translate_indicator_on_z4(z4):
    """Left translating chi_{2,3} by 2 on Z_4 gives chi_{0,1}"""
    f = GFunc.indicator(z4, [2, 3])
    assert translate(f, 2).allclose(GFunc.indicator(z4, [0, 1]))


def test_translate_sides_are_inverse(z):
    """Left translation by x undoes right translation by x"""
    f = GFunc.from_dict(z, {0: 1.0, 1: 2.0j, 3: -1.0})
    assert translate(translate(f, 5, "right"), 5, "left").allclose(f)
    assert translate(f, 2)(3) == pytest.approx(2.0j)


def test_involution(z, z4):
    """f^v(x) = f(-x) on both carrier kinds"""
    f = GFunc.from_dict(z, {1: 1.0, 2: 3.0})
    g = involute(f)
    assert g(-2) == pytest.approx(3.0)
    assert g(1) == 0
    h = involute(GFunc.delta(z4, 1))
    assert h(3) == pytest.approx(1.0)


def test_left_and_right_translations_commute(z, z4):
    """L_x R_y f = R_y L_x f on Z and on Z_4"""
    rng = np.random.default_rng(SEED)
    for carrier, window in [(z, Window.box(z, 4)), (z4, Window.full(z4))]:
        f = GFunc.from_window(window, rng.normal(size=window.size) + 1j * rng.normal(size=window.size))
        for x, y in [(1, 2), (3, -1), (-2, 5)]:
            lr = translate(translate(f, y, "right"), x, "left")
            rl = translate(translate(f, x, "left"), y, "right")
            assert lr.allclose(rl, atol=0.0)


def test_involution_reverses_convolution():
    """(f*g)^v = g^v * f^v on Z^2 and on Z_6^2"""
    rng = np.random.default_rng(SEED)
    for carrier, window in [
        (GroupCarrier.lattice(2), Window.box(GroupCarrier.lattice(2), 2)),
        (GroupCarrier.cyclic(6, 2), Window.full(GroupCarrier.cyclic(6, 2))),
    ]:
        f = GFunc.from_window(window, rng.normal(size=window.size) + 1j * rng.normal(size=window.size))
        g = GFunc.from_window(window, rng.normal(size=window.size) + 1j * rng.normal(size=window.size))
        assert involute(convolve(f, g)).allclose(convolve(involute(g), involute(f)), atol=1e-10)


def test_convolution_of_indicators(z, z4):
    """chi_{0,1} * chi_{0,1} is (1,2,1) on Z and (1,2,1,0) on Z_4"""
    chi = GFunc.indicator(z, [0, 1])
    expected = GFunc.from_dict(z, {0: 1, 1: 2, 2: 1})
    assert convolve(chi, chi).allclose(expected)
    chi4 = GFunc.indicator(z4, [0, 1])
    np.testing.assert_allclose(convolve(chi4, chi4).values, [1, 2, 1, 0])


def test_convolution_against_fft():
    """Direct and FFT convolutions agree on random complex functions"""
    rng = np.random.default_rng(7)
    for carrier, window in [
        (GroupCarrier.cyclic(6, 2), None),
        (GroupCarrier.lattice(2), Window.box(GroupCarrier.lattice(2), 3)),
    ]:
        window = window or Window.full(carrier)
        f = GFunc.from_window(window, rng.normal(size=window.size) + 1j * rng.normal(size=window.size))
        g = GFunc.from_window(window, rng.normal(size=window.size))
        assert convolve(f, g).allclose(convolve_fft(f, g), atol=1e-10)


def test_convolution_carrier_mismatch(z, z4):
    """Convolving functions on different carriers raises CarrierError"""
    with pytest.raises(CarrierError):
        convolve(GFunc.delta(z), GFunc.delta(z4))


def test_zero_function_support(z):
    """Exact zeros never count as support"""
    f = GFunc.from_dict(z, {0: 0.0, 4: 1.0})
    assert f.support() == [(4,)]
    assert GFunc.zero(z).is_zero()


def test_neighborhood_must_be_symmetric(z):
    """V must contain the identity and be closed under inversion"""
    with pytest.raises(NeighborhoodError):
        Neighborhood(z, frozenset([(0,), (1,)]))
    with pytest.raises(NeighborhoodError):
        Neighborhood(z, frozenset([(1,), (-1,)]))
    assert len(Neighborhood.box(z, 2)) == 5


def test_spreadness_examples(z):
    """2Z on [-8, 8] with V = {-1,0,1} has spreadness 2; Z on [-4, 4] with V of radius 2 has 5"""
    even = [x for x in range(-8, 9) if x % 2 == 0]
    assert spreadness(even, Neighborhood.box(z, 1)) == 2
    assert spreadness(range(-4, 5), Neighborhood.box(z, 2)) == 5


def test_spreadness_monotone_in_neighborhood(z):
    """Growing V never lowers the spreadness of a fixed node set"""
    rng = np.random.default_rng(SEED)
    nodes = sorted({int(x) for x in rng.integers(-20, 21, size=15)})
    counts = [spreadness(nodes, Neighborhood.box(z, r)) for r in range(6)]
    assert counts[0] == 1
    assert all(a <= b for a, b in zip(counts, counts[1:]))
    assert spreadness(nodes, Neighborhood.trivial(z)) <= spreadness(nodes, Neighborhood.box(z, 1))


def test_v_density(z):
    """3Z is dense for V = {-1,0,1} but 4Z is not"""
    window = Window.box(z, 6)
    V = Neighborhood.box(z, 1)
    assert is_v_dense(range(-9, 10, 3), V, window)
    assert not is_v_dense(range(-8, 9, 4), V, window)


def test_node_set_rejects_duplicates(z):
    """Duplicate nodes and empty node sets raise NodeSetError"""
    with pytest.raises(NodeSetError):
        RelSepSet(z, ((0,), (0,)))
    with pytest.raises(NodeSetError):
        RelSepSet(z, ())


def test_subgroup_detection():
    """The regular node set of Z_8 is a subgroup; {0, 1, 3} is not"""
    z8 = GroupCarrier.cyclic(8)
    RelSepSet.regular(z8, [2]).check_subgroup()
    with pytest.raises(SubgroupError):
        RelSepSet(z8, ((0,), (1,), (3,))).check_subgroup()


def test_weight_values(z):
    """Weights evaluate as 1, (1+|x|)^alpha and beta^|x|"""
    assert Weight.constant().value(z, 5) == 1.0
    assert Weight.polynomial(2).value(z, 3) == pytest.approx(16.0)
    assert Weight.exponential(2).value(z, -3) == pytest.approx(8.0)
    assert Weight.polynomial(2).name == "poly(2)"


def test_weight_rejects_nonpositive():
    """Exponential weights need a positive base"""
    with pytest.raises(WeightError):
        Weight.exponential(0.0)


def test_weight_admissibility(z):
    """Polynomial weights are submultiplicative and symmetric"""
    report = check_weight_admissible(Weight.polynomial(2), z, 6)
    assert report.submultiplicative and report.symmetric
    assert report.checked_pairs == 13 ** 2


def test_moderate_constant(z):
    """(1+|x|) is 1-moderate with respect to itself"""
    v = Weight.polynomial(1)
    assert check_moderate(v, v, z, 5).constant <= 1.0 + 1e-12


def test_grs_condition(z):
    """Polynomial weights pass the GRS tail check; 2^|x| fails"""
    assert check_grs(Weight.polynomial(2), z, [1], n_max=256).passes
    report = check_grs(Weight.exponential(2), z, [1], n_max=64)
    assert not report.passes
    assert report.generators[0].tail == pytest.approx(2.0)


def test_grs_polynomial_needs_long_sequences(z):
    """(1+|x|) fails the tail check at the default n_max and passes from 256 on"""
    assert not check_grs(Weight.polynomial(1), z, [1]).passes
    assert check_grs(Weight.polynomial(1), z, [1], n_max=INVARIANT_N_MAX).passes


def test_fgl_shells(z):
    """Ball roots of a polynomial weight tend to 1; exponential ones stay at the base"""
    assert check_fgl_shells(Weight.polynomial(2), z, [1], n_max=256).passes
    report = check_fgl_shells(Weight.exponential(3), z, [1], n_max=32)
    assert not report.passes
    assert report.ball_roots[-1] == pytest.approx(3.0)
