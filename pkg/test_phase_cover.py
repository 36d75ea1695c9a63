"""
Tests for partitions of unity, the approximate projector P_U and its error certificate
"""

import numpy as np
import pytest

from phasecover.core.atomic import projector, random_functions
from phasecover.core.cover import (
    CoverWindow,
    PartitionOfUnity,
    approx_error_certificate,
    approx_projector,
    approx_residual,
    auxiliary_g_u,
    build_bupu,
    certificate_sweep,
    exhaustion_radii,
    factor_theta,
    localized_g_u_bound,
    modulate,
    profile_function,
    smallest_certified_radius,
    vector_analysis,
    vector_synthesis,
)
from phasecover.core.group import GFunc, GroupCarrier, Neighborhood, RelSepSet, Weight, Window
from phasecover.models.report_models import CertificateRow
from phasecover.utils.config import CERTIFICATE_SLACK, CERTIFIED_EPSILONS
from phasecover.utils.exceptions import CoverageGapError, MaskRejectedError, PartitionError

SEED = 0x5EED


def test_two_center_partition_on_z8(z8):
    """Raised cosines of width 8 at {0, 4} sum to one on Z_8"""
    centers = RelSepSet(z8, ((0,), (4,)))
    pu = build_bupu(centers, "raised_cosine", 8)
    np.testing.assert_allclose(pu.total(), np.ones(8), atol=1e-12)
    assert pu.exact_partition
    assert pu.lower == pytest.approx(1.0)
    assert pu.verify_envelope() <= 1e-12


def test_coverage_gap_detected(z8):
    """A profile too narrow for its centers leaves points uncovered"""
    with pytest.raises(CoverageGapError):
        build_bupu(RelSepSet(z8, ((0,),)), "triangular", 2)


def test_profile_width_must_be_positive(z):
    """Zero width raises PartitionError"""
    with pytest.raises(PartitionError):
        profile_function(z, "triangular", 0)


def test_gaussian_profile_is_truncated(z):
    """The Gaussian profile vanishes beyond twice its width"""
    p = profile_function(z, "gaussian_normalized", 4)
    assert p(0) == pytest.approx(1.0)
    assert p(9) == 0
    assert max(abs(x[0]) for x in p.support()) <= 8


def test_lattice_partition(z):
    """Triangular profiles at 4Z sum to one on the bounding window"""
    window = Window.box(z, 12)
    centers = RelSepSet.regular(z, [4], window)
    pu = build_bupu(centers, "triangular", 8, window=window)
    np.testing.assert_allclose(pu.total(), np.ones(window.size), atol=1e-12)


def test_partition_document_round_trip(gabor16_partition):
    """A partition survives its JSON document form"""
    restored = PartitionOfUnity.from_document(gabor16_partition.to_document())
    np.testing.assert_allclose(restored.matrix, gabor16_partition.matrix, atol=1e-12)
    assert restored.exact_partition


def test_covering_window_reproduces_projector(gabor16_system, gabor16_partition):
    """P_U = P once U is the whole group"""
    U = CoverWindow.box(gabor16_system.carrier, 8)
    assert U.covers(gabor16_system.carrier)
    f = random_functions(gabor16_system.window, 1, SEED)[0]
    assert approx_projector(gabor16_system, gabor16_partition, U, f).allclose(
        projector(gabor16_system, f), atol=1e-10
    )


def test_vector_synthesis_inverts_analysis(gabor16_system, gabor16_partition):
    """R^B_U C^B = P for covering U"""
    U = CoverWindow.box(gabor16_system.carrier, 8)
    f = random_functions(gabor16_system.window, 1, SEED + 1)[0]
    F = vector_analysis(gabor16_system, gabor16_partition, f)
    assert len(F) == len(gabor16_partition)
    assert F.total().allclose(projector(gabor16_system, f), atol=1e-10)
    assert vector_synthesis(gabor16_system, gabor16_partition, F, U).allclose(
        projector(gabor16_system, f), atol=1e-10
    )


def test_approx_projector_is_synthesis_of_analysis(gabor16_system, gabor16_partition):
    """P_U f is exactly R^B_U C^B f for a partial U"""
    U = CoverWindow.box(gabor16_system.carrier, 2)
    assert not U.covers(gabor16_system.carrier)
    for f in random_functions(gabor16_system.window, 3, SEED + 4):
        direct = approx_projector(gabor16_system, gabor16_partition, U, f)
        composed = vector_synthesis(
            gabor16_system, gabor16_partition, vector_analysis(gabor16_system, gabor16_partition, f), U
        )
        window = gabor16_system.window
        assert np.array_equal(direct.on(window), composed.on(window))


def test_residual_matches_difference(gabor16_system, gabor16_partition):
    """approx_residual = P f - P_U f for a partial U"""
    U = CoverWindow.box(gabor16_system.carrier, 2)
    assert not U.covers(gabor16_system.carrier)
    f = random_functions(gabor16_system.window, 1, SEED + 2)[0]
    direct = projector(gabor16_system, f) - approx_projector(gabor16_system, gabor16_partition, U, f)
    assert approx_residual(gabor16_system, gabor16_partition, U, f).allclose(direct, atol=1e-10)


def test_certificate_sweep(gabor16_system, gabor16_partition):
    """Theory bounds shrink to zero along the exhaustion and dominate the empirical norms"""
    rows = certificate_sweep(gabor16_system, gabor16_partition, [1, 2, 4, 8], trials=10, seed=SEED)
    bounds = [r.theory_bound for r in rows]
    assert all(b <= a + 1e-15 for a, b in zip(bounds, bounds[1:]))
    assert bounds[-1] == pytest.approx(0.0, abs=1e-12)
    assert rows[-1].empirical_opnorm <= 1e-10
    assert rows[-1].g_u_sup == 0.0
    for row in rows:
        assert row.probe_count == 10 + len(gabor16_system.atoms)
        assert row.empirical_opnorm <= CERTIFICATE_SLACK * row.theory_bound + 1e-12


def test_smallest_certified_radius_on_gabor16(gabor16_system, gabor16_partition):
    """Each tolerance is reached and the error stays below it from that radius on"""
    rows = certificate_sweep(gabor16_system, gabor16_partition, [1, 2, 4, 8], trials=10, seed=SEED)
    for eps in CERTIFIED_EPSILONS:
        radius = smallest_certified_radius(rows, eps)
        assert radius is not None
        later = [r for r in rows if r.U_radius >= radius]
        assert all(r.empirical_opnorm <= eps for r in later)
        earlier = [r for r in rows if r.U_radius < radius]
        if earlier:
            assert earlier[-1].empirical_opnorm > eps
    assert smallest_certified_radius(rows, 0.01) >= smallest_certified_radius(rows, 0.1)


def test_smallest_certified_radius_needs_a_settled_tail():
    """A dip below eps that is followed by a larger error does not count"""
    rows = [
        CertificateRow(U_radius=r, empirical_opnorm=e, theory_bound=1.0)
        for r, e in [(1, 0.5), (2, 0.05), (4, 0.2), (8, 0.0)]
    ]
    assert smallest_certified_radius(rows, 0.1) == 8
    assert smallest_certified_radius(rows, 1.0) == 1
    assert smallest_certified_radius(rows[:3], 0.1) is None
    assert smallest_certified_radius([], 0.1) is None


def test_single_certificate_matches_sweep(gabor16_system, gabor16_partition):
    """A radius-given certificate equals the matching sweep row"""
    row = approx_error_certificate(gabor16_system, gabor16_partition, 2, trials=5, seed=SEED)
    sweep = certificate_sweep(gabor16_system, gabor16_partition, [2], trials=5, seed=SEED)[0]
    assert row.empirical_opnorm == pytest.approx(sweep.empirical_opnorm)
    assert row.theory_bound == pytest.approx(sweep.theory_bound)
    explicit = approx_error_certificate(
        gabor16_system, gabor16_partition, CoverWindow.box(gabor16_system.carrier, 2), trials=5, seed=SEED
    )
    assert explicit.empirical_opnorm == pytest.approx(sweep.empirical_opnorm)


def test_auxiliary_function_vanishes_on_covering_window(gabor16_partition):
    """G_U = 0 and both localized bounds vanish when U is the whole group"""
    carrier = gabor16_partition.carrier
    U = CoverWindow.box(carrier, 8)
    V = Neighborhood.box(carrier, 1)
    assert auxiliary_g_u(gabor16_partition, U, V).is_zero()
    lhs, rhs = localized_g_u_bound(gabor16_partition, U, Neighborhood.box(carrier, 1), V, Weight())
    assert lhs == 0.0
    assert rhs == 0.0


def test_auxiliary_function_positive_for_small_window(gabor16_partition):
    """A small U leaves part of every envelope outside"""
    carrier = gabor16_partition.carrier
    g_u = auxiliary_g_u(gabor16_partition, CoverWindow.box(carrier, 1), Neighborhood.box(carrier, 1))
    assert g_u.max_abs() > 0


def test_exhaustion_radii():
    """Box radii double from the initial radius"""
    assert exhaustion_radii(2, 3) == [2, 4, 8, 16]
    assert exhaustion_radii(1, 0) == [1]


def test_theta_factorization(gabor16_partition):
    """theta = m eta factors back into the mask and the exact partition"""
    window = gabor16_partition.window
    t = window.points[:, 0]
    mask = GFunc.from_window(window, 0.6 + 0.3 * np.cos(2 * np.pi * t / 16))
    theta = modulate(gabor16_partition, mask)
    assert not theta.exact_partition
    assert theta.lower == pytest.approx(0.3)
    m, eta = factor_theta(theta)
    assert m.allclose(mask, atol=1e-12)
    np.testing.assert_allclose(eta.matrix, gabor16_partition.matrix, atol=1e-12)


def test_theta_rejects_complex_mask(gabor16_partition):
    """Complex masks cannot modulate a partition"""
    mask = GFunc.from_window(gabor16_partition.window, np.full(gabor16_partition.window.size, 1j))
    with pytest.raises(MaskRejectedError):
        modulate(gabor16_partition, mask)


def test_approx_projector_needs_exact_partition(gabor16_system, gabor16_partition):
    """Non-exact families are refused by P_U"""
    mask = GFunc.from_window(gabor16_partition.window, np.full(gabor16_partition.window.size, 0.5))
    theta = modulate(gabor16_partition, mask)
    f = random_functions(gabor16_system.window, 1, SEED)[0]
    with pytest.raises(PartitionError):
        approx_projector(gabor16_system, theta, CoverWindow.box(gabor16_system.carrier, 2), f)


def test_cover_window_on_lattice_never_covers():
    """Z has no finite covering window"""
    z = GroupCarrier.lattice(1)
    assert not CoverWindow.box(z, 100).covers(z)
