"""
Tests for discrete Gabor systems, the STFT, localization operators, the modulation-space
harness and localized frames
"""

import numpy as np
import pytest

from phasecover.core.cover import build_bupu
from phasecover.core.group import Neighborhood, RelSepSet, Weight
from phasecover.core.multiplier import equivalence_ratios
from phasecover.core.spaces import SolidSpaceSpec
from phasecover.frames.gabor import (
    GaborSystem,
    canonical_dual_window,
    default_lattice,
    gabor_frame_bounds,
    gabor_molecule_system,
    gaussian_window,
    isometric_istft,
    isometric_stft,
    istft,
    localization_operator,
    modulation_norm,
    modulation_norm_harness,
    modulation_norm_ratios,
    random_signals,
    reconstruction_error,
    stft,
    tf_plane,
    tf_shift,
)
from phasecover.frames.localized import frame_multiplier, localized_frame, localized_molecule_system
from phasecover.utils.exceptions import IndexRangeError, NotAFrameError, ZeroWindowError

SEED = 0x5EED


@pytest.fixture
def signals():
    return random_signals(16, 5, SEED)


def test_tf_shift_wraps_at_n():
    """M_N T_N h = h"""
    h = gaussian_window(8)
    np.testing.assert_allclose(tf_shift(h, 8, 8, 8), h, atol=1e-12)


def test_tf_shift_index_range():
    """Shifts outside [0, N] raise IndexRangeError"""
    with pytest.raises(IndexRangeError):
        tf_shift(gaussian_window(8), 9, 0, 8)
    with pytest.raises(IndexRangeError):
        tf_shift(gaussian_window(8), 0, -1, 8)


def test_stft_of_delta():
    """V_{delta_0} delta_0 is one on the x = 0 row and zero elsewhere"""
    delta = np.array([1, 0, 0, 0], dtype=complex)
    F = stft(delta, delta)
    expected = np.zeros((4, 4))
    expected[0, :] = 1.0
    np.testing.assert_allclose(F.values, expected, atol=1e-12)
    assert F.carrier == tf_plane(4)


def test_zero_window_rejected():
    """A zero analysis window raises ZeroWindowError"""
    with pytest.raises(ZeroWindowError):
        stft(np.ones(4), np.zeros(4))


def test_moyal_identity(signals):
    """sum |V_h f|^2 = N ||f||^2 ||h||^2"""
    h = gaussian_window(16, 0.5)
    for f in signals:
        lhs = np.sum(np.abs(stft(f, h).values) ** 2)
        rhs = 16 * np.linalg.norm(f) ** 2 * np.linalg.norm(h) ** 2
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_istft_is_adjoint(signals):
    """<V f, F> = <f, V^* F>"""
    h = gaussian_window(16)
    rng = np.random.default_rng(SEED)
    F = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    f = signals[0]
    lhs = np.vdot(F, stft(f, h).values)
    rhs = np.vdot(istft(F, h), f)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_isometric_stft_inverts(signals):
    """The normalized STFT is an isometry with left inverse its adjoint"""
    h = gaussian_window(16)
    f = signals[1]
    F = isometric_stft(f, h)
    assert F.norm2() == pytest.approx(np.linalg.norm(f), rel=1e-10)
    np.testing.assert_allclose(isometric_istft(F, h), f, atol=1e-10)
    assert modulation_norm(f, h, 2.0) == pytest.approx(np.linalg.norm(f), rel=1e-10)


def test_default_lattice():
    """The largest square lattice keeping redundancy at least two"""
    assert default_lattice(16) == (2, 2)
    assert default_lattice(8) == (2, 2)
    assert GaborSystem.gaussian(16).a == 2


def test_full_lattice_dual():
    """On the full lattice the canonical dual is h / (N ||h||^2)"""
    h = gaussian_window(8)
    dual = canonical_dual_window(h, 1, 1, 8)
    np.testing.assert_allclose(dual, h / (8 * np.linalg.norm(h) ** 2), atol=1e-12)
    bounds = gabor_frame_bounds(h, 1, 1, 8)
    assert bounds.lower == pytest.approx(8 * np.linalg.norm(h) ** 2)
    assert bounds.upper == pytest.approx(bounds.lower)


def test_dual_reconstruction(gabor16):
    """The canonical dual window reconstructs every basis vector"""
    assert reconstruction_error(gabor16.unit_window, gabor16.dual_window, 2, 2, 16) <= 1e-10
    assert gabor16.redundancy == 4.0
    assert gabor16.frame_bounds().lower > 0


def test_single_atom_is_not_a_frame():
    """One time-frequency shift cannot span Z_8"""
    with pytest.raises(NotAFrameError):
        canonical_dual_window(gaussian_window(8), 8, 8, 8)


def test_gabor_system_save_load(tmp_path, gabor16):
    """Window and lattice survive the binary signal file and its sidecar"""
    path = tmp_path / "window.bin"
    gabor16.save(path)
    restored = GaborSystem.load(path)
    assert (restored.N, restored.a, restored.b) == (16, 2, 2)
    assert restored.window_family == "gaussian"
    np.testing.assert_allclose(restored.h, gabor16.h)


def test_molecule_system_size(gabor16_system):
    """One atom per lattice point of Z_16 x Z_16 with steps (2, 2)"""
    assert len(gabor16_system.atoms) == 64
    assert gabor16_system.carrier == tf_plane(16)


def test_localization_identity(signals):
    """H_1 = I"""
    h = gaussian_window(16)
    for f in signals:
        np.testing.assert_allclose(localization_operator(h, 1.0, f), f, atol=1e-10)


def test_localization_real_mask(signals):
    """A real mask gives a self-adjoint operator with eigenvalues in its range"""
    h = gaussian_window(16)
    t = np.arange(16)
    mask = np.broadcast_to((0.6 + 0.3 * np.cos(2 * np.pi * t / 16))[:, None], (16, 16))
    basis = np.eye(16)
    H = np.stack([localization_operator(h, mask, basis[:, k]) for k in range(16)], axis=1)
    assert np.abs(H - H.conj().T).max() <= 1e-10
    evals = np.linalg.eigvalsh((H + H.conj().T) / 2)
    assert evals.min() >= 0.3 - 1e-10
    assert evals.max() <= 0.9 + 1e-10


def test_stft_covariance(signals):
    """|V(pi(z) f)| is |V f| translated by z"""
    h = gaussian_window(16)
    f = signals[2]
    x, s = 3, 5
    moved = np.abs(stft(tf_shift(f, x, s, 16), h).values)
    np.testing.assert_allclose(moved, np.roll(np.abs(stft(f, h).values), (x, s), axis=(0, 1)), atol=1e-10)


def test_localization_commutes_with_shifts(signals):
    """H_{T_z m} pi(z) = pi(z) H_m"""
    h = gaussian_window(16)
    rng = np.random.default_rng(SEED + 3)
    m = rng.uniform(size=(16, 16))
    f = signals[3]
    x, s = 6, 11
    lhs = localization_operator(h, np.roll(m, (x, s), axis=(0, 1)), tf_shift(f, x, s, 16))
    rhs = tf_shift(localization_operator(h, m, f), x, s, 16)
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_modulation_harness_rows(gabor16, gabor16_partition):
    """One row per (p, q, s, t) combination with positive constants"""
    rows = modulation_norm_harness(gabor16.h, gabor16_partition, [(2, 2, 2, 2), (1, 2, 2, 1)], trials=3, seed=SEED)
    assert [r.space for r in rows] == ["modulation[2,2]", "modulation[2,1]"]
    for row in rows:
        assert row.trial_count == 3
        assert 0 < row.c_min <= row.c_max


def test_modulation_harness_matches_generic_pathway():
    """With P = V V^* the direct modulation harness equals the generic equivalence ratios"""
    gs = GaborSystem.gaussian(8, 1, 1)
    sys = gabor_molecule_system(gs)
    pu = build_bupu(RelSepSet.regular(tf_plane(8), [4, 4]), "raised_cosine", 8)
    signals = random_signals(8, 4, SEED)
    v = Weight.polynomial(1)
    direct = modulation_norm_ratios(gs.h, pu, signals, 2.0, 1.0, 1.0, 2.0, v)
    E = SolidSpaceSpec(sys.carrier, 2.0, 1.0, v)
    B = SolidSpaceSpec(sys.carrier, 1.0, 2.0)
    planes = [isometric_stft(f, gs.h).on(sys.window) for f in signals]
    generic = equivalence_ratios(sys, pu, [E], B, planes, Neighborhood.trivial(sys.carrier))
    np.testing.assert_allclose(direct, generic[:, 0], rtol=1e-10)


def test_localized_frame_reconstructs():
    """The canonical dual of the localized frame reconstructs exactly"""
    frame = localized_frame(radius=8)
    assert frame.reconstruction_error() <= 1e-10
    assert len(frame.index) == 17


def test_localized_gram_decay():
    """The Gram matrix is dominated in the weighted CD norm, which bounds its spectral norm"""
    frame = localized_frame(radius=8)
    norm, a = frame.localization(Weight.polynomial(2))
    assert np.isfinite(norm)
    assert norm >= np.linalg.norm(frame.gram, 2) * (1 - 1e-12)
    assert a(0) == pytest.approx(np.abs(np.diag(frame.gram)).max())


def test_frame_multiplier_identity():
    """The frame multiplier with m = 1 reconstructs f"""
    frame = localized_frame(radius=8)
    f = np.random.default_rng(SEED).normal(size=17)
    np.testing.assert_allclose(frame_multiplier(frame, 1.0, f), f, atol=1e-10)


def test_localized_coefficient_system_projector():
    """On coefficients the Gram system reproduces every sequence"""
    frame = localized_frame(radius=6)
    sys = localized_molecule_system(frame)
    np.testing.assert_allclose(sys.projector_matrix, np.eye(13), atol=1e-9)
