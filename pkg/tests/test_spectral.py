import json

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imgmps.imageio import ImageGrid
from imgmps.spectral import (
    DecayModel,
    Spectrum,
    TruncationSpec,
    alg_axis_sums,
    alg_fold_envelope,
    alias_fold,
    bound,
    bound_algebraic,
    bound_exponential,
    dct_extend_type1,
    dct_extend_type2,
    dct_type1,
    dct_type2,
    dft2,
    discarded_weight_algebraic,
    discarded_weight_exponential,
    exp_axis_sums,
    frequencies,
    harmonic_number,
    hard_cutoff_image,
    hermitian_symmetrize,
    hurwitz_zeta,
    idct_type1,
    idct_type2,
    idft2,
    master_spectrum,
    spectrum_to_mps,
    synthetic_corpus,
    truncate_spectrum,
)
from imgmps.tensnet import fidelity, mps_from_state, mps_to_vector, two_norm_distance

from oracles import disc_weight_2d, fold_alg_direct, fold_exp_closed, idft2_direct


def _random_spectrum(n, rng, lam=None):
    side = 1 << n
    c = rng.normal(size=(side, side)) + 1j * rng.normal(size=(side, side))
    if lam is not None:
        c = truncate_spectrum(Spectrum(n, c), lam)[0].coeffs
    return Spectrum(n, c)


# dft2 / idft2 ------------------------------------------------------------

def test_constant_grid_spectrum():
    s = dft2(ImageGrid(3, np.full((8, 8), 0.3)))
    assert s.coefficient(0, 0) == pytest.approx(0.3)
    s.coeffs[4, 4] = 0
    assert np.max(np.abs(s.coeffs)) < 1e-15


def test_cosine_grid_spectrum():
    a = np.arange(8)
    f = np.tile(np.cos(2 * np.pi * a / 8), (8, 1))
    s = dft2(f)
    assert s.coefficient(1, 0) == pytest.approx(0.5)
    assert s.coefficient(-1, 0) == pytest.approx(0.5)
    assert np.sum(np.abs(s.coeffs) > 1e-12) == 2


def test_round_trip(rng):
    g = ImageGrid(3, rng.random((8, 8)))
    np.testing.assert_allclose(idft2(dft2(g)).real, g.pixels, atol=1e-12)


def test_delta_spectrum_plane_wave():
    c = np.zeros((8, 8), complex)
    c[4 + 2, 4 - 1] = 1.0  # q=2, p=-1
    b, a = np.mgrid[0:8, 0:8]
    np.testing.assert_allclose(idft2(Spectrum(3, c)), np.exp(2j * np.pi * (-a + 2 * b) / 8), atol=1e-12)


def test_idft2_matches_direct_sum(rng):
    s = _random_spectrum(3, rng)
    np.testing.assert_allclose(idft2(s), idft2_direct(s.coeffs), atol=1e-11)


def test_spectrum_json(rng):
    s = _random_spectrum(2, rng)
    obj = json.loads(s.to_json())
    assert obj["layout"] == "centered" and len(obj["coeffs"]) == 16
    # row-major over q then p
    assert obj["coeffs"][1] == [s.coeffs[0, 1].real, s.coeffs[0, 1].imag]
    np.testing.assert_array_equal(Spectrum.from_json(s.to_json()).coeffs, s.coeffs)


def test_coefficient_range():
    with pytest.raises(IndexError):
        Spectrum(1, np.zeros((2, 2))).coefficient(1, 0)


# truncation --------------------------------------------------------------

def test_truncation_examples(rng):
    s = _random_spectrum(3, rng)
    full, w = truncate_spectrum(s, TruncationSpec(3, 3))
    assert w == pytest.approx(np.sum(np.abs(s.coeffs[0]) ** 2) + np.sum(np.abs(s.coeffs[1:, 0]) ** 2))
    const = dft2(np.full((4, 4), 0.5))
    kept, w0 = truncate_spectrum(const, 0)
    np.testing.assert_allclose(kept.coeffs, const.coeffs)
    assert w0 < 1e-30
    kept, w1 = truncate_spectrum(s, 1)
    direct = np.linalg.norm(s.coeffs) ** 2 - sum(abs(s.coefficient(p, q)) ** 2 for p in (-1, 0, 1) for q in (-1, 0, 1))
    assert w1 == pytest.approx(direct, rel=1e-12)
    assert np.count_nonzero(kept.coeffs) == 9


def test_truncation_spec_limits():
    assert TruncationSpec(3, 3).chi == 7
    with pytest.raises(ValueError):
        TruncationSpec(4, 3)
    with pytest.raises(ValueError):
        TruncationSpec(-1, 3)


# spectrum_to_mps ---------------------------------------------------------

def test_zero_mode_is_uniform():
    c = np.zeros((8, 8), complex)
    c[4, 4] = 1
    vec = mps_to_vector(spectrum_to_mps(Spectrum(3, c)))
    np.testing.assert_allclose(vec, np.ones(64))
    assert spectrum_to_mps(Spectrum(3, c)).max_bond == 1


def test_single_mode_product_phases():
    n = 3
    c = np.zeros((8, 8), complex)
    c[4, 5] = 1  # p = 1
    mps = spectrum_to_mps(Spectrum(n, c))
    assert mps.max_bond == 1
    # x-register qubit j (MSB first) carries phase e^{i 2 pi sigma / 2^{j+1}}
    for j, t in enumerate(mps.tensors[n:]):
        np.testing.assert_allclose(t.ravel(), [1, np.exp(2j * np.pi / 2 ** (j + 1))])
    b, a = np.mgrid[0:8, 0:8]
    np.testing.assert_allclose(mps_to_vector(mps), np.exp(2j * np.pi * a / 8).ravel(), atol=1e-12)


def test_three_by_three_block(rng):
    s = _random_spectrum(4, rng, lam=1)
    mps = spectrum_to_mps(s)
    ref = idft2(s).ravel()
    assert fidelity(mps_to_vector(mps) / np.linalg.norm(ref), ref / np.linalg.norm(ref)) >= 1 - 1e-10
    assert mps.max_bond == 3


def test_asymmetric_support_bonds(rng):
    c = np.zeros((16, 16), complex)
    c[8 + np.array([-3, 0, 5])[:, None], 8 + np.array([1, 2])[None, :]] = rng.normal(size=(3, 2))
    mps = spectrum_to_mps(Spectrum(4, c))
    assert mps.bonds == [1, 3, 3, 3, 2, 2, 2, 2, 1]
    np.testing.assert_allclose(mps_to_vector(mps), idft2(Spectrum(4, c)).ravel(), atol=1e-12)


def test_empty_spectrum_errors():
    with pytest.raises(ValueError):
        spectrum_to_mps(Spectrum(2, np.zeros((4, 4))))


def test_mps_matches_truncated_image_compression(rng):
    g = ImageGrid(4, rng.random((16, 16)))
    kept, _ = truncate_spectrum(dft2(g), 2)
    ref = idft2(kept).ravel()
    ref = ref / np.linalg.norm(ref)
    via_svd = mps_to_vector(mps_from_state(ref)[0])
    via_modes = mps_to_vector(spectrum_to_mps(kept))
    assert 1 - fidelity(via_svd, via_modes / np.linalg.norm(via_modes)) < 1e-10


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_hard_cutoff_bond_independent_of_n(n):
    lam = 2
    master = master_spectrum(DecayModel("exp", 1, 0.3, 0.3), 8, seed=4, cutoff=lam)
    folded = alias_fold(master, n)
    mps = spectrum_to_mps(folded, tol=1e-14)
    assert mps.max_bond == 2 * lam + 1
    # folding is the identity on the retained block
    for p in range(-lam, lam + 1):
        for q in range(-lam, lam + 1):
            assert folded.coefficient(p, q) == master[128 + q, 128 + p]


# decay models and folding ------------------------------------------------

def test_decay_model_domains():
    DecayModel("alg", 0.5, 1.24, 1.12)
    DecayModel("exp", 1, 0.2, 0.2)
    for bad in [("alg", 1, 1.0, 1.2), ("exp", 1, 0, 1), ("exp", -1, 1, 1), ("gauss", 1, 1, 1), ("alg", 1, np.nan, 2)]:
        with pytest.raises(ValueError):
            DecayModel(*bad)
    m = DecayModel("algebraic", 2.0, 1.5, 2.0)
    assert m.envelope(1, 3) == pytest.approx(2.0 * 2**-1.5 * 4**-2.0)


def test_fold_exponential_geometric_oracle():
    model = DecayModel("exp", 1.0, 0.2, 0.2)
    master = master_spectrum(model, 9, random_phases=False)
    for n in (2, 3, 4):
        folded = alias_fold(master, n).coeffs.real
        ref = np.outer(fold_exp_closed(0.2, 1 << n), fold_exp_closed(0.2, 1 << n))
        np.testing.assert_allclose(folded, ref, rtol=1e-10)


def test_fold_algebraic_oracle():
    for n in (2, 3, 4):
        np.testing.assert_allclose(alg_fold_envelope(1.2, n), fold_alg_direct(1.2, 1 << n), rtol=1e-12)


def test_fold_resolution_family():
    model = DecayModel("exp", 1.0, 0.5, 0.5)
    master = master_spectrum(model, 9, seed=3)
    a, b = alias_fold(master, 5), alias_fold(master, 6)
    diff = max(abs(a.coefficient(p, q) - b.coefficient(p, q)) for p in range(-3, 4) for q in range(-3, 4))
    assert diff < 10 * np.exp(-0.5 * 16)


def test_alias_fold_errors():
    with pytest.raises(ValueError):
        alias_fold(np.zeros((8, 8)), 3)
    with pytest.raises(ValueError):
        alias_fold(np.zeros((12, 12)), 2)


def test_fold_preserves_total_sum(rng):
    master = rng.normal(size=(32, 32)) + 0j
    assert alias_fold(master, 3).coeffs.sum() == pytest.approx(master.sum())


def test_hermitian_symmetrize_gives_real_images(rng):
    c = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    sym = hermitian_symmetrize(c)
    assert np.max(np.abs(idft2(Spectrum(4, sym)).imag)) < 1e-12
    np.testing.assert_allclose(hermitian_symmetrize(sym), sym)


# Hurwitz zeta ------------------------------------------------------------

def test_zeta_classical_values():
    assert hurwitz_zeta(2, 1) == pytest.approx(np.pi**2 / 6, rel=1e-13)
    assert hurwitz_zeta(2, 0.5) == pytest.approx(np.pi**2 / 2, rel=1e-13)
    assert hurwitz_zeta(4, 1) == pytest.approx(np.pi**4 / 90, rel=1e-13)


def test_zeta_against_mpmath():
    for s in (1.01, 1.12, 1.2, 2.4, 5.0):
        for a in (1e-3, 0.5, 1.0, 3.7, 150.0):
            assert hurwitz_zeta(s, a) == pytest.approx(float(mp.zeta(s, a)), rel=1e-12)


def test_zeta_domain_and_vectorization():
    with pytest.raises(ValueError):
        hurwitz_zeta(1.0, 1.0)
    with pytest.raises(ValueError):
        hurwitz_zeta(2.0, 0.0)
    a = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(hurwitz_zeta(2.0, a), [hurwitz_zeta(2.0, x) for x in a])
    assert harmonic_number(2.0, 3) == pytest.approx(1 + 1 / 4 + 1 / 9)


@settings(max_examples=1000, deadline=None)
@given(s=st.floats(1.01, 8.0), a=st.floats(1e-3, 200.0))
def test_zeta_telescoping(s, a):
    lhs = hurwitz_zeta(s, a) - hurwitz_zeta(s, a + 1)
    assert lhs == pytest.approx(a ** (-s), rel=1e-10, abs=1e-300)


# closed-form discarded weights -------------------------------------------

def test_exp_axis_sums_direct():
    for rate, n in [(0.2, 5), (0.2, 8), (1.5, 4), (0.01, 6)]:
        N = 1 << n
        s2 = fold_exp_closed(rate, N) ** 2
        k = np.abs(frequencies(N))
        for lam in (0, 1, N // 4, N // 2 - 1):
            appr, disc = exp_axis_sums(rate, n, lam)
            assert appr == pytest.approx(s2[k <= lam].sum(), rel=1e-12)
            assert disc == pytest.approx(s2[k > lam].sum(), rel=1e-9, abs=1e-300)


@pytest.mark.parametrize("n", [5, 6, 7, 8])
def test_exp_weight_matches_folded_master(n):
    model = DecayModel("exp", 1.0, 0.2, 0.2)
    master = master_spectrum(model, 9, random_phases=False)
    folded = np.abs(alias_fold(master, n).coeffs) ** 2
    k = np.abs(frequencies(1 << n))
    for lam in range(0, min(31, (1 << (n - 1)) - 1) + 1, 3):
        keep = k <= lam
        brute = folded[~(keep[:, None] & keep[None, :])].sum()
        assert discarded_weight_exponential(model, n, lam) == pytest.approx(brute, rel=1e-8)


@pytest.mark.parametrize("n", [5, 6, 7])
def test_alg_weight_matches_brute_force(n):
    model = DecayModel("alg", 1.0, 1.2, 1.2)
    su = fold_alg_direct(1.2, 1 << n)
    for lam in (0, 2, 7, (1 << (n - 1)) - 1):
        brute = disc_weight_2d(1.0, su, su, lam)
        assert discarded_weight_algebraic(model, n, lam) == pytest.approx(brute, rel=1e-6)
        assert discarded_weight_algebraic(model, n, lam, form="harmonic") >= brute


def test_alg_asymmetric_exponents():
    model = DecayModel("alg", 0.5, 1.24, 1.12)
    n, lam = 5, 3
    brute = disc_weight_2d(0.5, fold_alg_direct(1.24, 32), fold_alg_direct(1.12, 32), lam)
    assert discarded_weight_algebraic(model, n, lam) == pytest.approx(brute, rel=1e-6)
    assert np.isfinite(bound(model, 8, 31, 1.0))


def test_alg_harmonic_form_sums():
    appr_e, disc_e = alg_axis_sums(1.2, 6, 3)
    appr_h, disc_h = alg_axis_sums(1.2, 6, 3, form="harmonic")
    assert appr_h >= appr_e and disc_h >= disc_e
    with pytest.raises(ValueError):
        alg_axis_sums(1.2, 6, 3, form="asymptotic")


def test_bound_domains():
    with pytest.raises(ValueError):
        bound_exponential(DecayModel("exp", 1, 0.2, 0.2), 3, 4, 1.0)
    with pytest.raises(ValueError):
        bound_algebraic(DecayModel("alg", 1, 1.2, 1.2), 3, 1, 0.0)
    with pytest.raises(ValueError):
        discarded_weight_algebraic(DecayModel("exp", 1, 0.2, 0.2), 3, 1)
    with pytest.raises(ValueError):
        discarded_weight_exponential(DecayModel("alg", 1, 1.2, 1.2), 3, 1)


@pytest.mark.parametrize("model", [DecayModel("exp", 1, 0.2, 0.2), DecayModel("alg", 1, 1.2, 1.2)])
def test_bound_monotone_in_lambda(model):
    vals = [bound(model, 7, lam, 1.0) for lam in range(0, 64)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert bound(model, 1, 0, 1.0) > 0


def test_bound_chain_small_sweep():
    model = DecayModel("exp", 1.0, 0.3, 0.3)
    master = master_spectrum(model, 7, seed=11)
    for n in (4, 5):
        spec = alias_fold(master, n)
        f = idft2(spec).ravel()
        f = f / np.linalg.norm(f)
        for lam in range(0, (1 << (n - 1))):
            kept, _ = truncate_spectrum(spec, lam)
            g = idft2(kept).ravel()
            ferr = two_norm_distance(f, g / np.linalg.norm(g))
            frob = 2 * np.linalg.norm(spec.coeffs - kept.coeffs) / kept.norm
            assert ferr <= frob + 1e-12
            assert frob <= bound(model, n, lam, kept.norm) + 1e-12
            _, rep = mps_from_state(f, 2 * lam + 1)
            assert rep.two_norm_distance <= ferr + 1e-12


@settings(max_examples=1000, deadline=None)
@given(n=st.integers(2, 7), frac=st.floats(0, 1), which=st.booleans(), ra=st.floats(0.05, 3), rb=st.floats(0.05, 3))
def test_discarded_weight_identity(n, frac, which, ra, rb):
    # all - appr = disc, checked against the per-axis sums
    lam = int(frac * ((1 << (n - 1)) - 1))
    if which:
        model = DecayModel("exp", 1.0, ra, rb)
        ax, bx = exp_axis_sums(ra, n, lam), exp_axis_sums(rb, n, lam)
        w = discarded_weight_exponential(model, n, lam)
    else:
        model = DecayModel("alg", 1.0, 1 + ra, 1 + rb)
        ax, bx = alg_axis_sums(1 + ra, n, lam), alg_axis_sums(1 + rb, n, lam)
        w = discarded_weight_algebraic(model, n, lam)
    total = (ax[0] + ax[1]) * (bx[0] + bx[1])
    assert w == pytest.approx(total - ax[0] * bx[0], rel=1e-8, abs=1e-13 * total)
    assert w >= 0


# DCT ---------------------------------------------------------------------

def test_dct_constant_grid():
    f = np.full((4, 4), 0.7)
    for c in (dct_type1(f), dct_type2(f)):
        assert c[0, 0] == pytest.approx(0.7)
        c[0, 0] = 0
        assert np.max(np.abs(c)) < 1e-14


def test_dct_round_trips(rng):
    f = rng.random((8, 8))
    np.testing.assert_allclose(idct_type1(dct_type1(f)), f, atol=1e-12)
    np.testing.assert_allclose(idct_type2(dct_type2(f)), f, atol=1e-12)


def _signed_view(ext):
    off = ext.offset
    return lambda q, p: ext.coeffs[q + off, p + off]


def test_dct1_dual_path(rng):
    f = rng.random((4, 4))
    ext = dct_extend_type1(f)
    direct = dct_type1(f)
    assert ext.h.shape == (6, 6)
    at = _signed_view(ext)
    for q in range(-3, 3):
        for p in range(-3, 3):
            assert abs(at(q, p) - direct[abs(q), abs(p)]) < 1e-12
    # h_ab = f_|a|,|b|
    assert ext.h[ext.offset - 2, ext.offset + 1] == f[2, 1]


def test_dct2_dual_path_and_zeros(rng):
    f = rng.random((4, 4))
    ext = dct_extend_type2(f)
    direct = dct_type2(f)
    assert ext.h.shape == (8, 8)
    at = _signed_view(ext)
    for q in range(-3, 4):
        for p in range(-3, 4):
            assert abs(at(q, p) - direct[abs(q), abs(p)]) < 1e-12
    np.testing.assert_allclose(ext.coeffs[0], 0, atol=1e-15)
    np.testing.assert_allclose(ext.coeffs[:, 0], 0, atol=1e-15)
    assert ext.h[ext.offset - 1, ext.offset - 3] == f[0, 2]


def test_dct_matches_scipy(rng):
    from scipy.fft import dctn

    f = rng.random((8, 8))
    np.testing.assert_allclose(dct_type1(f), dctn(f, type=1) / (2 * 7) ** 2, atol=1e-14)
    np.testing.assert_allclose(dct_type2(f), dctn(f, type=2) / 16**2, atol=1e-14)


# synthetic corpora -------------------------------------------------------

def test_synthetic_corpus_shapes_and_determinism():
    model = DecayModel("alg", 1.0, 1.2, 1.2)
    a = synthetic_corpus(model, [3, 4], 3, seed=5, master_log=6)
    b = synthetic_corpus(model, [3, 4], 3, seed=5, master_log=6)
    assert [g.n for g in a[4]] == [4, 4, 4]
    assert all(x == y for x, y in zip(a[3], b[3]))
    for g in a[3]:
        assert g.pixels.min() == 0.0 and g.pixels.max() == 1.0


def test_hard_cutoff_image_spectrum():
    g = hard_cutoff_image(2, 5, seed=1)
    s = dft2(g)
    k = np.abs(frequencies(32))
    outside = ~((k <= 2)[:, None] & (k <= 2)[None, :])
    assert np.max(np.abs(s.coeffs[outside])) < 1e-14
    with pytest.raises(ValueError):
        hard_cutoff_image(2, 2)
