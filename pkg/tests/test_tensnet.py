import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imgmps.encode import StateVector
from imgmps.tensnet import (
    MPS,
    entanglement_profile,
    fidelity,
    mps_from_state,
    mps_to_state,
    mps_to_vector,
    random_mps,
    random_normal_state,
    schmidt_values,
    two_norm_distance,
    write_report_csv,
)

from conftest import random_state

BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)


def _product_state(m, rng):
    vec = np.ones(1)
    for _ in range(m):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        vec = np.kron(vec, v / np.linalg.norm(v))
    return vec


# MPS type ----------------------------------------------------------------

def test_mps_validation():
    with pytest.raises(ValueError):
        MPS([])
    with pytest.raises(ValueError):
        MPS([np.ones((2, 2, 1))])
    with pytest.raises(ValueError):
        MPS([np.ones((1, 2, 2)), np.ones((3, 2, 1))])
    with pytest.raises(ValueError):
        MPS([np.ones((1, 2, 1))], "left")
    with pytest.raises(ValueError):
        MPS([np.ones((1, 2, 1))], "diagonal")


def test_single_tensor_basis_state():
    s = mps_to_state(MPS([np.array([1.0, 0.0]).reshape(1, 2, 1)]))
    np.testing.assert_array_equal(s.amps, [1, 0])


def test_mps_json_round_trip():
    mps = random_mps(5, 3, seed=2)
    obj = json.loads(mps.to_json())
    assert obj["bonds"] == [1, 2, 3, 3, 2, 1]
    back = MPS.from_json(mps.to_json())
    for a, b in zip(mps.tensors, back.tensors):
        np.testing.assert_array_equal(a, b)
    assert back.canonical == "left"


def test_random_mps_gauges():
    assert random_mps(6, 4, seed=1).is_canonical("left")
    right = random_mps(6, 4, seed=1, canonical="right")
    assert right.is_canonical("right")
    np.testing.assert_allclose(np.linalg.norm(mps_to_vector(right)), 1)


# mps_from_state ----------------------------------------------------------

def test_product_state_exact(rng):
    psi = _product_state(6, rng)
    mps, rep = mps_from_state(psi, 1)
    assert rep.infidelity < 1e-14 and rep.total_discarded < 1e-14
    assert mps.max_bond == 1


def test_bell_chi1_infidelity_half():
    _, rep = mps_from_state(BELL, 1)
    assert rep.infidelity == pytest.approx(0.5, abs=1e-14)
    assert rep.discarded_weight == [pytest.approx(0.5)]


def test_random_state_dense_oracle(rng):
    psi = random_state(8, rng)
    mps, rep = mps_from_state(psi, 4)
    approx = mps_to_vector(mps)
    assert rep.infidelity == pytest.approx(1 - abs(np.vdot(psi, approx)) ** 2, abs=1e-14)
    assert mps.max_bond <= 4


def test_lossless_round_trip(rng):
    psi = random_state(9, rng)
    assert fidelity(mps_to_state(mps_from_state(psi)[0]), psi) >= 1 - 1e-12


def test_chi_validation(rng):
    with pytest.raises(ValueError):
        mps_from_state(random_state(3, rng), 0)


def test_oversize_rejected():
    with pytest.raises(ValueError):
        mps_to_vector(MPS([np.ones((1, 2, 1))] * 27))


# entanglement ------------------------------------------------------------

def test_entropy_examples(rng):
    ent, top = entanglement_profile(_product_state(5, rng))
    assert np.all(ent == 0) and top == 0
    ent, top = entanglement_profile(BELL)
    assert ent[0] == pytest.approx(np.log(2))


def test_page_scaling_ten_qubits():
    ent = [entanglement_profile(random_normal_state(10, s))[0][4] for s in range(100)]
    page = 5 * np.log(2) - 0.5
    assert abs(np.mean(ent) - page) / page < 0.1


def test_random_normal_self_consistency():
    vals = []
    for s in range(100):
        psi = random_normal_state(10, s)
        sv = np.linalg.svd(psi.amps.reshape(32, 32), compute_uv=False) ** 2
        vals.append(-np.sum(sv * np.log(sv)))
        assert entanglement_profile(psi)[0][4] == pytest.approx(vals[-1], abs=1e-12)


def test_random_normal_determinism():
    a, b = random_normal_state(6, 3), random_normal_state(6, 3)
    np.testing.assert_array_equal(a.amps, b.amps)
    assert np.all(a.amps.imag == 0)
    assert np.linalg.norm(a.amps) == pytest.approx(1)


# distances ---------------------------------------------------------------

def test_distance_examples(rng):
    psi = random_state(4, rng)
    assert fidelity(psi, psi) == pytest.approx(1)
    assert two_norm_distance(psi, np.exp(0.7j) * psi) < 1e-14
    e0, e1 = np.eye(4)[0], np.eye(4)[1]
    assert fidelity(e0, e1) == 0
    assert two_norm_distance(e0, e1) == pytest.approx(np.sqrt(2))
    with pytest.raises(ValueError):
        fidelity(e0, np.ones(2))
    with pytest.raises(ValueError):
        two_norm_distance(e0, np.ones(2))


def test_report_csv(tmp_path):
    rows = [
        dict(image_id="b", encoding="frqi", indexing="row", n=3, chi=2, infidelity=0.1, two_norm=0.2, max_entropy=1.0),
        dict(image_id="a", encoding="frqi", indexing="row", n=3, chi=2, infidelity=0.1, two_norm=0.2, max_entropy=1.0),
    ]
    write_report_csv(rows, tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "# imgmps compress schema v1"
    assert lines[1].startswith("image_id,encoding,indexing,n,chi")
    assert lines[2].startswith("a,")


# properties --------------------------------------------------------------

@settings(max_examples=1000, deadline=None)
@given(m=st.integers(2, 8), chi=st.integers(1, 8), seed=st.integers(0, 2**31))
def test_discarded_weight_identity(m, chi, seed):
    psi = random_state(m, np.random.default_rng(seed))
    mps, rep = mps_from_state(psi, chi)
    approx = mps_to_vector(mps)
    # unnormalized truncation is the renormalized one rescaled by sqrt(1 - w)
    trunc = approx * np.sqrt(max(0.0, 1 - rep.total_discarded))
    assert abs(two_norm_distance(psi, trunc) ** 2 - rep.total_discarded) < 1e-10
    assert rep.infidelity <= rep.total_discarded + 1e-10
    assert all(w >= 0 for w in rep.discarded_weight) and 0 <= rep.infidelity <= 1
    assert mps.is_canonical("left")


@settings(max_examples=1000, deadline=None)
@given(m=st.integers(2, 8), seed=st.integers(0, 2**31))
def test_infidelity_monotone_in_chi(m, seed):
    psi = random_state(m, np.random.default_rng(seed))
    infid = [mps_from_state(psi, chi)[1].infidelity for chi in (1, 2, 4, 8, 16)]
    assert all(b <= a + 1e-12 for a, b in zip(infid, infid[1:]))


@settings(max_examples=1000, deadline=None)
@given(m=st.integers(2, 8), seed=st.integers(0, 2**31))
def test_norm_preserved_and_profile_stable(m, seed):
    psi = random_state(m, np.random.default_rng(seed))
    back = mps_to_vector(mps_from_state(psi)[0])
    assert abs(np.linalg.norm(back) - 1) < 1e-12
    np.testing.assert_allclose(entanglement_profile(back)[0], entanglement_profile(psi)[0], atol=1e-8)


@settings(max_examples=1000, deadline=None)
@given(m=st.integers(1, 6), seed=st.integers(0, 2**31))
def test_fidelity_distance_relation(m, seed):
    rng = np.random.default_rng(seed)
    x, y = random_state(m, rng), random_state(m, rng)
    f = fidelity(x, y)
    d = two_norm_distance(x, y)
    assert abs(d - np.sqrt(2 * (1 - np.sqrt(f)))) < 1e-10
    # equivalently sqrt(F) = 1 - d^2 / 2
    assert abs(f - (1 - d**2 / 2) ** 2) < 1e-10
    assert abs(f - fidelity(y, x)) < 1e-15


def test_schmidt_values_normalized(rng):
    psi = random_state(6, rng)
    for cut in range(1, 6):
        assert np.sum(schmidt_values(psi, cut) ** 2) == pytest.approx(1)
