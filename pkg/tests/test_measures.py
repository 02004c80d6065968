import math

import numpy as np
import pytest

from cfmac import (
    ConditionedJoint,
    JointPmf,
    Pmf,
    binary_entropy,
    chi2_divergence,
    conditional_mutual_information,
    entropy,
    kl_divergence,
    l1_distance,
    mutual_information,
)
from cfmac.errors import AlphabetMismatchError, InvalidPmfError, OutOfRangeError

LN2 = math.log(2.0)

# Frozen by hand: H(1/3) = log2(3) - 2/3.
H_ONE_THIRD = 0.9182958340544896


def test_entropy_known_values():
    assert entropy([0.5, 0.5]) == pytest.approx(1.0, abs=1e-15)
    assert entropy([1.0, 0.0]) == 0.0
    assert entropy([1 / 3, 2 / 3]) == pytest.approx(H_ONE_THIRD, abs=1e-12)
    assert entropy(np.full(8, 1 / 8)) == pytest.approx(3.0, abs=1e-12)


def test_entropy_accepts_pmf_and_matrices():
    assert entropy(Pmf(np.array([0.25, 0.75]))) == pytest.approx(
        binary_entropy(0.25), abs=1e-15
    )
    # A 2-D mass is treated as a distribution over the product alphabet.
    assert entropy(np.full((2, 2), 0.25)) == pytest.approx(2.0, abs=1e-15)


def test_binary_entropy_edges_and_range():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(1 / 3) == pytest.approx(H_ONE_THIRD, abs=1e-12)
    with pytest.raises(OutOfRangeError):
        binary_entropy(-0.1)
    with pytest.raises(OutOfRangeError):
        binary_entropy(1.1)


def test_kl_known_values():
    assert kl_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(1.0, abs=1e-15)
    assert kl_divergence([0.5, 0.5], [0.5, 0.5]) == 0.0
    assert kl_divergence([0.5, 0.5], [1.0, 0.0]) == math.inf


def test_chi2_known_values():
    assert chi2_divergence([0.75, 0.25], [0.5, 0.5]) == pytest.approx(0.25, abs=1e-15)
    assert chi2_divergence([0.5, 0.5], [0.5, 0.5]) == 0.0
    assert chi2_divergence([0.5, 0.5], [1.0, 0.0]) == math.inf
    # Zero q-cell is fine while p puts no mass there.
    assert chi2_divergence([1.0, 0.0], [1.0, 0.0]) == 0.0


def test_divergences_nonnegative_and_pinsker():
    rng = np.random.default_rng(11)
    for _ in range(50):
        p = rng.dirichlet(np.ones(6))
        q = rng.dirichlet(np.ones(6))
        d = kl_divergence(p, q)
        l1 = l1_distance(p, q)
        assert d >= 0.0
        assert chi2_divergence(p, q) >= 0.0
        assert d >= l1 * l1 / (2.0 * LN2) - 1e-12


def test_kl_chi2_small_perturbation_limit():
    # D(p + t v || p) ~ chi2(p + t v || p) / (2 ln 2) as t -> 0.
    p = np.array([0.4, 0.35, 0.25])
    v = np.array([1.0, -2.0, 1.0])
    t = 1e-5
    d = kl_divergence(p + t * v, p)
    c = chi2_divergence(p + t * v, p)
    assert d == pytest.approx(c / (2.0 * LN2), rel=1e-4)


def test_mutual_information_identities():
    rng = np.random.default_rng(3)
    for _ in range(20):
        j = rng.dirichlet(np.ones(12)).reshape(3, 4)
        pa, pb = j.sum(axis=1), j.sum(axis=0)
        want = entropy(pa) + entropy(pb) - entropy(j)
        assert mutual_information(j) == pytest.approx(want, abs=1e-12)
        # MI equals KL from the joint to the product of its marginals.
        assert mutual_information(j) == pytest.approx(
            kl_divergence(j.ravel(), np.outer(pa, pb).ravel()), abs=1e-12
        )
    assert mutual_information(np.full((2, 2), 0.25)) == 0.0
    assert mutual_information(np.diag([0.5, 0.5])) == pytest.approx(1.0, abs=1e-15)


def test_conditional_mutual_information_mixes_components():
    ind = np.full((2, 2), 0.25)
    dep = np.diag([0.5, 0.5])
    cj = ConditionedJoint(np.array([0.25, 0.75]), np.stack([ind, dep]))
    assert conditional_mutual_information(cj) == pytest.approx(0.75, abs=1e-12)
    # Zero-weight components contribute nothing even if maximally dependent.
    cj0 = ConditionedJoint(np.array([1.0, 0.0]), np.stack([ind, dep]))
    assert conditional_mutual_information(cj0) == 0.0


def test_joint_pmf_marginals():
    j = JointPmf(np.array([[0.1, 0.2], [0.3, 0.4]]))
    np.testing.assert_allclose(j.marginal_a().probs, [0.3, 0.7])
    np.testing.assert_allclose(j.marginal_b().probs, [0.4, 0.6])
    assert j.shape == (2, 2)


def test_conditioned_joint_average():
    cj = ConditionedJoint(
        np.array([0.5, 0.5]),
        np.stack([np.diag([0.5, 0.5]), np.full((2, 2), 0.25)]),
    )
    np.testing.assert_allclose(cj.joint(), [[0.375, 0.125], [0.125, 0.375]])
    assert cj.u_size == 2


def test_pmf_validation():
    with pytest.raises(InvalidPmfError):
        Pmf(np.array([0.5, 0.6]))  # mass 1.1
    with pytest.raises(InvalidPmfError):
        Pmf(np.array([1.5, -0.5]))  # negative entry
    with pytest.raises(InvalidPmfError):
        Pmf(np.array([[0.5], [0.5]]))  # not 1-D
    with pytest.raises(InvalidPmfError):
        JointPmf(np.array([0.5, 0.5]))  # not 2-D
    with pytest.raises(InvalidPmfError):
        ConditionedJoint(np.array([0.7, 0.3]), np.full((3, 2, 2), 0.25))
    with pytest.raises(InvalidPmfError):
        mutual_information(np.array([0.5, 0.5]))


def test_pmf_arrays_are_read_only():
    p = Pmf(np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        p.probs[0] = 1.0


def test_size_mismatch():
    with pytest.raises(AlphabetMismatchError):
        kl_divergence([0.5, 0.5], [0.25, 0.25, 0.5])
    with pytest.raises(AlphabetMismatchError):
        l1_distance([1.0], [0.5, 0.5])
