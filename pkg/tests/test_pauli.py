import numpy as np
import pytest
from hypothesis import given, strategies as st

from phi4lat.occ_model import number_power
from phi4lat.pauli import (PauliSum, commutator_norm, is_hermitian, restricted, spectral_norm,
                           to_dense, unary_basis)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2)
LETTERS = {"X": X, "Y": Y, "Z": Z}


def kron_string(key, n):
    """Reference dense Pauli string with qubit 0 least significant."""
    mats = [I2] * n
    for q, p in key:
        mats[q] = LETTERS[p]
    out = np.array([[1.0]])
    for m in reversed(mats):
        out = np.kron(out, m)
    return out


def test_single_z():
    assert np.allclose(to_dense(PauliSum({((0, "Z"),): 1.0}, 1)), np.diag([1, -1]))


def test_hopping_block():
    ps = PauliSum({((0, "X"), (1, "X")): 0.5, ((0, "Y"), (1, "Y")): 0.5}, 2)
    want = np.zeros((4, 4))
    want[1, 2] = want[2, 1] = 1
    assert np.allclose(to_dense(ps), want)


keys = st.lists(st.tuples(st.integers(0, 2), st.sampled_from("XYZ")), max_size=3,
                unique_by=lambda t: t[0]).map(lambda l: tuple(sorted(l)))


@given(st.dictionaries(keys, st.floats(-2, 2), max_size=5))
def test_to_dense_matches_kron(terms):
    ps = PauliSum(terms, 3)
    want = sum((c * kron_string(k, 3) for k, c in ps.items()), np.zeros((8, 8)))
    assert np.allclose(to_dense(ps, 3), want)


@given(st.dictionaries(keys, st.floats(-2, 2), max_size=4),
       st.dictionaries(keys, st.floats(-2, 2), max_size=4))
def test_product_is_matrix_product(a, b):
    A, B = PauliSum(a, 3), PauliSum(b, 3)
    assert np.allclose(to_dense(A * B, 3), to_dense(A, 3) @ to_dense(B, 3))


def test_commutator_examples():
    z0 = PauliSum({((0, "Z"),): 1.0}, 2)
    z1 = PauliSum({((1, "Z"),): 1.0}, 2)
    x0 = PauliSum({((0, "X"),): 1.0}, 2)
    assert commutator_norm(z0, z1) == pytest.approx(0)
    assert commutator_norm(x0, z0) == pytest.approx(2)


def test_spectral_norm_examples():
    assert spectral_norm(PauliSum({((0, "Z"),): 1.0}, 1)) == pytest.approx(1)
    n_op = number_power(0, 1, 3)
    assert spectral_norm(n_op, "unary", 4, 1) == pytest.approx(3)


def test_unary_basis():
    b = unary_basis(2, 2)
    assert sorted(b.tolist()) == [0b0101, 0b0110, 0b1001, 0b1010]


def test_text_round_trip():
    ps = PauliSum({((0, "X"), (2, "Z")): 0.25, (): -1.5}, 3)
    back = PauliSum.from_text(ps.to_text(), 3)
    assert np.allclose(to_dense(back, 3), to_dense(ps, 3))


def test_restricted_unary_is_hermitian():
    ps = number_power(0, 2, 2, 6) + number_power(1, 1, 2, 6)
    assert is_hermitian(restricted(ps, "unary", 3, 2))
