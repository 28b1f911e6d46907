import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from msplit.ensembles import random_density
from msplit.entropy import mutual_information, relative_entropy, shannon_entropy, von_neumann_entropy
from msplit.errors import SupportError
from msplit.tensor_core import TensorSpace, projector


def test_shannon_zero_convention():
    assert shannon_entropy([1.0, 0.0, 1e-15]) == 0.0
    assert shannon_entropy([0.5, 0.5]) == pytest.approx(math.log(2))


def test_von_neumann_examples():
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(math.log(4))
    assert von_neumann_entropy(projector(np.array([0.6, 0.8]))) == pytest.approx(0, abs=1e-12)


def test_relative_entropy_support_violation():
    with pytest.raises(SupportError):
        relative_entropy(np.eye(2) / 2, np.diag([1.0, 0.0]))
    assert relative_entropy(np.diag([1.0, 0.0]), np.eye(2) / 2) == pytest.approx(math.log(2))


@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_relative_entropy_nonnegative_and_zero_on_equal(seed, d):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(d, rng), random_density(d, rng)
    assert relative_entropy(rho, sigma) >= -1e-9
    assert abs(relative_entropy(rho, rho)) <= 1e-9


def test_mutual_information_bell_and_product(rng):
    sp = TensorSpace((2, 2))
    bell = projector(np.array([1, 0, 0, 1]) / math.sqrt(2))
    assert mutual_information(bell, sp, [0], [1]) == pytest.approx(2 * math.log(2))
    prod = np.kron(random_density(2, rng), random_density(2, rng))
    assert mutual_information(prod, sp, [0], [1]) == pytest.approx(0, abs=1e-10)
