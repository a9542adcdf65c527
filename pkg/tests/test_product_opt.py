import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import is_completely_product_oracle, real_grid_product_overlap
from uiscert import (ConstraintOutsideSubspace, NonOrthonormalBasis, NotFound,
                     ProductSearchBudget, ProductWitness, PureState, basis_state,
                     best_product_approximation, ket, product_state_in_subspace,
                     random_product_state, random_state, w_state)
from uiscert.product_opt import rank_one_sweeps
from uiscert.rng import haar_vector, substream
from uiscert.schmidt import schmidt_coefficients
from uiscert.ueb import build_w_ueb

BELL_ORACLE = real_grid_product_overlap(ket({"00": 1, "11": 1}, [2, 2]).amps, 2)
W_ORACLE = real_grid_product_overlap(w_state().amps, 3)


def test_oracles_match_closed_forms():
    assert BELL_ORACLE == pytest.approx(0.5, abs=1e-6)
    assert W_ORACLE == pytest.approx(4 / 9, abs=1e-6)


def test_product_input():
    w = best_product_approximation(basis_state("000", [2, 2, 2]))
    assert w.objective == pytest.approx(1.0, abs=1e-12)


def test_bell_and_w():
    bell = ket({"00": 1, "11": 1}, [2, 2])
    assert best_product_approximation(bell).objective == pytest.approx(BELL_ORACLE, abs=1e-6)
    assert best_product_approximation(w_state()).objective == pytest.approx(W_ORACLE, abs=1e-6)


def test_witness_objective_is_overlap():
    psi = random_state([2, 3, 2], 5)
    w = best_product_approximation(psi)
    assert abs(w.state.inner(psi)) ** 2 == pytest.approx(w.objective, abs=1e-12)
    assert is_completely_product_oracle(w.state.amps, [2, 3, 2])


@pytest.mark.parametrize("dims", [[2, 2], [2, 3], [3, 4], [2, 5]])
def test_bipartite_agreement(dims):
    for seed in range(25):
        psi = random_state(dims, seed)
        top = schmidt_coefficients(psi, [0])[0] ** 2
        assert best_product_approximation(psi).objective == pytest.approx(top, abs=1e-8)


@given(st.integers(0, 10**9), st.sampled_from([[2, 2, 2], [3, 2, 2], [2, 2, 2, 2]]))
def test_rank_one_monotone(seed, dims):
    psi = random_state(dims, seed)
    rng = substream(seed, 9)
    _, hist = rank_one_sweeps(psi.tensor, [haar_vector(rng, d) for d in dims], 200, 1e-14)
    assert np.all(np.diff(hist) >= -1e-13)
    assert 0 <= hist[-1] <= 1 + 1e-12


def test_determinism():
    psi = random_state([2, 2, 2], 11)
    b = ProductSearchBudget(restarts=8, seed=3)
    w1, w2 = best_product_approximation(psi, b), best_product_approximation(psi, b)
    assert w1.objective == w2.objective and np.array_equal(w1.state.amps, w2.state.amps)


def test_budget_validation():
    with pytest.raises(ValueError):
        ProductSearchBudget(restarts=0)
    with pytest.raises(ValueError):
        ProductSearchBudget(conv_tol=0)


def test_subspace_w_complement_feasible():
    res = product_state_in_subspace([basis_state("011", [2, 2, 2]),
                                     basis_state("111", [2, 2, 2])])
    assert isinstance(res, ProductWitness)
    t = res.state.amps
    assert abs(t[3]) ** 2 + abs(t[7]) ** 2 == pytest.approx(1, abs=1e-12)


def test_subspace_single_entangled_ray():
    assert isinstance(product_state_in_subspace([w_state()]), NotFound)


def test_subspace_w_ueb_infeasible():
    s = build_w_ueb()
    res = product_state_in_subspace([s.members[0]] + list(s.complement_basis), s.members[0])
    assert isinstance(res, NotFound)


def test_subspace_errors():
    a = basis_state("00", [2, 2])
    with pytest.raises(NonOrthonormalBasis):
        product_state_in_subspace([a, a])
    with pytest.raises(ConstraintOutsideSubspace):
        product_state_in_subspace([a], basis_state("11", [2, 2]))


def test_subspace_constraint_forces_retry():
    # span{|00>, |11>, |01>}: products are plentiful; require overlap with |11>
    b = [basis_state(x, [2, 2]) for x in ("00", "01", "11")]
    res = product_state_in_subspace(b, b[2])
    assert isinstance(res, ProductWitness)
    assert abs(res.state.inner(b[2])) > 1e-7


def _random_subspace_with_product(seed, dims, k):
    rng = np.random.default_rng(seed)
    p = random_product_state(dims, seed).amps
    d = int(np.prod(dims))
    extra = rng.standard_normal((d, k - 1)) + 1j * rng.standard_normal((d, k - 1))
    q, _ = np.linalg.qr(np.column_stack([p, extra]))
    # rotate the basis so the product is not a basis vector
    u, _ = np.linalg.qr(rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)))
    q = q @ u
    return [PureState(dims, q[:, i]) for i in range(k)], PureState(dims, p)


@pytest.mark.parametrize("chunk", range(4))
def test_planted_feasible_instances(chunk):
    dims_list = [[2, 2, 2], [3, 2, 2], [2, 3], [2, 2, 2, 2]]
    for i in range(25):
        seed = 100 * chunk + i
        dims = dims_list[i % 4]
        basis, planted = _random_subspace_with_product(seed, dims, 2 + i % 2)
        res = product_state_in_subspace(basis, planted, ProductSearchBudget(seed=seed))
        assert isinstance(res, ProductWitness), (seed, dims)
        mat = np.column_stack([b.amps for b in basis])
        v = res.state.amps
        assert np.linalg.norm(v - mat @ (mat.conj().T @ v)) <= 1e-9
        assert is_completely_product_oracle(v, dims)
        assert abs(np.vdot(planted.amps, v)) > 1e-7
