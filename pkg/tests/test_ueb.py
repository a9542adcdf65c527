import numpy as np
import pytest

from oracles import amps_from_kets, schmidt_rank_oracle
from uiscert import (Discrimination, IndexOutOfRange, NotFound, ProductSearchBudget, Purity,
                     StateSet, basis_state, build_3ueb, build_w_ueb, ket, prop2_structure_check,
                     unambiguous_locc_feasible, verify_ueb)
from uiscert.product_opt import product_state_in_subspace
from uiscert.schmidt import SepTag, is_completely_product
from uiscert.ueb import OMEGA, common_factor_party

W_UEB = build_w_ueb()
UEB3 = build_3ueb()


def rank3_member_set():
    dims = [3, 2, 2]
    triples = [("000", "101", "210"), ("001", "110", "200"), ("010", "100", "201")]
    phases = [(1, 1, 1), (1, OMEGA, OMEGA ** 2), (1, OMEGA ** 2, OMEGA)]
    members = [ket(dict(zip(tr, ph)), dims) for tr in triples for ph in phases]
    comp = [basis_state(x, dims) for x in ("011", "111", "211")]
    return StateSet(dims, members, comp, "rank3-member")


def test_w_ueb_members():
    assert len(W_UEB.members) == 6 and len(W_UEB.complement_basis) == 2
    assert W_UEB.orthonormality_error() <= 1e-12
    expected = amps_from_kets({"001": 1, "010": OMEGA, "100": OMEGA ** 2}, [2, 2, 2])
    assert abs(np.vdot(expected, W_UEB.members[1].amps)) == pytest.approx(1, abs=1e-12)
    for m in W_UEB.members:
        assert prop2_structure_check(m) is not None


def test_w_ueb_verify():
    rep = verify_ueb(W_UEB)
    assert rep.ok and rep.purity is Purity.PROVEN and rep.free_party == 0
    assert all(t is SepTag.GENUINELY_ENTANGLED for t in rep.member_classes)


def test_3ueb_members():
    assert len(UEB3.members) == 24
    assert len(UEB3.members) + len(UEB3.complement_basis) == 27
    assert UEB3.orthonormality_error() <= 1e-12
    psi1 = amps_from_kets({"000": 1, "011": 1, "122": 1}, [3, 3, 3])
    plus = (psi1 + basis_state("200", [3, 3, 3]).amps) / np.sqrt(2)
    assert abs(np.vdot(plus, UEB3.members[0].amps)) == pytest.approx(1, abs=1e-12)
    for m in UEB3.members[12:]:
        assert max(schmidt_rank_oracle(m.amps, [3, 3, 3], [k]) for k in range(3)) == 3


def test_3ueb_verify():
    rep = verify_ueb(UEB3)
    assert rep.ok and rep.purity is Purity.PROVEN and rep.free_party == 1


def test_builders_bit_stable():
    a, b = build_3ueb(), build_3ueb()
    assert all(np.array_equal(x.amps, y.amps) for x, y in zip(a.members, b.members))


@pytest.mark.parametrize("s", [W_UEB, UEB3], ids=["w", "3x3x3"])
def test_proven_purity_survives_many_samples(s):
    rep = verify_ueb(s, samples=10_000, seed=1)
    assert rep.purity is Purity.PROVEN and rep.sample_failures == 0


def test_corrupted_set_flagged():
    members = list(W_UEB.members)
    members[2] = basis_state("101", [2, 2, 2])
    rep = verify_ueb(StateSet(W_UEB.dims, members, W_UEB.complement_basis))
    assert not rep.ok and any("member 2" in f for f in rep.failures)


def test_entangled_complement_fails():
    bell_like = [ket({"00": 1, "11": 1}, [2, 2]), ket({"00": 1, "11": -1}, [2, 2])]
    s = StateSet([2, 2], bell_like[:1], bell_like[1:] + [basis_state("01", [2, 2]),
                                                          basis_state("10", [2, 2])])
    rep = verify_ueb(s, samples=50)
    assert rep.purity is Purity.FAILED and not rep.ok


def test_common_factor_party():
    assert common_factor_party(list(UEB3.complement_basis)) == 1
    assert common_factor_party([basis_state("00", [2, 2]), basis_state("11", [2, 2])]) is None


@pytest.mark.parametrize("target", range(6))
def test_w_ueb_infeasible(target):
    v = unambiguous_locc_feasible(W_UEB, target)
    assert v.verdict is Discrimination.INFEASIBLE and v.certificate.positive


def test_3ueb_infeasible():
    for target in range(24):
        v = unambiguous_locc_feasible(UEB3, target)
        assert v.verdict is Discrimination.INFEASIBLE, target


@pytest.mark.parametrize("s,targets", [(W_UEB, range(6)), (UEB3, range(0, 24, 5))],
                         ids=["w", "3x3x3"])
def test_infeasible_corroborated_by_search(s, targets):
    for t in targets:
        psi = s.members[t]
        res = product_state_in_subspace([psi] + list(s.complement_basis), psi)
        assert isinstance(res, NotFound)


def test_rank3_member_set():
    s = rank3_member_set()
    rep = verify_ueb(s)
    assert rep.ok and rep.purity is Purity.PROVEN
    for t in range(len(s.members)):
        v = unambiguous_locc_feasible(s, t)
        assert v.verdict is Discrimination.INFEASIBLE
        assert v.certificate.verdict.value == "RANK3_CUT"


def test_product_member_is_own_witness():
    members = [ket({"00": 1, "11": 1}, [2, 2]), basis_state("01", [2, 2])]
    comp = [basis_state("10", [2, 2]), ket({"00": 1, "11": -1}, [2, 2])]
    v = unambiguous_locc_feasible(StateSet([2, 2], members, comp), 1)
    assert v.verdict is Discrimination.FEASIBLE
    assert v.witness.state.fidelity(members[1]) == pytest.approx(1)


def test_feasible_by_search():
    bp, bm = ket({"00": 1, "11": 1}, [2, 2]), ket({"00": 1, "11": -1}, [2, 2])
    s = StateSet([2, 2], [bp, bm], [basis_state("01", [2, 2]), basis_state("10", [2, 2])])
    v = unambiguous_locc_feasible(s, 0)
    assert v.verdict is Discrimination.FEASIBLE
    w = v.witness.state
    assert is_completely_product(w)
    assert abs(bp.inner(w)) > 1e-7 and abs(bm.inner(w)) <= 1e-9
    mat = np.column_stack([bp.amps] + [c.amps for c in s.complement_basis])
    assert np.linalg.norm(w.amps - mat @ (mat.conj().T @ w.amps)) <= 1e-9


def test_entangled_complement_blocks_infeasible():
    # span{|00>, |11>} holds entangled states, so no certificate-based verdict
    dims = [2, 2]
    comp = [basis_state("00", [2, 2]), basis_state("11", [2, 2])]
    members = [ket({"01": 1, "10": 1}, dims), ket({"01": 1, "10": -1}, dims)]
    v = unambiguous_locc_feasible(StateSet(dims, members, comp), 0,
                                  ProductSearchBudget(restarts=4))
    assert v.verdict is not Discrimination.INFEASIBLE


def test_target_range():
    with pytest.raises(IndexOutOfRange):
        unambiguous_locc_feasible(W_UEB, 6)
    with pytest.raises(IndexOutOfRange):
        unambiguous_locc_feasible(W_UEB, -1)
