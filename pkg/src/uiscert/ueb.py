"""Unextendible entangled bases and unambiguous local identification.

A member of a set can be identified unambiguously by LOCC with nonzero
probability iff some completely product state is nonorthogonal to it and
orthogonal to every other member, i.e. lies in
``span(target, complement)`` with nonzero target overlap.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .certify import UISCertificate, certify_uis
from .errors import IndexOutOfRange, NonOrthonormalBasis
from .product_opt import (NotFound, ProductSearchBudget, ProductWitness,
                          product_state_in_subspace)
from .rng import substream
from .schmidt import SepTag, product_factors, separability_class
from .states import HilbertDims, PureState, basis_state, ket

OMEGA = np.exp(2j * np.pi / 3)
_PHASES = ((1, 1, 1), (1, OMEGA, OMEGA**2), (1, OMEGA**2, OMEGA))


@dataclass(frozen=True, eq=False)
class StateSet:
    dims: HilbertDims
    members: tuple
    complement_basis: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "dims", HilbertDims(self.dims))
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "complement_basis", tuple(self.complement_basis))

    def all_vectors(self) -> np.ndarray:
        return np.column_stack([s.amps for s in self.members + self.complement_basis])

    def orthonormality_error(self) -> float:
        mat = self.all_vectors()
        return float(np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[1]))))


def _triple(labels, phases, dims):
    return ket(dict(zip(labels, phases)), dims)


def build_w_ueb() -> StateSet:
    """Six W-type states on three qubits with complement ``span{|011>, |111>}``."""
    dims = [2, 2, 2]
    members = [_triple(("001", "010", "100"), ph, dims) for ph in _PHASES]
    members += [_triple(("000", "101", "110"), ph, dims) for ph in _PHASES]
    complement = [basis_state("011", dims), basis_state("111", dims)]
    return StateSet(HilbertDims(dims), members, complement, "w-ueb")


# product-state triples carrying psi_1..psi_18, three states per triple
THREE_UEB_TRIPLES = (
    ("000", "011", "122"),
    ("100", "111", "022"),
    ("001", "012", "120"),
    ("101", "112", "020"),
    ("002", "010", "121"),
    ("102", "110", "021"),
)
THREE_UEB_PARTNERS = ("200", "211", "201", "220", "210", "221")
THREE_UEB_COMPLEMENT = ("222", "212", "202")


def three_ueb_psi() -> list:
    """The eighteen states ``psi_1 .. psi_18`` (phases 1, w, w^2 over each triple)."""
    dims = [3, 3, 3]
    return [_triple(tr, ph, dims) for tr in THREE_UEB_TRIPLES for ph in _PHASES]


def build_3ueb() -> StateSet:
    """24-member UEB in three qutrits.

    Order: ``(psi_j + partner_j)/sqrt2, (psi_j - partner_j)/sqrt2`` for
    ``j = 1..6``, then ``psi_7 .. psi_18``.
    """
    dims = HilbertDims([3, 3, 3])
    psi = three_ueb_psi()
    members = []
    for j, label in enumerate(THREE_UEB_PARTNERS):
        partner = basis_state(label, dims).amps
        for sign in (1, -1):
            members.append(PureState(dims, (psi[j].amps + sign * partner) / np.sqrt(2)))
    members += psi[6:]
    complement = [basis_state(label, dims) for label in THREE_UEB_COMPLEMENT]
    return StateSet(dims, members, complement, "3-ueb")


class Purity(str, enum.Enum):
    PROVEN = "PROVEN"
    SAMPLED = "SAMPLED"
    FAILED = "FAILED"


@dataclass
class UEBReport:
    orthonormality_error: float
    spans_space: bool
    member_classes: list
    complement_product: list
    purity: Purity
    free_party: Optional[int]
    samples: int
    sample_failures: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def common_factor_party(vectors: Sequence[PureState], tol: float = 1e-10) -> Optional[int]:
    """Party ``k`` such that all vectors share their factors on every other party.

    Then the span is (anything on ``k``) (x) fixed product, so every state
    in it is completely product. Returns ``None`` if no such party exists
    or some vector is not completely product.
    """
    if not vectors:
        return None
    facs = []
    for v in vectors:
        blocks = product_factors(v)
        if len(blocks) != v.n:
            return None
        facs.append([st.amps for _, st in blocks])
    n = vectors[0].n
    for k in range(n):
        if all(abs(abs(np.vdot(f[j], facs[0][j])) - 1) <= tol
               for f in facs[1:] for j in range(n) if j != k):
            return k
    return None


def verify_ueb(s: StateSet, samples: int = 1000, seed: int = 0) -> UEBReport:
    failures = []
    err = s.orthonormality_error()
    if err > 1e-10:
        failures.append(f"orthonormality error {err:.3e} exceeds 1e-10")
    spans = len(s.members) + len(s.complement_basis) == s.dims.total
    if not spans:
        failures.append("members and complement do not span the space")
    classes = [separability_class(m).tag for m in s.members]
    for i, tag in enumerate(classes):
        if tag is SepTag.COMPLETELY_PRODUCT:
            failures.append(f"member {i} is not entangled")
    comp_prod = [separability_class(c).tag is SepTag.COMPLETELY_PRODUCT
                 for c in s.complement_basis]
    for i, ok in enumerate(comp_prod):
        if not ok:
            failures.append(f"complement vector {i} is not completely product")

    bad = 0
    if s.complement_basis:
        mat = np.column_stack([c.amps for c in s.complement_basis])
        rng = substream(seed, 606)
        k = mat.shape[1]
        for _ in range(samples):
            z = rng.standard_normal(k) + 1j * rng.standard_normal(k)
            v = PureState(s.dims, mat @ (z / np.linalg.norm(z)))
            if separability_class(v).tag is not SepTag.COMPLETELY_PRODUCT:
                bad += 1
    if bad:
        failures.append(f"{bad}/{samples} complement samples are entangled")
    free = common_factor_party(list(s.complement_basis)) if all(comp_prod) else None
    if bad or not all(comp_prod):
        purity = Purity.FAILED
    elif free is not None or not s.complement_basis:
        purity = Purity.PROVEN
    else:
        purity = Purity.SAMPLED
    return UEBReport(err, spans, classes, comp_prod, purity, free, samples, bad, failures)


class Discrimination(str, enum.Enum):
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True, eq=False)
class DiscriminationVerdict:
    target_index: int
    verdict: Discrimination
    witness: Optional[ProductWitness] = None
    certificate: Optional[UISCertificate] = None
    reason: str = ""
    search: Optional[NotFound] = None


def _check_witness(s: StateSet, target: int, p: PureState, tol: float = 1e-9) -> bool:
    if separability_class(p).tag is not SepTag.COMPLETELY_PRODUCT:
        return False
    others = [m for i, m in enumerate(s.members) if i != target]
    if any(abs(m.inner(p)) > tol for m in others):
        return False
    return abs(s.members[target].inner(p)) > 1e-7


def unambiguous_locc_feasible(s: StateSet, target: int,
                              budget: ProductSearchBudget = ProductSearchBudget(),
                              purity: Optional[Purity] = None) -> DiscriminationVerdict:
    """Decide whether member ``target`` is unambiguously identifiable by LOCC.

    INFEASIBLE is issued only on proof: the target carries a positive
    superposition certificate and the complement span is provably all
    product (or empty). FEASIBLE comes with a verified product witness.
    """
    if not 0 <= target < len(s.members):
        raise IndexOutOfRange(f"target {target} outside 0..{len(s.members) - 1}")
    psi = s.members[target]
    if separability_class(psi).tag is SepTag.COMPLETELY_PRODUCT:
        w = ProductWitness(psi, 1.0)
        if _check_witness(s, target, psi):
            return DiscriminationVerdict(target, Discrimination.FEASIBLE, witness=w,
                                         reason="target is itself completely product")
    if not s.complement_basis:
        return DiscriminationVerdict(target, Discrimination.INFEASIBLE,
                                     reason="span(target) holds only the entangled target")
    if purity is None:
        free = common_factor_party(list(s.complement_basis))
        purity = Purity.PROVEN if free is not None else Purity.SAMPLED
    cert = certify_uis(psi, budget)
    if cert.positive and purity is Purity.PROVEN:
        return DiscriminationVerdict(
            target, Discrimination.INFEASIBLE, certificate=cert,
            reason="every product state of span(target, complement) nonorthogonal to the "
                   "target would be a nontrivial superposition of the target with a "
                   "product state")
    try:
        found = product_state_in_subspace([psi] + list(s.complement_basis), psi, budget)
    except NonOrthonormalBasis:
        found = NotFound(0, 0.0, "set is not orthonormal")
    if isinstance(found, ProductWitness) and _check_witness(s, target, found.state):
        return DiscriminationVerdict(target, Discrimination.FEASIBLE, witness=found,
                                     certificate=cert)
    return DiscriminationVerdict(target, Discrimination.INCONCLUSIVE, certificate=cert,
                                 search=found if isinstance(found, NotFound) else None)
