"""Schmidt analysis across cuts and m-separability classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .states import Bipartition, HilbertDims, PureState, all_cuts

RANK_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``psi = sum_i coeffs[i] * left_states[i] (x) right_states[i]``.

    All min(dim_left, dim_right) terms are kept; ``rank`` counts the ones
    above ``tol * coeffs[0]``.
    """

    cut: Bipartition
    coeffs: np.ndarray
    left_states: tuple
    right_states: tuple
    tol: float = RANK_TOL

    @property
    def rank(self) -> int:
        if self.coeffs[0] == 0:
            return 0
        return int(np.sum(self.coeffs > self.tol * self.coeffs[0]))

    def reconstruct(self) -> PureState:
        lp, rp = self.cut.left_parties, self.cut.right_parties
        ldims = [self.left_states[0].dims[i] for i in range(len(lp))]
        rdims = [self.right_states[0].dims[i] for i in range(len(rp))]
        mat = sum(c * np.outer(u.amps, v.amps)
                  for c, u, v in zip(self.coeffs, self.left_states, self.right_states))
        t = np.asarray(mat).reshape(ldims + rdims)
        t = t.transpose(np.argsort(lp + rp))
        return PureState(HilbertDims(t.shape), t.reshape(-1))


def schmidt_decompose(psi: PureState, cut, tol: float = RANK_TOL) -> SchmidtDecomposition:
    cut = _as_cut(cut, psi.n)
    lp, rp = cut.left_parties, cut.right_parties
    mat = psi.matrix(lp)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    ldims = HilbertDims(psi.dims[k] for k in lp)
    rdims = HilbertDims(psi.dims[k] for k in rp)
    left = tuple(PureState(ldims, u[:, i]) for i in range(s.size))
    right = tuple(PureState(rdims, vh[i]) for i in range(s.size))
    return SchmidtDecomposition(cut, s, left, right, tol)


def schmidt_coefficients(psi: PureState, cut) -> np.ndarray:
    cut = _as_cut(cut, psi.n)
    return np.linalg.svd(psi.matrix(cut.left_parties), compute_uv=False)


def schmidt_rank(psi: PureState, cut, tol: float = RANK_TOL) -> int:
    s = schmidt_coefficients(psi, cut)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def second_coefficient(psi: PureState, cut) -> float:
    """Second Schmidt coefficient relative to the first (0 iff product across the cut)."""
    s = schmidt_coefficients(psi, cut)
    return float(s[1] / s[0]) if s.size > 1 else 0.0


def max_second_coefficient(psi: PureState) -> float:
    """Largest relative second Schmidt coefficient over all cuts.

    Zero exactly when ``psi`` is completely product.
    """
    if psi.n < 2:
        return 0.0
    return max(second_coefficient(psi, cut) for cut in all_cuts(psi.n))


def _as_cut(cut, n: int) -> Bipartition:
    if isinstance(cut, Bipartition):
        return cut
    return Bipartition.of(cut, n)


class SepTag(str, enum.Enum):
    COMPLETELY_PRODUCT = "COMPLETELY_PRODUCT"
    BISEPARABLE = "BISEPARABLE"
    GENUINELY_ENTANGLED = "GENUINELY_ENTANGLED"


@dataclass(frozen=True)
class SeparabilityClass:
    tag: SepTag
    partition: tuple  # tuple of sorted party tuples, ordered by first party

    @property
    def m(self) -> int:
        return len(self.partition)


def product_factors(psi: PureState, tol: float = RANK_TOL):
    """Finest product factorization of ``psi``.

    Returns ``[(parties, local_state), ...]`` ordered by first party. The
    product of the local states equals ``psi`` up to a global phase.
    """
    blocks = _split(psi.tensor, tuple(range(psi.n)), tol)
    return sorted(blocks, key=lambda b: b[0][0])


def _split(t: np.ndarray, parties: tuple, tol: float):
    m = len(parties)
    if m == 1:
        v = t.reshape(-1)
        return [(parties, PureState(HilbertDims(t.shape), v / np.linalg.norm(v)))]
    for cut in all_cuts(m):
        lp, rp = cut.left_parties, cut.right_parties
        mat = t.transpose(lp + rp).reshape(int(np.prod([t.shape[k] for k in lp])), -1)
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        if s.size > 1 and s[1] > tol * s[0]:
            continue
        lt = (s[0] * u[:, 0]).reshape([t.shape[k] for k in lp])
        rt = vh[0].reshape([t.shape[k] for k in rp])
        return (_split(lt, tuple(parties[k] for k in lp), tol)
                + _split(rt, tuple(parties[k] for k in rp), tol))
    v = t.reshape(-1)
    return [(parties, PureState(HilbertDims(t.shape), v / np.linalg.norm(v)))]


def separability_class(psi: PureState, tol: float = RANK_TOL) -> SeparabilityClass:
    blocks = product_factors(psi, tol)
    partition = tuple(tuple(parties) for parties, _ in blocks)
    if len(partition) == psi.n:
        tag = SepTag.COMPLETELY_PRODUCT
    elif len(partition) == 1:
        tag = SepTag.GENUINELY_ENTANGLED
    else:
        tag = SepTag.BISEPARABLE
    return SeparabilityClass(tag, partition)


def is_completely_product(psi: PureState, tol: float = RANK_TOL) -> bool:
    return separability_class(psi, tol).tag is SepTag.COMPLETELY_PRODUCT


def reduced_spectrum(psi: PureState, parties: Iterable[int]) -> np.ndarray:
    """Eigenvalues (descending) of the reduced density matrix on ``parties``."""
    mat = psi.matrix(tuple(sorted(parties)))
    rho = mat @ mat.conj().T
    return np.sort(np.linalg.eigvalsh(rho))[::-1]
