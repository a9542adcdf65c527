"""Optimization over completely product states.

Two problems share one alternating scheme (fix every party but one, solve
the local problem exactly, sweep):

* best rank-one approximation: maximize ``|<p|psi>|^2``; the local optimum
  is the normalized partial contraction of ``psi`` with the other factors;
* product state in a subspace: maximize ``<p|P_V|p>``; the local optimum is
  the top eigenvector of the effective local operator.

Both updates are exact maximizations in one factor, so the objective never
decreases within a restart. Restart ``i`` draws its start from
``substream(seed, i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from .errors import ConstraintOutsideSubspace, DimensionMismatch, NonOrthonormalBasis
from .rng import haar_vector, substream
from .states import HilbertDims, PureState, product_state

SUBSPACE_TOL = 1e-9
NONORTH_TOL = 1e-7
FEASIBLE_OBJECTIVE = 1 - 1e-9

# stream keys distinguishing the two problems and constrained retries
_RANK_ONE, _SUBSPACE, _RETRY = 101, 202, 303


@dataclass(frozen=True)
class ProductSearchBudget:
    restarts: int = 32
    max_iters: int = 500
    conv_tol: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be >= 1")
        if not self.conv_tol > 0:
            raise ValueError("conv_tol must be positive")


@dataclass(frozen=True, eq=False)
class ProductWitness:
    state: PureState
    objective: float
    factors: tuple = ()
    restart: int = 0
    history: tuple = field(default=(), repr=False)


@dataclass(frozen=True)
class NotFound:
    """Search budget spent without a witness; says nothing about existence."""

    restarts: int
    best_objective: float
    reason: str = "budget exhausted"


def _contract_except(t: np.ndarray, factors, k: int) -> np.ndarray:
    # sum over every index but k of conj(factor_j) * t
    out = t
    for j in reversed(range(len(factors))):
        if j == k:
            continue
        out = np.tensordot(out, factors[j].conj(), axes=([j], [0]))
    return out


def rank_one_sweeps(t: np.ndarray, factors, max_iters: int, conv_tol: float):
    """Alternating maximization of ``|<x_0 ... x_{n-1}|t>|^2``.

    Returns the factors and the objective after every single-party update.
    """
    factors = [f / np.linalg.norm(f) for f in factors]
    history = []
    prev = -1.0
    for _ in range(max_iters):
        for k in range(len(factors)):
            v = _contract_except(t, factors, k)
            nv = np.linalg.norm(v)
            if nv > 0:
                factors[k] = v / nv
            history.append(float(nv ** 2))
        if history[-1] - prev <= conv_tol:
            break
        prev = history[-1]
    return factors, history


def _random_factors(rng, dims):
    return [haar_vector(rng, d) for d in dims]


def _hosvd_factors(t: np.ndarray):
    out = []
    for k in range(t.ndim):
        mat = np.moveaxis(t, k, 0).reshape(t.shape[k], -1)
        u, _, _ = np.linalg.svd(mat, full_matrices=False)
        out.append(u[:, 0].copy())
    return out


def best_product_approximation(psi: PureState,
                               budget: ProductSearchBudget = ProductSearchBudget()
                               ) -> ProductWitness:
    """Best completely product approximation of ``psi`` found by multi-start ALS.

    ``objective`` is ``|<p*|psi>|^2`` for the winner. Restart 0 starts from
    the leading left singular vectors of each party's unfolding; the others
    from seeded Haar-random product states. Ties go to the lowest restart.
    """
    t = psi.tensor / psi.norm
    best = None
    for r in range(budget.restarts):
        start = _hosvd_factors(t) if r == 0 else _random_factors(
            substream(budget.seed, _RANK_ONE, r), psi.dims)
        factors, hist = rank_one_sweeps(t, start, budget.max_iters, budget.conv_tol)
        obj = min(1.0, hist[-1])
        if best is None or obj > best.objective + 1e-13:
            p = product_state(factors)
            best = ProductWitness(p, obj, tuple(factors), r, tuple(hist))
        if best.objective >= 1 - 1e-15:
            break
    return best


def _orthonormal_columns(basis: Sequence[PureState]):
    if not basis:
        raise NonOrthonormalBasis("empty basis")
    dims = basis[0].dims
    if any(tuple(b.dims) != tuple(dims) for b in basis):
        raise DimensionMismatch("basis states have different dims")
    mat = np.column_stack([b.amps for b in basis])
    gram = mat.conj().T @ mat
    if np.max(np.abs(gram - np.eye(len(basis)))) > 1e-10:
        raise NonOrthonormalBasis("subspace basis is not orthonormal within 1e-10")
    return dims, mat


def _subspace_sweeps(cols_t, factors, max_iters, conv_tol, extra=None, weight=0.0):
    """Alternating maximization of ``<p|P|p> (+ weight |<p|extra>|^2)``.

    ``cols_t`` has shape ``(k, d_0, ..., d_{n-1})``, the basis vectors as
    tensors. The objective is recorded after every local update.
    """
    n = len(factors)
    factors = [f / np.linalg.norm(f) for f in factors]
    history = []
    prev = -1.0
    for _ in range(max_iters):
        for k in range(n):
            factors[k], val = _local_update(cols_t, factors, k, extra, weight)
            history.append(val)
        if history[-1] - prev <= conv_tol:
            break
        prev = history[-1]
    return factors, history


def _local_update(cols_t, factors, k, extra=None, weight=0.0):
    # w[m] = partial contraction of basis vector m on all parties but k
    w = cols_t
    for j in reversed(range(len(factors))):
        if j != k:
            w = np.tensordot(w, factors[j].conj(), axes=([j + 1], [0]))
    g = w.T @ w.conj()  # effective local operator, d_k x d_k
    if extra is not None:
        e = _contract_except(extra, factors, k)
        g = g + weight * np.outer(e, e.conj())
    vals, vecs = np.linalg.eigh(g)
    return vecs[:, -1], float(vals[-1])


def _polish(cols_t, mat, factors, max_iters, target=1e-12):
    # near a feasible point the objective saturates in double precision, so
    # track the subspace residual of the product directly
    def resid(fs):
        v = reduce(np.kron, fs)
        return float(np.linalg.norm(v - mat @ (mat.conj().T @ v)))

    factors = list(factors)
    r = resid(factors)
    history = []
    for _ in range(max_iters):
        if r <= target:
            break
        for k in range(len(factors)):
            factors[k], val = _local_update(cols_t, factors, k)
            history.append(val)
        r_new = resid(factors)
        if r_new >= r * (1 - 1e-6):
            r = min(r, r_new)
            break
        r = r_new
    return factors, history


def _verify_in_subspace(p: PureState, mat: np.ndarray, target):
    proj = mat @ (mat.conj().T @ p.amps)
    resid = float(np.linalg.norm(p.amps - proj))
    overlap = abs(np.vdot(target.amps, p.amps)) if target is not None else None
    return resid, overlap


def product_state_in_subspace(basis: Sequence[PureState],
                              nonorth_to: Optional[PureState] = None,
                              budget: ProductSearchBudget = ProductSearchBudget()):
    """Search for a completely product state in ``span(basis)``.

    If ``nonorth_to`` is given the witness must also satisfy
    ``|<p|nonorth_to>| > 1e-7``. Returns a :class:`ProductWitness` whose
    state lies in the span (residual <= 1e-9) or :class:`NotFound`.

    Each restart maximizes ``<p|P_V|p>``; the constraint is checked on
    converged restarts only. If every feasible product found is orthogonal
    to the target, extra restarts start from perturbations of those
    products and first climb ``<p|P_V|p> + 0.5 |<p|target>|^2`` before
    polishing on ``<p|P_V|p>`` alone.
    """
    from .schmidt import is_completely_product

    dims, mat = _orthonormal_columns(basis)
    if nonorth_to is not None:
        if tuple(nonorth_to.dims) != tuple(dims):
            raise DimensionMismatch("constraint state has different dims")
        t = nonorth_to.amps / nonorth_to.norm
        if np.linalg.norm(t - mat @ (mat.conj().T @ t)) > SUBSPACE_TOL:
            raise ConstraintOutsideSubspace("nonorth_to does not lie in the subspace")
        target = PureState(dims, t)
    else:
        target = None

    cols_t = mat.T.reshape((mat.shape[1],) + tuple(dims))
    found = []
    best_obj = 0.0

    def attempt(start, r, extra=None):
        nonlocal best_obj
        factors, hist = start, []
        if extra is not None:
            factors, hist = _subspace_sweeps(cols_t, factors, min(budget.max_iters, 50),
                                             budget.conv_tol, extra, 0.5)
        factors, h2 = _subspace_sweeps(cols_t, factors, budget.max_iters,
                                       budget.conv_tol)
        hist = hist + h2
        best_obj = max(best_obj, h2[-1])
        if h2[-1] < FEASIBLE_OBJECTIVE:
            return None
        factors, h3 = _polish(cols_t, mat, factors, 50 * budget.max_iters)
        hist = hist + h3
        p = product_state(factors)
        resid, overlap = _verify_in_subspace(p, mat, target)
        if resid > SUBSPACE_TOL or not is_completely_product(p):
            return None
        obj = float(np.linalg.norm(mat.conj().T @ p.amps) ** 2)
        w = ProductWitness(p, min(1.0, obj), tuple(factors), r, tuple(h2 + h3))
        found.append(w)
        if target is not None and overlap <= NONORTH_TOL:
            return None
        return w

    for r in range(budget.restarts):
        w = attempt(_random_factors(substream(budget.seed, _SUBSPACE, r), dims), r)
        if w is not None:
            return w

    if target is not None and found:
        seeds = list(found)
        textra = target.tensor
        for r in range(budget.restarts):
            rng = substream(budget.seed, _RETRY, r)
            base = seeds[r % len(seeds)].factors
            scale = 0.1 * (1 + r % 4)
            start = [f + scale * haar_vector(rng, f.size) for f in base]
            w = attempt(start, budget.restarts + r, extra=textra)
            if w is not None:
                return w
        return NotFound(2 * budget.restarts, best_obj,
                        "every product state found is orthogonal to the target")
    return NotFound(budget.restarts, best_obj)
