"""Multipartite pure states: representation, construction and algebra.

Amplitudes are stored flat. The basis label ``(i_0, ..., i_{n-1})`` sits at
flat index ``sum_k i_k * prod_{j>k} d_j``, i.e. party 0 is the most
significant digit, which is numpy's C order for ``amps.reshape(dims)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, TrivialCoefficient, ZeroVector
from .rng import haar_vector, substream

NORM_TOL = 1e-12
ZERO_TOL = 1e-14


class HilbertDims(tuple):
    """Local dimensions ``(d_0, ..., d_{n-1})``, each at least 2."""

    def __new__(cls, dims: Iterable[int]):
        dims = tuple(int(d) for d in dims)
        if len(dims) < 1:
            raise DimensionMismatch("at least one party is required")
        if any(d < 2 for d in dims):
            raise DimensionMismatch(f"every local dimension must be >= 2, got {dims}")
        return super().__new__(cls, dims)

    @property
    def n(self) -> int:
        return len(self)

    @property
    def total(self) -> int:
        return int(np.prod(self))

    def flat_index(self, labels: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(labels), self))

    def multi_index(self, flat: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(flat, self))


@dataclass(frozen=True)
class Bipartition:
    """A cut ``left : complement`` of ``n`` parties."""

    left: frozenset
    n: int

    def __post_init__(self):
        left = frozenset(int(k) for k in self.left)
        object.__setattr__(self, "left", left)
        if not left or len(left) >= self.n or min(left) < 0 or max(left) >= self.n:
            raise DimensionMismatch(f"invalid cut {sorted(left)} for {self.n} parties")

    @classmethod
    def of(cls, left: Iterable[int], n: int) -> "Bipartition":
        return cls(frozenset(left), n)

    @property
    def left_parties(self) -> tuple[int, ...]:
        return tuple(sorted(self.left))

    @property
    def right_parties(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.n) if k not in self.left)

    def __str__(self):
        return ",".join(map(str, self.left_parties))


def all_cuts(n: int) -> list[Bipartition]:
    """Every bipartition of ``n`` parties once, smaller side first.

    Ordered by size of the listed side, then lexicographically. When both
    sides have equal size only the side holding party 0 is listed.
    """
    cuts = []
    for size in range(1, n // 2 + 1):
        for left in combinations(range(n), size):
            if 2 * size == n and 0 not in left:
                continue
            cuts.append(Bipartition.of(left, n))
    return cuts


@dataclass(frozen=True, eq=False)
class PureState:
    dims: HilbertDims
    amps: np.ndarray

    def __post_init__(self):
        dims = HilbertDims(self.dims)
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.size != dims.total:
            raise DimensionMismatch(
                f"{amps.size} amplitudes for dims {tuple(dims)} (need {dims.total})")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)

    @property
    def n(self) -> int:
        return self.dims.n

    @property
    def tensor(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def inner(self, other: "PureState") -> complex:
        """``<self|other>``."""
        _check_same_dims(self, other)
        return complex(np.vdot(self.amps, other.amps))

    def fidelity(self, other: "PureState") -> float:
        return abs(self.inner(other)) / (self.norm * other.norm)

    def equal_up_to_phase(self, other: "PureState", tol: float = 1e-10) -> bool:
        return self.fidelity(other) >= 1 - tol

    def matrix(self, left: Iterable[int]) -> np.ndarray:
        """Amplitudes as a ``dim(left) x dim(rest)`` matrix, parties ascending on each side."""
        cut = Bipartition.of(left, self.n)
        lp, rp = cut.left_parties, cut.right_parties
        dl = int(np.prod([self.dims[k] for k in lp]))
        return self.tensor.transpose(lp + rp).reshape(dl, -1)

    def __repr__(self):
        return f"PureState(dims={list(self.dims)}, amps={np.round(self.amps, 6).tolist()})"


def _check_same_dims(u: PureState, v: PureState):
    if tuple(u.dims) != tuple(v.dims):
        raise DimensionMismatch(f"dims {tuple(u.dims)} vs {tuple(v.dims)}")


def normalize(state: PureState) -> PureState:
    nrm = state.norm
    if nrm < ZERO_TOL:
        raise ZeroVector("cannot normalize a (numerically) zero vector")
    return PureState(state.dims, state.amps / nrm)


def state(dims: Sequence[int], amps, normalized: bool = True) -> PureState:
    s = PureState(HilbertDims(dims), amps)
    return normalize(s) if normalized else s


def ket(terms: Mapping, dims: Sequence[int], normalized: bool = True) -> PureState:
    """Build a state from ``{label: amplitude}``.

    Labels are digit strings such as ``"012"`` or tuples of local indices.

    >>> ket({"00": 1, "11": 1}, [2, 2]).amps.round(4).tolist()
    [(0.7071+0j), 0j, 0j, (0.7071+0j)]
    """
    dims = HilbertDims(dims)
    amps = np.zeros(dims.total, dtype=complex)
    for label, amp in terms.items():
        labels = tuple(int(ch) for ch in label) if isinstance(label, str) else tuple(label)
        if len(labels) != dims.n or any(not 0 <= i < d for i, d in zip(labels, dims)):
            raise DimensionMismatch(f"label {label!r} does not fit dims {tuple(dims)}")
        amps[dims.flat_index(labels)] += amp
    return state(dims, amps, normalized)


def basis_state(labels, dims: Sequence[int]) -> PureState:
    return ket({tuple(int(ch) for ch in labels): 1.0}, dims)


def product_state(factors: Sequence) -> PureState:
    """Tensor product of local vectors (normalized)."""
    vecs = []
    for f in factors:
        v = np.asarray(f.amps if isinstance(f, PureState) else f, dtype=complex).reshape(-1)
        if v.size < 2:
            raise DimensionMismatch("local factors need dimension >= 2")
        if np.linalg.norm(v) < ZERO_TOL:
            raise ZeroVector("zero local factor")
        vecs.append(v / np.linalg.norm(v))
    if not vecs:
        raise DimensionMismatch("no factors given")
    amps = reduce(np.kron, vecs)
    return normalize(PureState(HilbertDims(v.size for v in vecs), amps))


def tensor_states(*states: PureState) -> PureState:
    """Tensor product of states, parties concatenated in argument order."""
    dims = [d for s in states for d in s.dims]
    return PureState(HilbertDims(dims), reduce(np.kron, [s.amps for s in states]))


def superpose(a: complex, psi: PureState, b: complex, p: PureState) -> PureState:
    """Normalized ``a|psi> + b|p>``; both coefficients must be nonzero."""
    _check_same_dims(psi, p)
    if abs(a) <= ZERO_TOL or abs(b) <= ZERO_TOL:
        raise TrivialCoefficient(f"nontrivial superposition needs a, b != 0 (a={a}, b={b})")
    return normalize(PureState(psi.dims, a * psi.amps + b * p.amps))


def apply_local(psi: PureState, party: int, op: np.ndarray) -> PureState:
    """Apply ``op`` to one party's index."""
    t = np.tensordot(np.asarray(op), psi.tensor, axes=([1], [party]))
    t = np.moveaxis(t, 0, party)
    return PureState(psi.dims, t.reshape(-1))


def random_state(dims: Sequence[int], seed: int = 0) -> PureState:
    """Haar-random pure state; deterministic in ``seed``."""
    dims = HilbertDims(dims)
    return PureState(dims, haar_vector(substream(seed, 0), dims.total))


def random_product_state(dims: Sequence[int], seed: int = 0) -> PureState:
    """Product of independent Haar-random local states."""
    dims = HilbertDims(dims)
    rng = substream(seed, 1)
    return product_state([haar_vector(rng, d) for d in dims])


def ghz_state(n: int = 3, d: int = 2) -> PureState:
    return ket({(k,) * n: 1.0 for k in range(d)}, [d] * n)


def w_state(n: int = 3) -> PureState:
    terms = {tuple(int(i == k) for i in range(n)): 1.0 for k in range(n)}
    return ket(terms, [2] * n)
