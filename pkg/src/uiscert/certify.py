"""Superposition robustness of entangled pure states.

Given an entangled ``psi``, decide whether some nontrivial superposition
``a|psi> + b|p>`` with a completely product ``p`` can itself be completely
product (a *collapse*), or certify that it never is.

Positive certificates:

* ``RANK3_CUT``: some cut has Schmidt rank >= 3. Adding a product state
  lowers a Schmidt rank by at most one, so the output stays entangled.
* ``PROP2`` (three qubits): across a single-qubit cut
  ``psi = c|alpha>|phi> + d|alpha_perp>|phi_perp>`` with ``phi`` entangled,
  ``phi_perp`` product and orthogonal to both product terms of the Schmidt
  form of ``phi``. Then ``phi_perp`` is the only product ray in
  ``span{phi, phi_perp}``, which rules out every collapse.

Collapse witnesses come from closed forms where they exist (rank-two cuts,
three-qubit slices with two product rays) and otherwise from a numerical
two-term product decomposition ``psi = lambda_0 q + lambda_1 p``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (MissingStructure, NotBiseparable, NotEntangled,
                     NotGenuinelyEntangled, WrongShape)
from .product_opt import ProductSearchBudget
from .rng import haar_vector, substream
from .schmidt import (RANK_TOL, SepTag, product_factors, schmidt_decompose,
                      schmidt_rank, second_coefficient, separability_class)
from .states import (Bipartition, HilbertDims, PureState, all_cuts, normalize,
                     product_state, superpose)

BIORTH_TOL = 1e-10
TANGLE_TOL = 1e-9
DEGENERATE_TOL = 1e-9
MAX_NUMERIC_RATIO = 1e3  # |b/a| cap for numerically found witnesses
_COLLAPSE_STREAM = 404


class Verdict(str, enum.Enum):
    RANK3_CUT = "RANK3_CUT"
    PROP2 = "PROP2"
    COLLAPSIBLE = "COLLAPSIBLE"
    INCONCLUSIVE = "INCONCLUSIVE"


class GHZW(str, enum.Enum):
    GHZ_CLASS = "GHZ_CLASS"
    W_CLASS = "W_CLASS"


@dataclass(frozen=True, eq=False)
class Prop2Structure:
    """Single-qubit-cut Schmidt form with a bi-orthogonal product partner.

    ``basis = (e0, e1, f0, f1)`` is the Schmidt basis of ``phi`` in which
    ``phi = s|e0 f0> + t|e1 f1>``; ``overlaps[i, j] = <e_i f_j|phi_perp>``.
    """

    cut: Bipartition
    alpha: PureState
    alpha_perp: PureState
    phi: PureState
    phi_perp: PureState
    c: float
    d: float
    s: float
    t: float
    basis: tuple
    overlaps: np.ndarray
    bi_orth_flag: bool

    def reconstruct(self) -> PureState:
        v = (self.c * np.kron(self.alpha.amps, self.phi.amps)
             + self.d * np.kron(self.alpha_perp.amps, self.phi_perp.amps))
        return _from_cut_order(v, self.cut)


@dataclass(frozen=True, eq=False)
class CollapseWitness:
    """``a|psi> + b|p>`` is (up to normalization) the product ``output``."""

    p: PureState
    a: complex
    b: complex
    output: PureState
    output_factors: tuple
    strategy: str
    p_factors: tuple = ()


@dataclass(frozen=True, eq=False)
class UISCertificate:
    verdict: Verdict
    cut: Optional[Bipartition] = None
    rank: Optional[int] = None
    structure: Optional[Prop2Structure] = None
    witness: Optional[CollapseWitness] = None
    evidence: dict = field(default_factory=dict)

    @property
    def positive(self) -> bool:
        return self.verdict in (Verdict.RANK3_CUT, Verdict.PROP2)


# ---------------------------------------------------------------- helpers

def _from_cut_order(v: np.ndarray, cut: Bipartition) -> PureState:
    lp, rp = cut.left_parties, cut.right_parties
    n = cut.n
    # dims are all 2 wherever this is used on (k | rest) qubit cuts
    t = np.asarray(v).reshape([2] * n).transpose(np.argsort(lp + rp))
    return PureState(HilbertDims([2] * n), t.reshape(-1))


def _rank1_factors(v: np.ndarray, dl: int):
    """Split a rank-one vector of a ``dl x (size/dl)`` matrix into its two factors."""
    u, s, vh = np.linalg.svd(v.reshape(dl, -1))
    return u[:, 0] * s[0], vh[0]


def _u2_complement(x: np.ndarray) -> np.ndarray:
    return np.array([-np.conj(x[1]), np.conj(x[0])])


def two_qubit_product_rays(v0: np.ndarray, v1: np.ndarray):
    """Product directions in ``span{v0, v1}`` of two-qubit vectors.

    Solves ``det(u M0 + v M1) = 0`` where ``M0, M1`` are the 2x2 amplitude
    matrices. Returns ``(rays, double)`` with ``rays`` a list of
    coefficient pairs ``(u, v)`` and ``double`` true when the quadratic has
    a repeated root (a single product ray). ``rays is None`` means every
    vector in the span is product.
    """
    m0, m1 = np.reshape(v0, (2, 2)), np.reshape(v1, (2, 2))
    qa = np.linalg.det(m0)
    qc = np.linalg.det(m1)
    qb = m0[0, 0] * m1[1, 1] + m1[0, 0] * m0[1, 1] - m0[0, 1] * m1[1, 0] - m1[0, 1] * m0[1, 0]
    scale = max(abs(qa), abs(qb), abs(qc))
    if scale < 1e-14:
        return None, False
    disc = qb * qb - 4 * qa * qc
    double = abs(disc) <= 1e-12 * scale ** 2
    if abs(qa) > 1e-14 * scale:
        if double:
            roots = [(-qb / (2 * qa), 1.0)]
        else:
            sq = np.sqrt(complex(disc))
            # choose the numerically stable pairing of the two roots
            q = -0.5 * (qb + (sq if np.real(np.conj(qb) * sq) >= 0 else -sq))
            roots = [(q / qa, 1.0), (qc / q, 1.0)] if abs(q) > 0 else [(0.0, 1.0)]
    else:
        roots = [(1.0, 0.0)]
        if abs(qb) > 1e-14 * scale:
            roots.append((-qc / qb, 1.0))
    return [np.array(r, dtype=complex) for r in roots], double


# ---------------------------------------------------------------- structure

def _biorth_overlaps(phi: np.ndarray, phi_perp: np.ndarray):
    """Schmidt basis of ``phi`` and ``<e_i f_j|phi_perp>``.

    For maximally entangled ``phi`` the basis is fixed by taking ``e0``
    along the first factor of the product ``phi_perp``.
    """
    n = phi.reshape(2, 2)
    u, sv, vh = np.linalg.svd(n)
    s, t = float(sv[0]), float(sv[1])
    if abs(s - t) <= DEGENERATE_TOL:
        x, _ = _rank1_factors(phi_perp, 2)
        e0 = x / np.linalg.norm(x)
        e1 = _u2_complement(e0)
        f0 = n.T @ e0.conj()
        f1 = n.T @ e1.conj()
        s = float(np.linalg.norm(f0))
        t = float(np.linalg.norm(f1))
        f0, f1 = f0 / s, f1 / t
    else:
        e0, e1 = u[:, 0], u[:, 1]
        f0, f1 = vh[0], vh[1]
    basis = (e0, e1, f0, f1)
    ov = np.array([[np.vdot(np.kron(e, f), phi_perp) for f in (f0, f1)] for e in (e0, e1)])
    return basis, s, t, ov


def _is_biorth(ov: np.ndarray, tol: float = BIORTH_TOL) -> bool:
    cross = [abs(ov[0, 1]) > tol, abs(ov[1, 0]) > tol]
    return abs(ov[0, 0]) <= tol and abs(ov[1, 1]) <= tol and sum(cross) == 1


def _candidate_structures(psi: PureState, k: int):
    cut = Bipartition.of([k], 3)
    mat = psi.matrix([k])
    sd = schmidt_decompose(psi, cut)
    if sd.rank != 2:
        return
    r0, r1 = sd.right_states[0].amps, sd.right_states[1].amps
    candidates = [r1, r0]
    if abs(sd.coeffs[0] - sd.coeffs[1]) <= DEGENERATE_TOL:
        # any orthonormal basis of the span is a Schmidt basis here
        rays, _ = two_qubit_product_rays(r0, r1)
        for uv in rays or []:
            v = uv[0] * r0 + uv[1] * r1
            candidates.append(v / np.linalg.norm(v))
    for phi_perp in candidates:
        # complement of phi_perp inside span{r0, r1}
        w = r0 - np.vdot(phi_perp, r0) * phi_perp
        if np.linalg.norm(w) < 1e-6:
            w = r1 - np.vdot(phi_perp, r1) * phi_perp
        phi = w / np.linalg.norm(w)
        a_raw = mat @ phi.conj()
        ap_raw = mat @ phi_perp.conj()
        c, d = float(np.linalg.norm(a_raw)), float(np.linalg.norm(ap_raw))
        if c < 1e-12 or d < 1e-12:
            continue
        alpha, alpha_perp = a_raw / c, ap_raw / d
        if abs(np.vdot(alpha, alpha_perp)) > 1e-10:
            continue
        sv_phi = np.linalg.svd(phi.reshape(2, 2), compute_uv=False)
        sv_perp = np.linalg.svd(phi_perp.reshape(2, 2), compute_uv=False)
        if sv_phi[1] <= RANK_TOL * sv_phi[0] or sv_perp[1] > RANK_TOL * sv_perp[0]:
            continue
        basis, s, t, ov = _biorth_overlaps(phi, phi_perp)
        yield Prop2Structure(
            cut=cut,
            alpha=PureState(HilbertDims([2]), alpha),
            alpha_perp=PureState(HilbertDims([2]), alpha_perp),
            phi=PureState(HilbertDims([2, 2]), phi),
            phi_perp=PureState(HilbertDims([2, 2]), phi_perp),
            c=c, d=d, s=s, t=t, basis=basis, overlaps=ov,
            bi_orth_flag=_is_biorth(ov))


def _check_three_qubits(psi: PureState):
    if tuple(psi.dims) != (2, 2, 2):
        raise WrongShape(f"expected dims [2, 2, 2], got {list(psi.dims)}")


def prop2_structure_check(psi: PureState) -> Optional[Prop2Structure]:
    """Find the bi-orthogonal single-product-vector structure, if present.

    Cuts ``{0}, {1}, {2}`` are tried in order, and for each both Schmidt
    vectors are tried as the product partner. When the two Schmidt
    coefficients coincide the decomposition is not unique; every product
    ray of the right-hand span is then tried as the partner as well.
    """
    _check_three_qubits(psi)
    psi = normalize(psi)
    for k in range(3):
        for st in _candidate_structures(psi, k):
            if st.bi_orth_flag:
                return st
    return None


# ---------------------------------------------------------------- witnesses

def _witness(psi, factors, a, b, strategy, ratio_cap=None) -> Optional[CollapseWitness]:
    """Assemble and independently verify a collapse witness."""
    if abs(a) <= 1e-14 or abs(b) <= 1e-14:
        return None
    if ratio_cap is not None and not (1 / ratio_cap <= abs(b / a) <= ratio_cap):
        return None
    try:
        p = product_state(factors)
        out = superpose(a, psi, b, p)
    except Exception:
        return None
    nrm = np.hypot(abs(a), abs(b))
    a, b = complex(a) / nrm, complex(b) / nrm
    blocks = product_factors(out)
    if len(blocks) != psi.n or separability_class(p).tag is not SepTag.COMPLETELY_PRODUCT:
        return None
    return CollapseWitness(p=p, a=a, b=b, output=out,
                           output_factors=tuple(st.amps for _, st in blocks),
                           strategy=strategy,
                           p_factors=tuple(np.asarray(f) / np.linalg.norm(f) for f in factors))


def verify_collapse(psi: PureState, w: CollapseWitness, tol: float = RANK_TOL) -> bool:
    """Recompute ``a psi + b p`` and check both ``p`` and the output are completely product."""
    if abs(w.a) <= 1e-14 or abs(w.b) <= 1e-14:
        return False
    if separability_class(w.p, tol).tag is not SepTag.COMPLETELY_PRODUCT:
        return False
    out = superpose(w.a, psi, w.b, w.p)
    return separability_class(out, tol).tag is SepTag.COMPLETELY_PRODUCT


def _split_factors(vec: np.ndarray, dims):
    """Local factors of a completely product vector (None if not product)."""
    st = PureState(HilbertDims(dims), vec)
    blocks = product_factors(normalize(st))
    if len(blocks) != len(dims):
        return None
    return [b.amps for _, b in blocks]


def _collapse_rank2_cut(psi: PureState) -> Optional[CollapseWitness]:
    """Closed form on a Schmidt-rank-two cut ``psi = c L0 R0 + d L1 R1``.

    With ``p ~ (L0 + L1)(c R0 + d R1)`` the difference
    ``psi - (L0 + L1)(c R0 + d R1)/2 = (L0 - L1)(c R0 - d R1)/2`` has rank
    one across the cut; it is completely product whenever the four
    combinations factor, which is always the case for two parties.
    """
    for cut in all_cuts(psi.n):
        sd = schmidt_decompose(psi, cut)
        if sd.rank != 2:
            continue
        c, d = sd.coeffs[0], sd.coeffs[1]
        l0, l1 = sd.left_states[0].amps, sd.left_states[1].amps
        r0, r1 = sd.right_states[0].amps, sd.right_states[1].amps
        ldims, rdims = sd.left_states[0].dims, sd.right_states[0].dims
        lf = _split_factors(l0 + l1, ldims)
        rf = _split_factors(c * r0 + d * r1, rdims)
        if lf is None or rf is None:
            continue
        factors = _merge_factors(cut, lf, rf)
        pv = _from_matrix(np.outer(l0 + l1, c * r0 + d * r1) / 2, cut, psi.dims)
        b = -np.vdot(product_state(factors).amps, pv)
        w = _witness(psi, factors, 1.0, b, "S1")
        if w is not None:
            return w
    return None


def _from_matrix(mat: np.ndarray, cut: Bipartition, dims) -> np.ndarray:
    """Flat vector in party order from a ``left x right`` matrix across ``cut``."""
    lp, rp = cut.left_parties, cut.right_parties
    t = np.asarray(mat).reshape([dims[k] for k in lp] + [dims[k] for k in rp])
    return t.transpose(np.argsort(lp + rp)).reshape(-1)


def _assemble(blocks, dims) -> np.ndarray:
    """Flat vector in party order from ``[(parties, local vector), ...]``."""
    order, vec = [], np.ones(1, dtype=complex)
    for parties, v in blocks:
        order += list(parties)
        vec = np.kron(vec, np.asarray(v))
    t = vec.reshape([dims[k] for k in order]).transpose(np.argsort(order))
    return t.reshape(-1)


def _merge_factors(cut: Bipartition, lf, rf):
    out = [None] * cut.n
    for k, f in zip(cut.left_parties, lf):
        out[k] = f
    for k, f in zip(cut.right_parties, rf):
        out[k] = f
    return out


def _collapse_block(psi: PureState, budget, strategies) -> Optional[CollapseWitness]:
    """Collapse a state with exactly one entangled block by collapsing the block."""
    blocks = product_factors(psi)
    entangled = [b for b in blocks if len(b[0]) > 1]
    if len(blocks) == 1 or len(entangled) != 1:
        return None
    parties, block = entangled[0]
    inner = find_collapse(block, budget, strategies)
    if inner is None:
        return None
    factors = [None] * psi.n
    for ps, st in blocks:
        if len(ps) == 1:
            factors[ps[0]] = st.amps
    for k, f in zip(parties, inner.p_factors):
        factors[k] = f
    # psi equals the assembled blocks only up to a global phase
    phase = np.vdot(_assemble([(ps, st.amps) for ps, st in blocks], psi.dims), psi.amps)
    return _witness(psi, factors, inner.a / phase, inner.b, inner.strategy)


def _collapse_three_qubit(psi: PureState) -> Optional[CollapseWitness]:
    """Algebraic collapse for three qubits from two product rays of a slice span.

    Across cut ``{k}``: ``psi = c a0 R0 + d a1 R1``. If ``span{R0, R1}``
    holds two distinct product rays ``r_i, r_j`` (coefficient rows of the
    2x2 matrix ``R``), then ``diag(c, d) = Q R`` splits as
    ``Q[:, 0] r_j + Q[:, 1] r_i``. Taking ``p ~ (x a0 + y a1) r_i`` with
    ``b (x, y) = -Q[:, 1]`` leaves ``psi + b p = (Q[:, 0] . a) r_j``.
    """
    if tuple(psi.dims) != (2, 2, 2):
        return None
    for k in range(3):
        cut = Bipartition.of([k], 3)
        sd = schmidt_decompose(psi, cut)
        if sd.rank != 2:
            continue
        c, d = sd.coeffs[0], sd.coeffs[1]
        a0, a1 = sd.left_states[0].amps, sd.left_states[1].amps
        r0, r1 = sd.right_states[0].amps, sd.right_states[1].amps
        rays, double = two_qubit_product_rays(r0, r1)
        if rays is None or double or len(rays) < 2:
            continue
        rays = [uv / np.linalg.norm(uv[0] * r0 + uv[1] * r1) for uv in rays]
        for i, j in ((0, 1), (1, 0)):
            rmat = np.array([rays[j], rays[i]])
            if abs(np.linalg.det(rmat)) < 1e-12:
                continue
            q = np.diag([c, d]) @ np.linalg.inv(rmat)
            bxy = -q[:, 1]
            b = np.linalg.norm(bxy)
            left = (bxy[0] * a0 + bxy[1] * a1) / b
            bc = rays[i][0] * r0 + rays[i][1] * r1
            beta, gamma = _rank1_factors(bc, 2)
            factors = _merge_factors(cut, [left], [beta, gamma])
            # p normalization: |left| = 1, |bc| = 1
            w = _witness(psi, factors, 1.0, b, "S2")
            if w is not None:
                return w
    return None


def _khatri_rao_except(factors, k):
    # column-wise Kronecker product of every factor matrix but the k-th
    out = np.ones((1, factors[0].shape[1]), dtype=complex)
    for j, f in enumerate(factors):
        if j != k:
            out = (out[:, None, :] * f[None, :, :]).reshape(-1, f.shape[1])
    return out


def _pencil_init(t: np.ndarray, rng):
    """Algebraic start for a two-term fit from the pencil of mode-0 slices.

    Groups the parties as ``(0, 1, rest)``. If ``t = sum_r a_r b_r c_r``
    with independent ``a_r`` and ``b_r``, two random contractions of the
    ``rest`` index give ``M_x = A D_x B^T`` and ``M_y = A D_y B^T``; the
    eigenvectors of ``M_x M_y^{-1}`` (in the two-dimensional supports)
    are the ``a_r``. Returns ``None`` when the pencil is degenerate.
    """
    if t.ndim < 3:
        return None
    d0, d1 = t.shape[:2]
    t3 = t.reshape(d0, d1, -1)
    u = np.linalg.svd(t3.reshape(d0, -1), full_matrices=False)[0][:, :2]
    v = np.linalg.svd(t3.transpose(1, 0, 2).reshape(d1, -1), full_matrices=False)[0][:, :2]
    x = rng.standard_normal(t3.shape[2]) + 1j * rng.standard_normal(t3.shape[2])
    y = rng.standard_normal(t3.shape[2]) + 1j * rng.standard_normal(t3.shape[2])
    mx = u.conj().T @ (t3 @ x) @ v.conj()
    my = u.conj().T @ (t3 @ y) @ v.conj()
    if abs(np.linalg.det(my)) < 1e-12 * max(1.0, np.linalg.norm(my) ** 2):
        return None
    la, ea = np.linalg.eig(mx @ np.linalg.inv(my))
    lb, eb = np.linalg.eig(mx.T @ np.linalg.inv(my.T))
    if abs(la[0] - la[1]) < 1e-8 * max(1.0, abs(la).max()):
        return None
    if abs(la[0] - lb[0]) > abs(la[0] - lb[1]):
        eb = eb[:, ::-1]
    a, b = u @ ea, v @ eb
    kr = np.stack([np.kron(a[:, r], b[:, r]) for r in range(2)], axis=1)
    cmat, *_ = np.linalg.lstsq(kr, t3.reshape(d0 * d1, -1), rcond=None)
    factors = [a, b] + [np.zeros((d, 2), dtype=complex) for d in t.shape[2:]]
    for r in range(2):
        c = cmat[r].reshape(t.shape[2:])
        for j in range(c.ndim):
            lead = np.linalg.svd(np.moveaxis(c, j, 0).reshape(c.shape[j], -1))[0][:, 0]
            factors[2 + j][:, r] = lead
        # unit leading vectors; put the weight and phase on the first one
        prod = factors[2][:, r]
        for f in factors[3:]:
            prod = np.kron(prod, f[:, r])
        factors[2][:, r] *= np.vdot(prod, c.reshape(-1))
    return factors


def two_term_decomposition(t: np.ndarray, rng, max_iters: int = 300, conv_tol: float = 1e-14,
                           init=None):
    """ALS fit ``t ~ sum_{r=0,1} (x) factors[k][:, r]``; returns factors and relative residual."""
    if init is not None:
        factors = [np.array(f, dtype=complex) for f in init]
    else:
        factors = [rng.standard_normal((d, 2)) + 1j * rng.standard_normal((d, 2))
                   for d in t.shape]
    tn = np.linalg.norm(t)
    prev = np.inf
    res = np.inf
    for _ in range(max_iters):
        for k in range(t.ndim):
            kr = _khatri_rao_except(factors, k)
            unf = np.moveaxis(t, k, 0).reshape(t.shape[k], -1)
            sol, *_ = np.linalg.lstsq(kr, unf.T, rcond=None)
            factors[k] = sol.T
        approx = _khatri_rao_except(factors, -1).sum(axis=1)
        res = np.linalg.norm(t.reshape(-1) - approx) / tn
        if res < 1e-13 or prev - res < conv_tol:
            break
        prev = res
    return factors, float(res)


def _collapse_numeric(psi: PureState, budget: ProductSearchBudget) -> Optional[CollapseWitness]:
    """Numerical search: ``psi`` collapses iff it is a sum of two product vectors.

    Witnesses with ``|b/a|`` outside ``[1e-3, 1e3]`` are discarded: border
    rank two states (W class) admit approximate decompositions with
    diverging terms that would otherwise pass the product test.
    """
    t = psi.tensor
    for r in range(budget.restarts):
        rng = substream(budget.seed, _COLLAPSE_STREAM, r)
        init = _pencil_init(t, rng) if r == 0 else None
        factors, res = two_term_decomposition(t, rng, budget.max_iters, init=init)
        if res > 1e-6:
            continue
        for keep in (0, 1):
            drop = 1 - keep
            pf = [f[:, drop] for f in factors]
            if any(np.linalg.norm(f) < 1e-14 for f in pf):
                continue
            b = -np.prod([np.linalg.norm(f) for f in pf])
            w = _witness(psi, pf, 1.0, b, "S3", ratio_cap=MAX_NUMERIC_RATIO)
            if w is not None:
                return w
    return None


def find_collapse(psi: PureState, budget: ProductSearchBudget = ProductSearchBudget(),
                  strategies=("S1", "S2", "S3")) -> Optional[CollapseWitness]:
    """Search for ``p`` completely product and ``a, b != 0`` with ``a psi + b p`` product.

    Strategies, tried in order: ``S1`` closed form on Schmidt-rank-two
    cuts (complete for two parties, and applied block-wise to states with a
    single entangled block), ``S2`` three-qubit slice algebra, ``S3``
    numerical two-term product decomposition under ``budget``. Every
    returned witness has been re-verified. ``None`` only means nothing was
    found.
    """
    psi = normalize(psi)
    if separability_class(psi).tag is SepTag.COMPLETELY_PRODUCT:
        raise NotEntangled("state is completely product")
    w = None
    if "S1" in strategies:
        w = _collapse_rank2_cut(psi) or _collapse_block(psi, budget, strategies)
    if w is None and "S2" in strategies:
        w = _collapse_three_qubit(psi)
    if w is None and "S3" in strategies:
        w = _collapse_numeric(psi, budget)
    return w


def _trivial_collapse(psi: PureState) -> CollapseWitness:
    # completely product psi: flip the first factor to an orthogonal vector
    factors = [st.amps for _, st in product_factors(psi)]
    x = factors[0]
    y = np.zeros_like(x)
    y[int(np.argmin(np.abs(x)))] = 1.0
    y = y - np.vdot(x, y) * x
    pf = [y] + factors[1:]
    # psi equals the product of its factors only up to phase; fix it
    phase = np.vdot(product_state(factors).amps, psi.amps)
    return _witness(psi, pf, 1.0, phase, "TRIVIAL")


def certify_uis(psi: PureState, budget: ProductSearchBudget = ProductSearchBudget()
                ) -> UISCertificate:
    """Classify ``psi`` by its robustness under superposition with product states."""
    if psi.n < 2:
        raise WrongShape("at least two parties are required")
    psi = normalize(psi)
    for cut in all_cuts(psi.n):
        r = schmidt_rank(psi, cut)
        if r >= 3:
            return UISCertificate(Verdict.RANK3_CUT, cut=cut, rank=r)
    if tuple(psi.dims) == (2, 2, 2):
        st = prop2_structure_check(psi)
        if st is not None:
            return UISCertificate(Verdict.PROP2, cut=st.cut, structure=st)
    sep = separability_class(psi)
    if sep.tag is SepTag.COMPLETELY_PRODUCT:
        return UISCertificate(Verdict.COLLAPSIBLE, witness=_trivial_collapse(psi))
    w = find_collapse(psi, budget)
    if w is not None:
        return UISCertificate(Verdict.COLLAPSIBLE, witness=w)
    evidence = {"restarts": budget.restarts, "max_iters": budget.max_iters,
                "seed": budget.seed, "separability": sep.tag.value}
    if tuple(psi.dims) == (2, 2, 2) and sep.tag is SepTag.GENUINELY_ENTANGLED:
        evidence["three_tangle"] = three_tangle(psi)
    return UISCertificate(Verdict.INCONCLUSIVE, evidence=evidence)


# ---------------------------------------------------------------- bi-separable partners

@dataclass(frozen=True, eq=False)
class Prop5Verdict:
    """Outcome of superposing ``psi`` with a bi-separable ``eta (x) chi``."""

    structure: Prop2Structure
    eta: PureState
    chi: PureState
    chi_overlaps: np.ndarray  # <e_i f_j|chi> in the Schmidt basis of phi
    assumptions_hold: bool
    output: PureState
    output_class: SepTag
    collapse: Optional[CollapseWitness]

    @property
    def output_entangled(self) -> bool:
        return self.output_class is not SepTag.COMPLETELY_PRODUCT


def prop5_check(psi: PureState, p: PureState, a: complex, b: complex) -> Prop5Verdict:
    """Superpose ``psi`` with a state product across its structural cut.

    ``psi`` must carry a :class:`Prop2Structure` and ``p`` must factor as
    ``eta (x) chi`` across the same single-qubit cut with ``chi``
    entangled. When ``chi`` is bi-orthogonal to ``phi`` (no weight on
    ``e0 f0`` or ``e1 f1``) the output ``a psi + b p`` cannot be completely
    product. Otherwise the partners ``(x alpha + y alpha_perp) chi`` are
    searched for a collapse: one exists iff ``chi`` lies in
    ``span{phi, phi_perp}`` with ``<phi|chi> != 0``, and then
    ``p' = alpha chi`` with ``b'/a' = -c / <phi|chi>`` works.
    """
    _check_three_qubits(psi)
    _check_three_qubits(p)
    psi, p = normalize(psi), normalize(p)
    st = prop2_structure_check(psi)
    if st is None:
        raise MissingStructure("psi lacks the bi-orthogonal single-qubit-cut structure")
    k = st.cut.left_parties[0]
    sd = schmidt_decompose(p, st.cut)
    if sd.rank != 1:
        raise NotBiseparable(f"p is not product across the cut {{{k}}}")
    eta = sd.left_states[0]
    chi_vec = sd.right_states[0].amps * sd.coeffs[0]
    chi_vec = chi_vec / np.linalg.norm(chi_vec)
    if second_coefficient(PureState(HilbertDims([2, 2]), chi_vec), [0]) <= RANK_TOL:
        raise NotBiseparable("the two-qubit factor of p is not entangled")
    e0, e1, f0, f1 = st.basis
    ov = np.array([[np.vdot(np.kron(e, f), chi_vec) for f in (f0, f1)] for e in (e0, e1)])
    holds = abs(ov[0, 0]) <= BIORTH_TOL and abs(ov[1, 1]) <= BIORTH_TOL
    out = superpose(a, psi, b, p)
    out_class = separability_class(out).tag
    collapse = None
    if not holds:
        collapse = _biseparable_collapse(psi, st, chi_vec)
    chi = PureState(HilbertDims([2, 2]), chi_vec)
    return Prop5Verdict(st, eta, chi, ov, holds, out, out_class, collapse)


def _biseparable_collapse(psi, st: Prop2Structure, chi: np.ndarray):
    g = np.vdot(st.phi.amps, chi)
    h = np.vdot(st.phi_perp.amps, chi)
    resid = np.linalg.norm(chi - g * st.phi.amps - h * st.phi_perp.amps)
    if resid > 1e-9 or abs(g) <= 1e-12:
        return None
    pvec = _from_cut_order(np.kron(st.alpha.amps, chi), st.cut)
    a, b = 1.0, -st.c / g
    out = superpose(a, psi, b, pvec)
    blocks = product_factors(out)
    if len(blocks) != 3:
        return None
    nrm = np.hypot(abs(a), abs(b))
    return CollapseWitness(p=pvec, a=a / nrm, b=complex(b) / nrm, output=out,
                           output_factors=tuple(s.amps for _, s in blocks),
                           strategy="BISEPARABLE")


# ---------------------------------------------------------------- GHZ / W

def hyperdeterminant(psi: PureState) -> complex:
    """Cayley hyperdeterminant of the 2x2x2 amplitude tensor."""
    _check_three_qubits(psi)
    a = psi.tensor
    a000, a001, a010, a011 = a[0, 0, 0], a[0, 0, 1], a[0, 1, 0], a[0, 1, 1]
    a100, a101, a110, a111 = a[1, 0, 0], a[1, 0, 1], a[1, 1, 0], a[1, 1, 1]
    return complex(
        a000**2 * a111**2 + a001**2 * a110**2 + a010**2 * a101**2 + a100**2 * a011**2
        - 2 * (a000 * a001 * a110 * a111 + a000 * a010 * a101 * a111
               + a000 * a100 * a011 * a111 + a001 * a010 * a101 * a110
               + a001 * a100 * a011 * a110 + a010 * a100 * a011 * a101)
        + 4 * (a000 * a011 * a101 * a110 + a001 * a010 * a100 * a111))


def three_tangle(psi: PureState) -> float:
    return 4 * abs(hyperdeterminant(normalize(psi)))


def classify_ghz_w(psi: PureState) -> GHZW:
    """GHZ vs W class of a genuinely entangled three-qubit state via the 3-tangle."""
    _check_three_qubits(psi)
    psi = normalize(psi)
    if separability_class(psi).tag is not SepTag.GENUINELY_ENTANGLED:
        raise NotGenuinelyEntangled("state is not genuinely entangled")
    return GHZW.GHZ_CLASS if three_tangle(psi) > TANGLE_TOL else GHZW.W_CLASS


def random_prop2_state(seed: int) -> PureState:
    """Random three-qubit state built to carry the bi-orthogonal structure.

    ``c|alpha>(s|e0 f0> + t|e1 f1>) + d|alpha_perp>|e0 f1>`` with Haar-random
    local bases, random weights and party order rotated by ``seed``.
    """
    rng = substream(seed, 505)
    bases = []
    for _ in range(3):
        x = haar_vector(rng, 2)
        bases.append((x, _u2_complement(x)))
    th, ph = rng.uniform(0.15, np.pi / 2 - 0.15, size=2)
    c, d = np.cos(th), np.sin(th)
    s, t = np.cos(ph), np.sin(ph) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    (al, alp), (e0, e1), (f0, f1) = bases
    phi = s * np.kron(e0, f0) + t * np.kron(e1, f1)
    phi_perp = np.kron(e0, f1)
    v = c * np.kron(al, phi) + d * np.kron(alp, phi_perp)
    k = seed % 3
    return _from_cut_order(v, Bipartition.of([k], 3))
