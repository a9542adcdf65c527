"""JSON formats: state files, set manifests and certificate payloads.

Complex numbers are ``[re, im]`` pairs, floats use Python's shortest
round-trip repr. State files look like::

    {"dims": [2, 2, 2], "amps": [[0.0, 0.0], [0.577..., 0.0], ...]}
"""

from __future__ import annotations

import json
import os
import warnings
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, StateFileError
from .states import HilbertDims, PureState, normalize

NORM_WARN_TOL = 1e-6


def cpx(z) -> list:
    z = complex(z)
    return [_f(z.real), _f(z.imag)]


def _f(x) -> float:
    x = float(x)
    return 0.0 if x == 0 else x


def uncpx(pair) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise StateFileError(f"complex numbers are [re, im] pairs, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def vec(v) -> list:
    return [cpx(z) for z in np.asarray(v).reshape(-1)]


def state_to_dict(s: PureState) -> dict:
    return {"dims": [int(d) for d in s.dims], "amps": vec(s.amps)}


def state_from_dict(obj) -> PureState:
    if not isinstance(obj, dict) or "dims" not in obj or "amps" not in obj:
        raise StateFileError('state objects need "dims" and "amps"')
    try:
        dims = HilbertDims(obj["dims"])
    except (TypeError, ValueError) as exc:
        raise DimensionMismatch(str(exc)) from None
    amps = np.array([uncpx(z) for z in obj["amps"]], dtype=complex)
    s = PureState(dims, amps)
    if abs(s.norm - 1) > NORM_WARN_TOL:
        warnings.warn(f"state norm {s.norm:.9g} deviates from 1; renormalizing", stacklevel=2)
    return normalize(s)


def read_json(path) -> object:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}: malformed JSON ({exc.msg})") from None
    except OSError as exc:
        raise StateFileError(f"{path}: {exc.strerror}") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj) + "\n")


def read_state(path) -> PureState:
    return state_from_dict(read_json(path))


def write_state(path, s: PureState):
    write_json(path, state_to_dict(normalize(s)))


# ---------------------------------------------------------------- sets

def write_manifest(directory, s) -> Path:
    """Write one state file per vector of a :class:`StateSet` plus ``manifest.json``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    width = max(2, len(str(len(s.members))))
    members, comp = [], []
    for i, m in enumerate(s.members):
        name = f"member_{i:0{width}d}.json"
        write_state(d / name, m)
        members.append(name)
    for i, c in enumerate(s.complement_basis):
        name = f"complement_{i:0{width}d}.json"
        write_state(d / name, c)
        comp.append(name)
    path = d / "manifest.json"
    write_json(path, {"name": s.name, "dims": [int(x) for x in s.dims],
                      "members": members, "complement": comp})
    return path


def read_manifest(path):
    from .ueb import StateSet

    obj = read_json(path)
    if not isinstance(obj, dict) or not {"dims", "members", "complement"} <= set(obj):
        raise StateFileError('manifests need "dims", "members" and "complement"')
    base = Path(os.path.dirname(os.path.abspath(path)))
    members = [read_state(base / f) for f in obj["members"]]
    comp = [read_state(base / f) for f in obj["complement"]]
    dims = HilbertDims(obj["dims"])
    for st in members + comp:
        if tuple(st.dims) != tuple(dims):
            raise DimensionMismatch(f"set member with dims {list(st.dims)} in a {list(dims)} set")
    return StateSet(dims, members, comp, obj.get("name", ""))


# ---------------------------------------------------------------- payloads

def cut_list(cut) -> list:
    return list(cut.left_parties) if cut is not None else None


def witness_to_dict(w) -> dict:
    return {
        "strategy": w.strategy,
        "a": cpx(w.a),
        "b": cpx(w.b),
        "p": state_to_dict(w.p),
        "p_factors": [vec(f) for f in w.p_factors],
        "output": state_to_dict(w.output),
        "output_factors": [vec(f) for f in w.output_factors],
    }


def witness_from_dict(obj):
    from .certify import CollapseWitness

    try:
        p = state_from_dict(obj["p"])
        out = state_from_dict(obj["output"])
        return CollapseWitness(
            p=p, a=uncpx(obj["a"]), b=uncpx(obj["b"]), output=out,
            output_factors=tuple(np.array([uncpx(z) for z in f]) for f in obj["output_factors"]),
            strategy=obj.get("strategy", ""),
            p_factors=tuple(np.array([uncpx(z) for z in f]) for f in obj.get("p_factors", [])))
    except (KeyError, TypeError) as exc:
        raise StateFileError(f"malformed witness payload ({exc})") from None


def structure_to_dict(st) -> dict:
    return {
        "cut": cut_list(st.cut),
        "c": _f(st.c), "d": _f(st.d), "s": _f(st.s), "t": _f(st.t),
        "alpha": vec(st.alpha.amps),
        "alpha_perp": vec(st.alpha_perp.amps),
        "phi": vec(st.phi.amps),
        "phi_perp": vec(st.phi_perp.amps),
        "schmidt_basis": {k: vec(v) for k, v in zip(("e0", "e1", "f0", "f1"), st.basis)},
        "overlaps": [[cpx(z) for z in row] for row in st.overlaps],
        "bi_orth_flag": bool(st.bi_orth_flag),
    }


def certificate_to_dict(cert) -> dict:
    out = {"verdict": cert.verdict.value}
    if cert.cut is not None:
        out["cut"] = cut_list(cert.cut)
    if cert.rank is not None:
        out["rank"] = int(cert.rank)
    if cert.structure is not None:
        out["structure"] = structure_to_dict(cert.structure)
    if cert.witness is not None:
        out["witness"] = witness_to_dict(cert.witness)
    if cert.evidence:
        out["evidence"] = _jsonable(cert.evidence)
    return out


def product_witness_to_dict(w) -> dict:
    return {"objective": _f(w.objective), "restart": int(w.restart),
            "state": state_to_dict(w.state), "factors": [vec(f) for f in w.factors]}


def discrimination_to_dict(v) -> dict:
    out = {"target_index": int(v.target_index), "verdict": v.verdict.value}
    if v.reason:
        out["reason"] = v.reason
    if v.witness is not None:
        out["witness"] = product_witness_to_dict(v.witness)
    if v.certificate is not None:
        out["certificate"] = certificate_to_dict(v.certificate)
    if v.search is not None:
        out["search"] = {"restarts": v.search.restarts,
                         "best_objective": _f(v.search.best_objective),
                         "reason": v.search.reason}
    return out


def prop5_to_dict(v) -> dict:
    out = {
        "cut": cut_list(v.structure.cut),
        "assumptions_hold": bool(v.assumptions_hold),
        "chi": vec(v.chi.amps),
        "eta": vec(v.eta.amps),
        "chi_overlaps": [[cpx(z) for z in row] for row in v.chi_overlaps],
        "output": state_to_dict(v.output),
        "output_class": v.output_class.value,
        "output_entangled": bool(v.output_entangled),
    }
    if v.collapse is not None:
        out["collapse"] = witness_to_dict(v.collapse)
    return out


def report_to_dict(r) -> dict:
    return {
        "ok": r.ok,
        "orthonormality_error": _f(r.orthonormality_error),
        "spans_space": bool(r.spans_space),
        "member_classes": [t.value for t in r.member_classes],
        "complement_product": [bool(x) for x in r.complement_product],
        "purity": r.purity.value,
        "free_party": r.free_party,
        "samples": int(r.samples),
        "sample_failures": int(r.sample_failures),
        "failures": list(r.failures),
    }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return _f(x)
    if isinstance(x, (complex, np.complexfloating)):
        return cpx(x)
    return x
