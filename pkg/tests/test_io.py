import json
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uiscert import (DimensionMismatch, StateFileError, build_w_ueb, certify_uis, ghz_state,
                     normalize,
                     random_state, verify_collapse)
from uiscert import io


@given(st.integers(0, 10**9), st.sampled_from([[2, 2], [2, 3, 2], [3, 3, 3]]))
def test_state_roundtrip_exact(seed, dims):
    s = random_state(dims, seed)
    obj = json.loads(io.dumps(io.state_to_dict(s)))
    # the text form is lossless; the reader only renormalizes
    assert np.array_equal([io.uncpx(z) for z in obj["amps"]], s.amps)
    back = io.state_from_dict(obj)
    np.testing.assert_allclose(back.amps, s.amps, rtol=0, atol=1e-15)


def test_state_file_format(tmp_path):
    p = tmp_path / "s.json"
    io.write_state(p, ghz_state())
    obj = json.loads(p.read_text())
    assert obj["dims"] == [2, 2, 2]
    g = normalize(ghz_state()).amps
    assert obj["amps"][0] == [g[0].real, 0.0] and obj["amps"][1] == [0.0, 0.0]
    assert np.sum(np.abs([io.uncpx(z) for z in obj["amps"]]) ** 2) == pytest.approx(1, abs=1e-15)


def test_reader_renormalizes_with_warning(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"dims": [2], "amps": [[3, 0], [0, 4]]}))
    with pytest.warns(UserWarning, match="renormalizing"):
        s = io.read_state(p)
    np.testing.assert_allclose(s.amps, [0.6, 0.8j])
    p.write_text(json.dumps({"dims": [2], "amps": [[1, 0], [0, 1e-8]]}))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        io.read_state(p)


@pytest.mark.parametrize("text,err", [
    ("{", StateFileError),
    ('{"dims": [2]}', StateFileError),
    ('{"dims": [2], "amps": [[1, 0, 0], [0, 0]]}', StateFileError),
    ('{"dims": [2, 2], "amps": [[1, 0], [0, 0]]}', DimensionMismatch),
    ('{"dims": [1], "amps": [[1, 0]]}', DimensionMismatch),
])
def test_malformed_files(tmp_path, text, err):
    p = tmp_path / "bad.json"
    p.write_text(text)
    with pytest.raises(err):
        io.read_state(p)


def test_missing_file(tmp_path):
    with pytest.raises(StateFileError):
        io.read_state(tmp_path / "nope.json")


def test_manifest_roundtrip(tmp_path):
    s = build_w_ueb()
    path = io.write_manifest(tmp_path / "w", s)
    man = json.loads(path.read_text())
    assert man["dims"] == [2, 2, 2] and len(man["members"]) == 6 and len(man["complement"]) == 2
    back = io.read_manifest(path)
    for a, b in zip(s.members + s.complement_basis, back.members + back.complement_basis):
        assert np.array_equal(a.amps, b.amps)


def test_witness_roundtrip():
    psi = ghz_state()
    cert = certify_uis(psi)
    payload = json.loads(io.dumps(io.certificate_to_dict(cert)))
    w = io.witness_from_dict(payload["witness"])
    assert verify_collapse(psi, w)
    with pytest.raises(StateFileError):
        io.witness_from_dict({"a": [1, 0]})
