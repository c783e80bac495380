from __future__ import annotations

import json

import numpy as np
import pytest

from conftest import rel
from kgqm.errors import ConfigurationError
from kgqm.foldy import FoldyState, to_foldy
from kgqm.grid import GridSpec, random_field
from kgqm.io import (
    MAGIC,
    read_config,
    read_foldy_csv,
    read_kgstate,
    write_foldy_csv,
    write_json,
    write_kgstate,
)
from kgqm.kg_hilbert import random_kg_state


@pytest.mark.parametrize("suffix", [".csv", ".bin"])
def test_kgstate_round_trip(tmp_path, spec_any_dim, rng, suffix):
    s = random_kg_state(spec_any_dim, rng)
    path = write_kgstate(tmp_path / f"state{suffix}", s)
    back = read_kgstate(path)
    assert back.spec == s.spec
    assert rel(back, s) == 0


def test_kgstate_csv_layout(tmp_path, rng):
    spec = GridSpec(n=4, mu=2.0)
    s = random_kg_state(spec, rng)
    lines = write_kgstate(tmp_path / "s.csv", s).read_text().splitlines()
    assert lines[0] == "# kgqm kgstate"
    header = [line for line in lines if line.startswith("#")]
    body = lines[len(header) :]
    assert body[0] == "re,im"
    assert len(body) == 1 + 2 * spec.n
    re, im = (float(v) for v in body[1].split(","))
    assert complex(re, im) == s.phi.values[0]
    re, im = (float(v) for v in body[1 + spec.n].split(","))
    assert complex(re, im) == s.phidot.values[0]


def test_kgstate_binary_layout(tmp_path, rng):
    spec = GridSpec(n=4)
    s = random_kg_state(spec, rng)
    raw = write_kgstate(tmp_path / "s.bin", s).read_bytes()
    assert raw.startswith(MAGIC)
    payload = np.frombuffer(raw[-8 * 4 * spec.n :], dtype="<f8")
    assert payload[0] == s.phi.values[0].real and payload[1] == s.phi.values[0].imag


def test_explicit_format_overrides_suffix(tmp_path, rng):
    s = random_kg_state(GridSpec(n=4), rng)
    path = write_kgstate(tmp_path / "state.dat", s, fmt="bin")
    assert path.read_bytes().startswith(MAGIC)
    with pytest.raises(ConfigurationError):
        write_kgstate(tmp_path / "x", s, fmt="hdf5")


@pytest.mark.parametrize(
    "content",
    [
        "# kgqm kgstate\n# n=4\nwrong\n",
        "# kgqm kgstate\n# n=4\nre,im\n1,2\n",
        "# kgqm kgstate\n# n=3\nre,im\n",
    ],
)
def test_kgstate_bad_csv(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(ConfigurationError):
        read_kgstate(path)


def test_kgstate_truncated_binary(tmp_path, rng):
    path = write_kgstate(tmp_path / "s.bin", random_kg_state(GridSpec(n=4), rng))
    path.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(ConfigurationError):
        read_kgstate(path)


def test_foldy_csv_round_trip(tmp_path, spec_any_dim, rng):
    f = FoldyState(random_field(spec_any_dim, rng), random_field(spec_any_dim, rng))
    path = write_foldy_csv(tmp_path / "f.csv", f)
    back = read_foldy_csv(path)
    assert back.spec == f.spec
    assert rel(back, f) == 0


def test_foldy_csv_columns(tmp_path, rng):
    spec = GridSpec(d=2, n=4)
    f = to_foldy(random_kg_state(spec, rng))
    lines = [l for l in write_foldy_csv(tmp_path / "f.csv", f).read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "i0,i1,re_plus,im_plus,re_minus,im_minus"
    assert len(lines) == 1 + spec.n**2
    i0, i1, rp, ip, rm, im = lines[1 + 5].split(",")
    assert (int(i0), int(i1)) == (1, 1)
    assert complex(float(rp), float(ip)) == f.upper.values[1, 1]
    assert complex(float(rm), float(im)) == f.lower.values[1, 1]


def test_json_sorted(tmp_path):
    path = write_json(tmp_path / "r.json", {"b": 1, "a": [1.5]})
    text = path.read_text()
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": [1.5], "b": 1}


def test_read_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("n = 16\nseed=3 # comment\n")
    assert read_config(path) == {"n": "16", "seed": "3"}
    with pytest.raises(ConfigurationError):
        read_config(tmp_path / "missing.cfg")
