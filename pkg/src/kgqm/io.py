"""
File formats: key=value grid headers, KGState as CSV or flat binary,
FoldyState as CSV, JSON sidecars.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .foldy import FoldyState
from .grid import Field, GridSpec, parse_key_values
from .kg_hilbert import KGState

MAGIC = b"KGQMSTATE1"


def _header_lines(spec: GridSpec, kind: str) -> list[str]:
    return [f"# kgqm {kind}"] + [f"# {line}" for line in spec.to_config().splitlines()]


def _read_header(lines: list[str]) -> tuple[GridSpec, int]:
    header = []
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        header.append(lines[i][1:].strip())
        i += 1
    kv = [h for h in header if "=" in h]
    return GridSpec.from_config("\n".join(kv)), i


def _interleave(values: np.ndarray) -> np.ndarray:
    flat = values.ravel()
    return np.column_stack([flat.real, flat.imag])


def write_kgstate(path: str | Path, s: KGState, fmt: str | None = None) -> Path:
    """
    Write Cauchy data: grid header, then interleaved (re, im) site values of
    ψ(t₀) followed by ψ̇(t₀), sites in C order.

    ``fmt`` is ``"csv"`` or ``"bin"``; by default it follows the file suffix.
    """
    path = Path(path)
    fmt = fmt or ("bin" if path.suffix == ".bin" else "csv")
    data = np.vstack([_interleave(s.phi.values), _interleave(s.phidot.values)])
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            fh.write("\n".join(_header_lines(s.spec, "kgstate")) + "\n")
            fh.write("re,im\n")
            for re, im in data:
                fh.write(f"{float(re)!r},{float(im)!r}\n")
    elif fmt == "bin":
        header = s.spec.to_config().encode()
        with path.open("wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<I", len(header)))
            fh.write(header)
            fh.write(data.astype("<f8").tobytes())
    else:
        raise ConfigurationError(f"unknown state format {fmt!r}")
    return path


def _split(spec: GridSpec, data: np.ndarray) -> KGState:
    size = int(np.prod(spec.shape))
    if data.shape != (2 * size, 2):
        raise ConfigurationError(f"expected {2 * size} rows of (re, im), got {data.shape[0]}")
    z = data[:, 0] + 1j * data[:, 1]
    return KGState(Field(spec, z[:size].reshape(spec.shape)), Field(spec, z[size:].reshape(spec.shape)))


def read_kgstate(path: str | Path) -> KGState:
    path = Path(path)
    raw = path.read_bytes()
    if raw.startswith(MAGIC):
        off = len(MAGIC)
        (hlen,) = struct.unpack("<I", raw[off : off + 4])
        off += 4
        spec = GridSpec.from_config(raw[off : off + hlen].decode())
        payload = raw[off + hlen :]
        if len(payload) % 16:
            raise ConfigurationError(f"{path}: truncated binary payload")
        return _split(spec, np.frombuffer(payload, dtype="<f8").reshape(-1, 2))
    lines = raw.decode().splitlines()
    spec, i = _read_header(lines)
    if i >= len(lines) or lines[i].strip() != "re,im":
        raise ConfigurationError(f"{path}: missing 're,im' column header")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[i + 1 :] if line.strip()])
    return _split(spec, data.reshape(-1, 2))


def foldy_rows(s: FoldyState):
    up, lo = s.upper.values, s.lower.values
    for idx in np.ndindex(*s.spec.shape):
        yield (*idx, up[idx].real, up[idx].imag, lo[idx].real, lo[idx].imag)


def write_foldy_csv(path: str | Path, s: FoldyState) -> Path:
    """Columns: one site index per axis, then Re/Im of f(+, x) and f(-, x)."""
    path = Path(path)
    spec = s.spec
    axes = [f"i{a}" for a in range(spec.d)]
    with path.open("w", newline="") as fh:
        fh.write("\n".join(_header_lines(spec, "foldy")) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(axes + ["re_plus", "im_plus", "re_minus", "im_minus"])
        for row in foldy_rows(s):
            w.writerow([*row[: spec.d], *(repr(float(v)) for v in row[spec.d :])])
    return path


def read_foldy_csv(path: str | Path) -> FoldyState:
    lines = Path(path).read_text().splitlines()
    spec, i = _read_header(lines)
    reader = csv.reader(lines[i + 1 :])
    up = np.zeros(spec.shape, dtype=complex)
    lo = np.zeros(spec.shape, dtype=complex)
    for row in reader:
        idx = tuple(int(v) for v in row[: spec.d])
        rp, ip, rm, im = (float(v) for v in row[spec.d :])
        up[idx] = rp + 1j * ip
        lo[idx] = rm + 1j * im
    return FoldyState(Field(spec, up), Field(spec, lo))


def write_json(path: str | Path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def read_config(path: str | Path) -> dict[str, str]:
    try:
        return parse_key_values(Path(path).read_text())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
