"""Binary field snapshots.

A snapshot is a short UTF-8 header followed by raw coefficients::

    GAUGEFLOW v1
    m=2
    N=32
    k=2
    degree=1
    <blank line>
    <little-endian float64 (re, im) pairs>

The body runs over sites in row-major order, then over multi-indices in
lexicographic order, then over matrix entries row-major.  Extra
``key=value`` lines (for instance ``group=su2``) are kept as metadata.
Scalar densities use ``k=1`` with zero imaginary parts.
"""

from __future__ import annotations

from importlib.resources import files
from math import comb

import numpy as np

from .forms import FormField, GridSpec

__all__ = [
    "MAGIC",
    "SnapshotError",
    "write_snapshot",
    "read_snapshot",
    "snapshot_bytes",
    "parse_snapshot",
    "fixture_path",
]

MAGIC = "GAUGEFLOW v1"
_REQUIRED = ("m", "N", "k", "degree")
_DTYPE = np.dtype("<c16")


class SnapshotError(ValueError):
    """Malformed or truncated snapshot."""


def snapshot_bytes(B, **meta):
    """Serialize a form to snapshot bytes."""
    g = B.grid
    lines = [MAGIC, f"m={g.m}", f"N={g.N}", f"k={g.k}", f"degree={B.degree}"]
    for key, value in meta.items():
        if key in _REQUIRED or "=" in str(key) or "\n" in f"{key}{value}":
            raise ValueError(f"invalid metadata entry {key!r}")
        lines.append(f"{key}={value}")
    header = ("\n".join(lines) + "\n\n").encode("utf-8")
    body = np.moveaxis(B.data, 0, g.m).astype(_DTYPE, copy=False)
    return header + np.ascontiguousarray(body).tobytes()


def write_snapshot(path, B, **meta):
    with open(path, "wb") as fh:
        fh.write(snapshot_bytes(B, **meta))


def parse_snapshot(raw, n=None):
    """Decode snapshot bytes; returns ``(FormField, metadata dict)``."""
    pos = 0
    fields = {}
    first = True
    while True:
        end = raw.find(b"\n", pos)
        if end < 0:
            raise SnapshotError(f"truncated header: no blank line before byte offset {len(raw)}")
        try:
            line = raw[pos:end].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SnapshotError(f"header line at byte offset {pos} is not UTF-8") from exc
        line_start, pos = pos, end + 1
        if first:
            if line != MAGIC:
                raise SnapshotError(f"bad magic {line!r} at byte offset 0, expected {MAGIC!r}")
            first = False
            continue
        if line == "":
            break
        key, sep, value = line.partition("=")
        if not sep or not key:
            raise SnapshotError(f"malformed header line {line!r} at byte offset {line_start}")
        fields[key.strip()] = value.strip()
    try:
        m, N, k, degree = (int(fields[key]) for key in _REQUIRED)
    except KeyError as exc:
        raise SnapshotError(f"header is missing {exc.args[0]!r}") from None
    except ValueError:
        raise SnapshotError("header fields m, N, k, degree must be integers") from None
    if not 0 <= degree <= m:
        raise SnapshotError(f"degree={degree} is outside 0..{m}")
    try:
        grid = GridSpec(m, N, k, n if n is not None else max(2, (m + 1) // 2))
    except ValueError as exc:
        raise SnapshotError(f"invalid grid in header: {exc}") from None
    ncomp = comb(m, degree)
    expected = N**m * ncomp * k * k * _DTYPE.itemsize
    have = len(raw) - pos
    if have < expected:
        raise SnapshotError(
            f"truncated snapshot: data starts at byte offset {pos} and needs {expected} bytes, "
            f"but the file ends at byte offset {len(raw)} ({expected - have} bytes missing)")
    if have > expected:
        raise SnapshotError(f"trailing data after byte offset {pos + expected} ({have - expected} extra bytes)")
    body = np.frombuffer(raw, dtype=_DTYPE, offset=pos).reshape((N,) * m + (ncomp, k, k))
    data = np.ascontiguousarray(np.moveaxis(body, m, 0)).astype(complex)
    meta = {key: value for key, value in fields.items() if key not in _REQUIRED}
    return FormField(grid, degree, data), meta


def read_snapshot(path, n=None):
    """Read a snapshot file; ``n`` sets the functional order stored on the grid."""
    with open(path, "rb") as fh:
        return parse_snapshot(fh.read(), n)


def fixture_path(name="abelian_benchmark"):
    """Path of a snapshot shipped with the package (``abelian_benchmark``: N=64, T^2, su(2))."""
    path = files("gaugeflow") / "data" / f"{name}.gf"
    if not path.is_file():
        raise FileNotFoundError(f"no shipped fixture named {name!r}")
    return str(path)
