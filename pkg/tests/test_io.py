import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import sample_form
from gaugeflow.io import MAGIC, SnapshotError, parse_snapshot, read_snapshot, snapshot_bytes, write_snapshot


@given(st.sampled_from([2, 3, 4]), st.data(), st.integers(0, 1000))
@settings(max_examples=10, deadline=None)
def test_round_trip_is_bitwise(m, data, seed):
    p = data.draw(st.integers(0, m))
    B = sample_form(m, p, 8, seed, n=2)
    out, meta = parse_snapshot(snapshot_bytes(B, group="su2"))
    assert out.degree == p and out.grid == B.grid
    assert out.data.tobytes() == B.data.tobytes()
    assert meta == {"group": "su2"}


def test_file_round_trip(tmp_path):
    B = sample_form(2, 1, 8, 3)
    path = tmp_path / "a.gf"
    write_snapshot(path, B)
    out, _ = read_snapshot(path)
    np.testing.assert_array_equal(out.data, B.data)


def test_layout_is_site_major():
    B = sample_form(2, 1, 8, 4)
    raw = snapshot_bytes(B)
    body = np.frombuffer(raw[raw.index(b"\n\n") + 2:], dtype="<c16")
    # first site: component 0 then component 1, each 2x2 row-major
    np.testing.assert_array_equal(body[:4], B.data[0, 0, 0].ravel())
    np.testing.assert_array_equal(body[4:8], B.data[1, 0, 0].ravel())
    np.testing.assert_array_equal(body[8:12], B.data[0, 0, 1].ravel())


def test_functional_order_from_reader():
    raw = snapshot_bytes(sample_form(4, 1, 8, 1, n=2))
    assert parse_snapshot(raw)[0].grid.n == 2
    assert parse_snapshot(raw, n=3)[0].grid.n == 3


@pytest.mark.parametrize("mutate,match", [
    (lambda r: r[:-10], "truncated snapshot: data starts at byte offset"),
    (lambda r: r + b"xx", "trailing data"),
    (lambda r: b"NOPE" + r[len(MAGIC):], "bad magic"),
    (lambda r: r.replace(b"k=2\n", b"k2\n"), "malformed header line"),
    (lambda r: r.replace(b"k=2\n", b""), "missing 'k'"),
    (lambda r: r.replace(b"N=8", b"N=x"), "integers"),
    (lambda r: r[:20], "truncated header"),
])
def test_malformed_input(mutate, match):
    raw = snapshot_bytes(sample_form(2, 1, 8, 1))
    with pytest.raises(SnapshotError, match=match):
        parse_snapshot(mutate(raw))


def test_truncation_message_names_offsets():
    raw = snapshot_bytes(sample_form(2, 1, 8, 1))
    start = raw.index(b"\n\n") + 2
    with pytest.raises(SnapshotError) as exc:
        parse_snapshot(raw[:-16])
    assert f"byte offset {start}" in str(exc.value)
    assert f"ends at byte offset {len(raw) - 16}" in str(exc.value)
    assert "16 bytes missing" in str(exc.value)


def test_bad_metadata_rejected():
    with pytest.raises(ValueError):
        snapshot_bytes(sample_form(2, 1, 8, 1), m=3)
