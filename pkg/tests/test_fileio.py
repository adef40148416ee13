import numpy as np
import pytest

from pfl.fileio import (ArtifactWriter, fmt, load_field, save_field, sha256_of,
                        write_csv, write_density_pgm)
from pfl.grid import Field2D, make_grid
from pfl.sources import speckle


def test_pfl1_round_trip(tmp_path):
    g = make_grid(32, 48, 2e-6, 3e-6)
    f = speckle(make_grid(32, 48, 2e-6, 3e-6), 8e-6, 5.0, seed=4)
    path = tmp_path / "field.pfl1"
    save_field(path, f, z=0.0123)
    loaded, z = load_field(path)
    assert z == 0.0123
    assert loaded.grid == g
    assert loaded.unit_tag == f.unit_tag
    assert np.array_equal(loaded.values, f.values)


def test_pfl1_header_layout(tmp_path):
    g = make_grid(8, 8, 1.0)
    f = Field2D(grid=g, values=np.zeros((8, 8), dtype=complex),
                unit_tag="dimensionless")
    path = tmp_path / "t.pfl1"
    save_field(path, f, z=2.0)
    raw = path.read_bytes()
    assert raw[:4] == b"PFL1"
    assert int.from_bytes(raw[4:12], "little") == 8    # nx
    assert int.from_bytes(raw[12:20], "little") == 8   # ny
    assert np.frombuffer(raw[20:28], "<f8")[0] == 1.0  # dx
    assert int.from_bytes(raw[36:44], "little") == 1   # unit tag
    assert len(raw) == 52 + 8 * 8 * 16


def test_pfl1_bad_magic(tmp_path):
    p = tmp_path / "x.pfl1"
    p.write_bytes(b"NOPE" + b"\x00" * 60)
    with pytest.raises(ValueError, match="magic"):
        load_field(p)


def test_pfl1_truncated(tmp_path):
    g = make_grid(8, 8, 1.0)
    f = Field2D(grid=g, values=np.zeros((8, 8), dtype=complex))
    p = tmp_path / "t.pfl1"
    save_field(p, f)
    p.write_bytes(p.read_bytes()[:-8])
    with pytest.raises(ValueError, match="truncated"):
        load_field(p)


def test_pgm_format_and_sidecar(tmp_path):
    g = make_grid(16, 8, 1.0)
    values = np.linspace(0, 1, 16 * 8).reshape(8, 16).astype(complex)
    f = Field2D(grid=g, values=values)
    path = write_density_pgm(tmp_path / "rho.pgm", f)
    raw = path.read_bytes()
    header, rest = raw.split(b"65535\n", 1)
    assert header == b"P5\n16 8\n"
    samples = np.frombuffer(rest, dtype=">u2").reshape(8, 16)
    assert samples.max() == 65535  # max-scaled per frame
    sidecar = (tmp_path / "rho.pgm.scale.txt").read_text()
    assert "max_value" in sidecar
    peak = float(sidecar.splitlines()[0].split("=")[1])
    assert peak == pytest.approx(float(f.density().max()))


def test_fmt_round_trips_doubles():
    for x in (0.1, 1e-17, np.pi, 1.0 / 3.0, 2.0**-52):
        assert float(fmt(x)) == x
    assert fmt(7) == "7"


def test_write_csv_deterministic(tmp_path):
    rows = [(0.1, 2), (np.pi, 4)]
    p1 = write_csv(tmp_path / "a.csv", ["x", "n"], rows)
    p2 = write_csv(tmp_path / "b.csv", ["x", "n"], rows)
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_text().splitlines()[0] == "x,n"


def test_artifact_writer_manifest_exact(tmp_path):
    w = ArtifactWriter(tmp_path / "run")
    w.csv("data.csv", ["a"], [(1,)])
    w.text("note.txt", "hello\n")
    manifest = w.write_manifest()
    lines = manifest.read_text().strip().splitlines()
    names = sorted(line.split(maxsplit=1)[1] for line in lines)
    assert names == ["data.csv", "note.txt"]
    digest, name = lines[0].split(maxsplit=1)
    assert digest == sha256_of(tmp_path / "run" / name)
