"""Unit tests for the escape-time grid kernels and image writers."""

import json
import struct
import zlib

import numpy as np
import pytest

from tractlab import gridkernel
from tractlab.errors import RangeError
from tractlab.gridkernel import Window
from tractlab.models import EntireMapSpec

SPECS = [
    EntireMapSpec.exp_affine(2.0 + 0.5j, 1.0 - 0.25j),
    EntireMapSpec.lambda_expm1(0.5),
    EntireMapSpec.zexp(),
    EntireMapSpec.sinh(0.575),
    EntireMapSpec.exp_plus_kappa(1.0038 + 2.8999j),
]
WIN = Window(-4.0, 4.0, -4.0, 4.0)


def test_window_validation():
    with pytest.raises(RangeError):
        Window(1.0, 1.0, 0.0, 2.0)
    assert Window.from_json([0, 1, 0, 1]) == Window(0.0, 1.0, 0.0, 1.0)
    assert Window.from_json(
        {"xmin": 0, "xmax": 1, "ymin": 0, "ymax": 1}
    ).to_json() == [0, 1, 0, 1]


def test_classify_window_argument_checks():
    spec = SPECS[0]
    with pytest.raises(RangeError):
        gridkernel.classify_window(spec, WIN, (0, 8), 50.0, 10)
    with pytest.raises(RangeError):
        gridkernel.classify_window(spec, WIN, (8, 8), 50.0, 0)
    with pytest.raises(RangeError):
        gridkernel.classify_window(spec, WIN, (8, 8), -1.0, 10)
    with pytest.raises(RangeError):
        gridkernel.classify_window(spec, WIN, (8, 8), 50.0, 10, backend="cuda")


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.family)
def test_codes_and_determinism(spec):
    g1 = gridkernel.classify_window(spec, WIN, (32, 32), 50.0, 12)
    g2 = gridkernel.classify_window(spec, WIN, (32, 32), 50.0, 12)
    assert g1.shape == (32, 32)
    assert (g1 == g2).all()
    assert set(np.unique(g1)).issubset({0, 1, 2})


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.family)
@pytest.mark.skipif(
    gridkernel.BACKEND != "compiled", reason="only one backend built"
)
def test_backends_agree(spec):
    a = gridkernel.classify_window(spec, WIN, (48, 48), 50.0, 15, backend="compiled")
    b = gridkernel.classify_window(spec, WIN, (48, 48), 50.0, 15, backend="numpy")
    assert (a == b).all()


def test_pixel_centers_and_row_order():
    # tiny-grid oracle: iterate the plane map at the pixel centers directly
    spec = EntireMapSpec.exp_plus_kappa(1.0038 + 2.8999j)
    win = Window(-2.0, 2.0, -2.0, 2.0)
    res, radius, horizon = (3, 3), 50.0, 12
    grid = gridkernel.classify_window(spec, win, res, radius, horizon)
    dx, dy = 4.0 / 3, 4.0 / 3
    for row in range(3):
        for col in range(3):
            z = complex(
                win.xmin + (col + 0.5) * dx,
                win.ymax - (row + 0.5) * dy,  # row 0 is the window top
            )
            code = 0
            for _ in range(horizon):
                if z.real > 700.0:
                    code = 2
                    break
                w = spec.eval(z)
                if abs(w) > 1e300:
                    code = 2
                    break
                if abs(w) < radius:
                    code = 1
                    break
                z = w
            assert grid[row, col] == code, f"pixel ({row}, {col})"


def test_black_mask_merges_large_codes():
    grid = np.array([[0, 1], [2, 1]], dtype=np.uint8)
    mask = gridkernel.black_mask(grid)
    assert mask.tolist() == [[True, False], [True, False]]


def test_pgm_roundtrip(tmp_path):
    grid = gridkernel.classify_window(SPECS[4], WIN, (32, 16), 50.0, 10)
    out = tmp_path / "img.pgm"
    gridkernel.write_pgm(out, grid)
    data = out.read_bytes()
    header, rest = data.split(b"\n", 1)
    assert header == b"P5"
    dims, rest = rest.split(b"\n", 1)
    assert dims == b"32 16"
    maxval, pixels = rest.split(b"\n", 1)
    assert maxval == b"255"
    img = np.frombuffer(pixels, dtype=np.uint8).reshape(16, 32)
    assert ((img == 0) == gridkernel.black_mask(grid)).all()


def test_png_roundtrip(tmp_path):
    grid = gridkernel.classify_window(SPECS[3], WIN, (16, 16), 50.0, 10)
    out = tmp_path / "img.png"
    gridkernel.write_png(out, grid)
    data = out.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    w, h = struct.unpack(">II", data[16:24])
    assert (w, h) == (16, 16)
    idat_start = data.index(b"IDAT") + 4
    idat_len = struct.unpack(">I", data[idat_start - 8 : idat_start - 4])[0]
    raw = zlib.decompress(data[idat_start : idat_start + idat_len])
    rows = [raw[i * 17 + 1 : (i + 1) * 17] for i in range(16)]
    img = np.frombuffer(b"".join(rows), dtype=np.uint8).reshape(16, 16)
    assert ((img == 0) == gridkernel.black_mask(grid)).all()


def test_sidecar_roundtrip(tmp_path):
    out = tmp_path / "img.json"
    gridkernel.write_sidecar(out, SPECS[3], WIN, (64, 32), 50.0, 20)
    meta = gridkernel.read_sidecar(out)
    assert meta["finite_horizon_proxy"] is True
    assert meta["map_spec"] == SPECS[3]
    assert meta["window_obj"] == WIN
    assert meta["resolution"] == [64, 32]
    # the sidecar is enough to reproduce the classification exactly
    again = gridkernel.classify_window(
        meta["map_spec"],
        meta["window_obj"],
        tuple(meta["resolution"]),
        meta["escape_radius"],
        meta["horizon"],
    )
    first = gridkernel.classify_window(SPECS[3], WIN, (64, 32), 50.0, 20)
    assert (again == first).all()


def test_horizon_nesting_of_black_sets():
    spec = SPECS[4]
    masks = [
        gridkernel.black_mask(gridkernel.classify_window(spec, WIN, (64, 64), 50.0, hz))
        for hz in (5, 10, 20)
    ]
    assert (masks[1] <= masks[0]).all()
    assert (masks[2] <= masks[1]).all()
