import json

import numpy as np
import pytest

import holoimg


def desk():
    g = holoimg.ArrayGeometry.equispaced(500.0, 9)
    f = holoimg.FrequencyGrid.equispaced_thz(580.0, 620.0, 4)
    return g, f


def test_linear_index():
    assert holoimg.linear_index(1, 1, 81) == 1
    assert holoimg.linear_index(81, 2, 81) == 162
    assert holoimg.split_index(162, 81) == (81, 2)
    with pytest.raises(IndexError):
        holoimg.linear_index(0, 1, 4)


def test_polarization_identity():
    rng = np.random.default_rng(0)
    x = rng.normal(size=5) + 1j * rng.normal(size=5)
    y = rng.normal(size=5) + 1j * rng.normal(size=5)
    n = lambda v: float(np.vdot(v, v).real)
    got = holoimg.polarization_inner(n(x + y), n(x), n(y), n(x - 1j * y))
    assert abs(got - np.vdot(x, y)) < 1e-12


def test_recover_mr_is_exact():
    g, f = desk()
    p = holoimg.response([(-5.0, 9990.0, 1.0), (12.0, 10010.0, 0.5 - 0.2j)], g, f)
    assert p.shape == (9, 36)
    row = p[4]
    m, count = holoimg.recover_mr(row, 9, 4)
    truth = np.outer(row.conj(), row)
    assert np.abs(m - truth).max() <= 1e-10 * np.abs(truth).max()
    assert count == 36 + 36 * 35


def test_full_matrix_from_all_receivers():
    g, f = desk()
    p = holoimg.response([(3.0, 10000.0, 1.0)], g, f)
    mrs = [holoimg.recover_mr(p[r], 9, 4)[0] for r in range(9)]
    m = holoimg.recover_full_m(mrs, 9, 4)
    truth = p.conj().T @ p
    assert np.abs(m - truth).max() <= 1e-8 * np.abs(truth).max()
    with pytest.raises(ValueError):
        holoimg.recover_full_m(mrs, 9, 4, colocated=False)


def test_interf_peaks_at_scatterer():
    g, f = desk()
    w = holoimg.ImageWindow.centered([0.0, 10000.0], [80.0, 40.0], [2.0, 2.0])
    p = holoimg.response([(5.0, 10005.0, 1.0)], g, f)
    row = p[4]
    img = holoimg.image_interf(np.outer(row.conj(), row), g, f, w, 5)
    assert img.shape == w.shape()
    ix, iz = np.unravel_index(np.argmax(img), img.shape)
    assert np.allclose(w.point(ix, iz), [5.0, 10005.0])
    peaks = holoimg.peaks(img, w, 0.5, 3.0)
    assert (peaks[0]["ix"], peaks[0]["iz"]) == (ix, iz)


def test_mask_is_binary_and_symmetric():
    g, f = desk()
    z = holoimg.mask(g, f, 125.0, 0.12 * f.bandwidth())
    assert set(np.unique(z)) <= {0.0, 1.0}
    assert np.array_equal(z, z.T)
    assert np.all(np.diag(z) == 1.0)


def test_preset_roundtrip_and_pipeline():
    assert "fig_h3" in holoimg.preset_names()
    cfg = json.loads(holoimg.preset_config("fig_h3"))
    cfg["run"]["functionals"] = ["km", "interf"]
    res = holoimg.run_experiment(json.dumps(cfg), route="phases")
    assert set(res["images"]) == {"km", "interf"}
    for f in ("km", "interf"):
        assert all(m["distance"] < 1e-9 for m in res["images"][f]["matches"])


def test_bad_config_raises():
    with pytest.raises(ValueError, match="array.count"):
        holoimg.validate_config('{"frequencies": {"list": [600]}, "array": {"count": "x", "aperture": 1}}')


def test_moments_rows():
    rows = holoimg.moments(realizations=100, seed=3)
    names = {r["quantity"] for r in rows}
    assert "cross_moment" in names
    assert all(r["n"] == 100 for r in rows)
