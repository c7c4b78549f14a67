import numpy as np
import pytest

from kernelkoop import (
    CsvFormatError,
    KernelSpec,
    PendulumConfig,
    PointSet,
    fit_pullback,
    simulate,
    subselect_centers,
)
from kernelkoop.io import (
    atomic_write_text,
    read_estimate_csv,
    read_pointset_csv,
    read_trajectory_csv,
    write_estimate_csv,
    write_pointset_csv,
    write_trajectory_csv,
)


def test_trajectory_round_trip_exact(tmp_path):
    ds = simulate(PendulumConfig(steps=40))
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, ds, {"dynamics.h": "0.1"})
    back = read_trajectory_csv(path)
    assert np.array_equal(back.k, ds.k)
    assert np.array_equal(back.x, ds.x)
    assert np.array_equal(back.x_next, ds.x_next)
    assert np.array_equal(back.y_next, ds.y_next)
    assert path.read_text().startswith("# dynamics.h = 0.1\n")


def test_trajectory_header_matches_contract(tmp_path):
    ds = simulate(PendulumConfig(steps=3))
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, ds)
    header = [l for l in path.read_text().splitlines() if not l.startswith("#")][0]
    assert header == "k,x1,x2,x1_next,x2_next,y_next"


def test_pointset_round_trip_exact(tmp_path):
    rng = np.random.default_rng(2)
    ps = PointSet(rng.normal(size=(9, 3)), indices=np.arange(10, 19))
    path = tmp_path / "points.csv"
    write_pointset_csv(path, ps)
    back = read_pointset_csv(path)
    assert np.array_equal(back.points, ps.points)
    assert np.array_equal(back.indices, ps.indices)


def test_estimate_round_trip_exact(tmp_path):
    ds = simulate(PendulumConfig(steps=60))
    centers = subselect_centers(ds, 0.5)
    kernel = KernelSpec("wendland_c4", support_scale=1.5)
    est = fit_pullback(ds, centers, kernel)
    path = tmp_path / "estimate.csv"
    write_estimate_csv(path, est)
    back = read_estimate_csv(path)
    assert back.mode == est.mode
    assert back.kernel == est.kernel
    assert np.array_equal(back.alpha, est.alpha)
    assert np.array_equal(back.centers.points, est.centers.points)
    assert np.array_equal(back.centers.indices, est.centers.indices)
    assert np.array_equal(back.advanced_centers.points, est.advanced_centers.points)
    assert back.diagnostics.condition_number == est.diagnostics.condition_number
    assert back.diagnostics.jitter_used == est.diagnostics.jitter_used


def test_writes_are_deterministic(tmp_path):
    ds = simulate(PendulumConfig(steps=25))
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    write_trajectory_csv(a, ds, {"command": "simulate"})
    write_trajectory_csv(b, ds, {"command": "simulate"})
    assert a.read_bytes() == b.read_bytes()


def test_atomic_write_replaces_and_leaves_no_temp(tmp_path):
    target = tmp_path / "file.txt"
    atomic_write_text(target, "first")
    atomic_write_text(target, "second")
    assert target.read_text() == "second"
    assert [p.name for p in tmp_path.iterdir()] == ["file.txt"]


def test_read_rejects_malformed_files(tmp_path):
    path = tmp_path / "junk.csv"
    path.write_text("# only = comments\n")
    with pytest.raises(CsvFormatError):
        read_trajectory_csv(path)
    path.write_text("k,x1,x1_next,y_next\n0,bad,0.1,1.0\n")
    with pytest.raises(CsvFormatError):
        read_trajectory_csv(path)
    path.write_text("idx,x1\n")
    with pytest.raises(CsvFormatError):
        read_pointset_csv(path)
