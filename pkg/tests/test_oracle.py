import io
import math

import numpy as np
import pytest

from slabheat.domain import Constant, EvalPoint, PiecewiseLinear, SingleMode, SlabProblem
from slabheat.errors import ResourceLimit, SnapshotNotFound
from slabheat.oracle import FdConfig, compare, solve_fd, solve_tridiagonal
from slabheat.series import SeriesSolution

from conftest import hat, parabola

PI2 = math.pi**2
UNIT_MODE = SlabProblem(1.0, 1.0, SingleMode(1, 1.0))


def mode_error(n_x, dt, t=0.1):
    fd = solve_fd(UNIT_MODE, FdConfig(n_x, dt, t), [t])
    ta, row = fd.snapshot(t)
    return float(np.max(np.abs(row - math.exp(-PI2 * ta) * np.sin(math.pi * fd.x))))


def test_tridiagonal_solver_matches_dense():
    rng = np.random.default_rng(1)
    n = 9
    sub, sup = rng.uniform(-1, 1, n - 1), rng.uniform(-1, 1, n - 1)
    diag = 3 + rng.uniform(0, 1, n)
    rhs = rng.normal(size=n)
    A = np.diag(diag) + np.diag(sub, -1) + np.diag(sup, 1)
    np.testing.assert_allclose(solve_tridiagonal(sub, diag, sup, rhs), np.linalg.solve(A, rhs), rtol=1e-13)


def test_zero_problem():
    fd = solve_fd(SlabProblem(1.0, 1.0, Constant(0.0)), FdConfig(11, 0.01, 0.1), [0.05, 0.1])
    assert not np.any(fd.u)


def test_single_mode_accuracy():
    assert mode_error(401, 1e-5) < 1e-4


def test_second_order_refinement():
    coarse = mode_error(51, 4e-4)
    fine = mode_error(101, 2e-4)
    assert 3.5 < coarse / fine < 4.5


def test_structure():
    fd = solve_fd(SlabProblem(1.0, 1.0, Constant(1.0)), FdConfig(21, 1e-3, 0.1), [0.1, 0.05])
    assert fd.x[0] == 0.0 and fd.x[-1] == 1.0
    assert np.all(fd.u[:, 0] == 0) and np.all(fd.u[:, -1] == 0)
    np.testing.assert_array_equal(fd.u[0, 1:-1], 1.0)
    assert list(fd.times) == pytest.approx([0.0, 0.1, 0.05])


def test_snapshot_rounds_to_grid_time():
    fd = solve_fd(UNIT_MODE, FdConfig(11, 0.03, 0.3), [0.1])
    t, _ = fd.snapshot(0.1)
    assert t == pytest.approx(0.09)
    assert fd.snapshot(0.09)[0] == t
    with pytest.raises(SnapshotNotFound):
        fd.snapshot(0.2)


def test_resource_limit():
    with pytest.raises(ResourceLimit):
        solve_fd(UNIT_MODE, FdConfig(1001, 1e-9, 1.0), max_cells=10**6)


def test_config_validation():
    for args in [(2, 0.1, 1.0), (11, 0.0, 1.0), (11, 0.5, 0.1)]:
        with pytest.raises(ValueError):
            FdConfig(*args)


def test_maximum_principle_and_energy_decay():
    # dt <= dx^2 / c avoids Crank-Nicolson's oscillatory regime
    n_x = 51
    dx = 1 / (n_x - 1)
    times = list(np.linspace(0.01, 0.3, 30))
    for f in (hat(), parabola(), PiecewiseLinear([0, 0.2, 0.3, 1.0], [0, 0, 2, 0])):
        fd = solve_fd(SlabProblem(1.0, 1.0, f), FdConfig(n_x, dx * dx, 0.3), times)
        assert fd.u.min() >= -1e-12 * fd.u[0].max()
        energy = np.sum(fd.u**2, axis=1)
        assert np.all(np.diff(energy) <= 0)


def test_linearity_of_the_scheme():
    cfg = FdConfig(41, 1e-3, 0.2)
    a = solve_fd(SlabProblem(1.0, 1.0, hat()), cfg, [0.05, 0.2])
    b = solve_fd(SlabProblem(1.0, 1.0, PiecewiseLinear([0, 0.5, 1], [0, -3.5, 0])), cfg, [0.05, 0.2])
    np.testing.assert_allclose(b.u, -3.5 * a.u, rtol=1e-13, atol=1e-15)


def test_compare_zero_problem():
    p = SlabProblem(1.0, 1.0, Constant(0.0))
    rep = compare(SeriesSolution.build(p, 4), solve_fd(p, FdConfig(21, 1e-3, 0.1)), 0.1)
    assert rep.max_abs == 0.0 and rep.rms == 0.0


def test_compare_single_mode():
    fd = solve_fd(UNIT_MODE, FdConfig(401, 1e-5, 0.1), [0.1])
    rep = compare(SeriesSolution.build(UNIT_MODE, 4), fd, 0.1)
    assert rep.max_abs < 2e-4
    assert rep.t_actual == pytest.approx(0.1)


def test_compare_parabola():
    p = SlabProblem(1.0, 1.0, parabola())
    fd = solve_fd(p, FdConfig(401, 1e-5, 0.1), [0.1])
    rep = compare(SeriesSolution.build(p, 64), fd, 0.1)
    assert rep.max_abs < 1e-3
    assert rep.tail_bound is not None and rep.tail_bound >= 0
    with pytest.raises(SnapshotNotFound):
        compare(SeriesSolution.build(p, 4), fd, 0.05)


def test_csv_layout():
    fd = solve_fd(UNIT_MODE, FdConfig(3, 0.5, 0.5))
    buf = io.StringIO()
    fd.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "x,t,u"
    assert lines[1:4] == ["0.0,0.0,0.0", "0.5,0.0,1.0", "1.0,0.0,0.0"]
    assert len(lines) == 7
