import numpy as np
import pytest

from micromtj.dynamics import SimState
from micromtj.materials import MaterialParams, VcmaProfile
from micromtj.mesh import Mesh, RegionMask, ScalarField, VectorField
from micromtj.protocol import (
    IndeterminateReadout,
    Trace,
    WriteTiming,
    initial_state,
    readout,
    recovery_time,
    write,
)


def synthetic(mz, release=2, dt=1e-12):
    n = len(mz)
    t = np.arange(n) * dt
    m = np.zeros((n, 3))
    m[:, 2] = mz
    J = np.where(np.arange(n) < release, 1e12, 0.0)
    return Trace(t, m, J, np.full(n, 0.1))


def test_recovery_time_last_upward_crossing():
    tr = synthetic([0.0, 0.1, 0.2, 0.95, 0.5, 0.92, 0.97])
    assert recovery_time(tr) == pytest.approx(3e-12)


def test_recovery_time_zero_when_already_uniform():
    assert recovery_time(synthetic([0.0, 0.5, -0.95, -0.99])) == 0.0


def test_recovery_time_none_when_never_uniform():
    assert recovery_time(synthetic([0.0, 0.0, 0.3, 0.5])) is None


def test_recovery_uses_absolute_mz():
    assert recovery_time(synthetic([0, 0, -0.2, -0.95, -0.97])) == pytest.approx(1e-12)


def test_trace_without_release_is_an_error():
    tr = synthetic([0.0, 0.1, 0.2], release=10)
    with pytest.raises(ValueError):
        recovery_time(tr)


def test_trace_rows_have_six_columns():
    rows = list(synthetic([0.0, 1.0]).rows())
    assert len(rows) == 2 and all(len(r) == len(Trace.COLUMNS) for r in rows)


def _state(mesh, mz):
    v = [np.sqrt(1 - mz**2), 0.0, mz]
    return SimState(0.0, VectorField.uniform(mesh, v), ScalarField.uniform(mesh, 8e5))


def test_readout_states():
    mesh = Mesh(4, 4)
    assert readout(_state(mesh, 0.9)) == ("P", 1)
    assert readout(_state(mesh, -0.9)) == ("AP", -1)
    with pytest.raises(IndeterminateReadout):
        readout(_state(mesh, 0.2))


def test_readout_uses_pillar_only():
    mesh = Mesh(4, 4)
    data = np.zeros((4, 4, 3))
    data[..., 2] = -1.0
    data[:, :2, 2] = 1.0
    st = SimState(0.0, VectorField(mesh, data), ScalarField.uniform(mesh, 8e5))
    assert readout(st, RegionMask.box(mesh, (0, 2), None)) == ("P", 1)
    assert readout(st, RegionMask.box(mesh, (2, 4), None)) == ("AP", -1)


def test_timing_validation():
    with pytest.raises(ValueError):
        WriteTiming(durations=(1.5e-12, 1e-12, 1e-12))
    with pytest.raises(ValueError):
        WriteTiming(durations=(1e-12, 0.0, 1e-12))


def test_schedule_segments():
    segs = WriteTiming().schedule(-1).segments
    assert [s.J for s in segs] == [1.5e12, 1.5e12, 0.0]
    assert [s.V for s in segs] == [0.0, -0.165, -0.165]


@pytest.fixture(scope="module")
def short_write():
    mesh = Mesh(8, 8)
    p = MaterialParams()
    vc = VcmaProfile()
    timing = WriteTiming(durations=(20e-12, 10e-12, 30e-12))
    init = initial_state(mesh, p, -1, vc)
    return init, write(init, 1, p, vc, timing), timing


def test_write_trace_layout(short_write):
    init, res, timing = short_write
    tr = res.trace
    assert len(tr.t) == 61
    np.testing.assert_allclose(np.diff(tr.t), 1e-12, rtol=1e-9)
    assert np.all(tr.J[:30] == 1.5e12) and np.all(tr.J[30:] == 0)
    assert np.all(tr.V[:20] == 0) and np.all(tr.V[20:] == 0.165)
    assert tr.release_index() == 30
    np.testing.assert_allclose(tr.m[0], init.m.data.reshape(-1, 3).mean(axis=0))
    assert res.final_state.t == pytest.approx(60e-12)


def test_short_write_does_not_switch(short_write):
    _, res, _ = short_write
    assert res.target == 1 and res.deterministic
    assert not res.switched


def test_zero_voltage_write_has_no_target():
    mesh = Mesh(4, 4)
    p = MaterialParams()
    vc = VcmaProfile()
    init = initial_state(mesh, p, 1, vc)
    res = write(init, 0, p, vc, WriteTiming(durations=(5e-12, 5e-12, 5e-12)))
    assert res.target == 0 and not res.deterministic and not res.switched
    assert np.all(res.trace.V == 0)


def test_write_rejects_bad_polarity():
    mesh = Mesh(2, 2)
    init = _state(mesh, 1.0)
    with pytest.raises(ValueError):
        write(init, 2, MaterialParams(), VcmaProfile())
