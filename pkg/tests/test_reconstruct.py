import numpy as np
import pytest

from pilotc import (
    PROFILES,
    CodecParams,
    Reconstructor,
    compress,
    decompress_uniform,
    parse,
    query,
    serialize,
    synthetic_trajectory,
)
from pilotc.errors import QueryRangeError

GEO = PROFILES["geolife"]


@pytest.fixture(scope="module")
def compressed(request):
    traj = synthetic_trajectory(2500, dim=2, seed=21)
    params = GEO.params(10.0)
    model = compress(traj, params)
    return traj, params, model


def test_linear_trajectory_reconstructs_linearly(linear_2d):
    params = GEO.params(10.0)
    model = compress(linear_2d, params)
    series = decompress_uniform(model, params)
    assert len(series) == 1
    s = series[0]
    # anchors are quantized, so samples hug the true line within eps_p per dim
    t = s.grid_times()
    for d, (slope, inter) in enumerate(((3.0, 10.0), (-1.5, 7.0))):
        assert np.abs(s.values[:, d] - (slope * t + inter)).max() <= params.eps_p
    approx = Reconstructor(model, params).query(linear_2d.times)
    err = np.linalg.norm(linear_2d.points - approx, axis=1)
    assert err.max() <= params.eps_p * np.sqrt(2.0)


def test_query_at_grid_points_returns_samples(compressed):
    _, params, model = compressed
    rec = Reconstructor(model, params)
    s = rec.series[0]
    ts = s.grid_times()[:50]
    np.testing.assert_allclose(rec.query(ts), s.values[:50], atol=1e-9)


def test_query_midway_is_arithmetic_mean(compressed):
    _, params, model = compressed
    rec = Reconstructor(model, params)
    s = rec.series[0]
    mid = s.t0 + s.dt * (np.arange(20) + 0.5)
    expected = 0.5 * (s.values[:20] + s.values[1:21])
    np.testing.assert_allclose(rec.query(mid), expected, atol=1e-9)


def test_query_is_permutation_invariant(compressed):
    traj, params, model = compressed
    rec = Reconstructor(model, params)
    ts = traj.times[::7]
    perm = np.random.default_rng(0).permutation(len(ts))
    direct = rec.query(ts)
    shuffled = rec.query(ts[perm])
    np.testing.assert_array_equal(shuffled, direct[perm])


def test_query_out_of_range_identifies_timestamp(compressed):
    traj, params, model = compressed
    rec = Reconstructor(model, params)
    bad = float(traj.times[-1] + 1e6)
    with pytest.raises(QueryRangeError) as exc:
        rec.query([traj.times[0], bad])
    assert exc.value.timestamp == bad
    with pytest.raises(QueryRangeError):
        rec.query([traj.times[0] - 1e6])


def test_decompress_matches_pipeline_reconstruction(compressed):
    traj, params, model = compressed
    back = parse(serialize(model, params), params)
    a = Reconstructor(model, params)
    b = Reconstructor(back, params)
    for sa, sb in zip(a.series, b.series):
        np.testing.assert_array_equal(sa.values, sb.values)
        assert sa.t0 == sb.t0 and sa.dt == sb.dt


def test_zero_coefficients_give_piecewise_linear_series(linear_2d):
    params = GEO.params(10.0)
    model = compress(linear_2d, params)
    assert all(b.c_f == 0 for b in model.iter_blocks())
    s = decompress_uniform(model, params)[0]
    second_diff = np.diff(s.values, n=2, axis=0)
    # piecewise linear through block endpoints: curvature only at block joints
    b_s = params.b_s
    interior = np.ones(second_diff.shape[0], dtype=bool)
    interior[b_s - 1 :: b_s] = False
    assert np.abs(second_diff[interior]).max() < 1e-9


def test_outlier_queries_return_stored_positions():
    t = np.array([0.0, 10.0])
    p = np.array([[0.0, 0.0], [5000.0, 0.0]])
    from pilotc import TrajectoryRecord
    params = GEO.params(10.0)
    model = compress(TrajectoryRecord(t, p), params)
    assert len(model.outliers) == 2
    rec = Reconstructor(model, params)
    got = rec.query(t)
    assert np.linalg.norm(got - p, axis=1).max() <= params.eps


def test_corrected_query_applies_residual():
    traj = synthetic_trajectory(3000, dim=2, seed=22)
    params = CodecParams(eps=2.0, a=0.6, b=GEO.b, c=GEO.c, d=2**-6)
    model = compress(traj, params)
    assert model.corrections
    rec = Reconstructor(model, params)
    corrected_t = traj.times[np.isin(
        np.rint(traj.times / params.eps_t).astype(int),
        [e.t_index for e in model.corrections])]
    assert corrected_t.size == len(model.corrections)
    sed = np.linalg.norm(
        traj.points[np.isin(traj.times, corrected_t)] - rec.query(corrected_t), axis=1)
    assert sed.max() <= params.eps_p + 1e-9


def test_query_convenience_wrapper(compressed):
    traj, params, model = compressed
    np.testing.assert_array_equal(
        query(model, traj.times[:10], params),
        Reconstructor(model, params).query(traj.times[:10]))


def test_scalar_and_single_queries(compressed):
    traj, params, model = compressed
    rec = Reconstructor(model, params)
    one = rec.query_one(float(traj.times[5]))
    assert one.shape == (2,)
    np.testing.assert_array_equal(one, rec.query(traj.times[5:6])[0])
