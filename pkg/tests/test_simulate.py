import numpy as np
import pytest

from diffzoom.model import DiffusionModel, builtin_model
from diffzoom.simulate import (
    Path,
    SeedPlan,
    SimulationError,
    SubgridSpec,
    aux_stream_index,
    restrict_to_subgrid,
    simulate_ensemble,
    simulate_path,
)
from diffzoom.stats import EmpiricalDistribution, ks_critical_value, ks_two_sample

BM = builtin_model("bm", {"sigma0": 1.0})
OU = builtin_model("ou", {"theta": 1.0, "sigma0": 1.0})


def test_seed_plan_is_a_pure_function():
    a = SeedPlan(7, 3).generator().standard_normal(5)
    b = SeedPlan(7, 3).generator().standard_normal(5)
    assert np.array_equal(a, b)
    c = SeedPlan(7, 4).generator().standard_normal(5)
    assert not np.array_equal(a, c)


def test_path_properties_and_validation():
    p = Path(step=0.5, values=[0.0, 1.0, 0.5])
    assert p.horizon == 1.0
    assert np.allclose(p.times, [0.0, 0.5, 1.0])
    with pytest.raises(ValueError):
        Path(step=0.5, values=[1.0])
    with pytest.raises(ValueError):
        Path(step=0.0, values=[0.0, 1.0])


def test_simulate_path_deterministic():
    a = simulate_path(BM, 1.0, 500, SeedPlan(123, 0))
    b = simulate_path(BM, 1.0, 500, SeedPlan(123, 0))
    c = simulate_path(BM, 1.0, 500, SeedPlan(123, 1))
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert a.values[0] == BM.initial_value


def test_ensemble_invariant_under_threads_and_blocks():
    kw = dict(store_full=True, keep_indices=[0, 100, 250],
              subgrids=(SubgridSpec(50, np.arange(40) % 50),))
    a = simulate_ensemble(OU, 1.0, 500, 9, range(40), threads=1, block=40, **kw)
    b = simulate_ensemble(OU, 1.0, 500, 9, range(40), threads=3, block=7, **kw)
    assert np.array_equal(a.full, b.full)
    assert np.array_equal(a.sup, b.sup)
    assert np.array_equal(a.argmax_index, b.argmax_index)
    assert np.array_equal(a.kept, b.kept)
    assert np.array_equal(a.subgrid_values[0], b.subgrid_values[0],
                          equal_nan=True)


def test_chunking_boundary_consistency():
    # a horizon spanning several chunks must agree with the full matrix
    from diffzoom.simulate import CHUNK_STEPS
    n = 2 * CHUNK_STEPS + 123
    res = simulate_ensemble(BM, 1.0, n, 5, range(8), store_full=True)
    assert np.allclose(res.sup, res.full.max(axis=1))
    assert np.allclose(res.terminal, res.full[:, -1])


def test_reducers_match_full_matrix():
    res = simulate_ensemble(OU, 1.0, 400, 11, range(64), store_full=True,
                            keep_indices=[0, 7, 399])
    assert np.allclose(res.sup, res.full.max(axis=1))
    # last attaining index convention
    expect = res.full.shape[1] - 1 - np.argmax(res.full[:, ::-1], axis=1)
    assert np.array_equal(res.argmax_index, expect)
    assert np.array_equal(res.kept[:, 0], res.full[:, 0])
    assert np.array_equal(res.kept[:, 1], res.full[:, 7])
    assert np.array_equal(res.kept[:, 2], res.full[:, 399])


def test_subgrid_values_match_full_matrix():
    n, stride = 400, 25
    offs = np.arange(32) % stride
    res = simulate_ensemble(BM, 1.0, n, 13, range(32), store_full=True,
                            subgrids=(SubgridSpec(stride, offs),))
    sub = res.subgrid_values[0]
    for r in range(32):
        direct = res.full[r, offs[r]::stride]
        got = sub[r][~np.isnan(sub[r])]
        assert np.array_equal(got, direct)


def test_subgrid_offset_validation():
    with pytest.raises(ValueError):
        simulate_ensemble(BM, 1.0, 100, 1, range(4),
                          subgrids=(SubgridSpec(10, np.array([0, 1, 10, 2])),))
    with pytest.raises(ValueError):
        simulate_ensemble(BM, 1.0, 100, 1, range(4),
                          subgrids=(SubgridSpec(10, np.array([0, 1])),))


def test_restrict_to_subgrid_nesting():
    p = simulate_path(BM, 1.0, 600, SeedPlan(3, 0))
    once = restrict_to_subgrid(p, 6)
    twice = restrict_to_subgrid(restrict_to_subgrid(p, 2), 3)
    assert once.step == twice.step
    assert np.array_equal(once.values, twice.values)
    shifted = restrict_to_subgrid(p, 6, offset=4)
    assert np.array_equal(shifted.values, p.values[4::6])
    with pytest.raises(ValueError):
        restrict_to_subgrid(p, 0)
    with pytest.raises(ValueError):
        restrict_to_subgrid(p, 2, offset=601)


def test_bm_self_similarity_two_sample():
    # rescaled increments over a subwindow are again BM increments in law
    eps, delta = 0.01, 1e-4
    n = 2000
    res = simulate_ensemble(BM, 1.0, int(1 / delta), 21, range(n),
                            keep_indices=[5000, 5000 + int(eps / delta)])
    rescaled = (res.kept[:, 1] - res.kept[:, 0]) / np.sqrt(eps)
    fresh = SeedPlan(22, 0).generator().standard_normal(n)
    r = ks_two_sample(EmpiricalDistribution.from_samples(rescaled),
                      EmpiricalDistribution.from_samples(fresh))
    assert r.statistic < ks_critical_value(0.001, r.n_effective)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_blow_up_raises_simulation_error():
    exploding = DiffusionModel(
        name="cubic",
        drift=lambda x: x ** 3,
        diffusion=lambda x: 1.0 + 0.0 * x,
        initial_value=10.0,
    )
    with pytest.raises(SimulationError):
        simulate_ensemble(exploding, 1.0, 200, 1, range(2))


def test_argument_validation():
    with pytest.raises(ValueError):
        simulate_ensemble(BM, 1.0, 0, 1, range(2))
    with pytest.raises(ValueError):
        simulate_ensemble(BM, -1.0, 10, 1, range(2))
    with pytest.raises(ValueError):
        simulate_ensemble(BM, 1.0, 10, 1, [])
    with pytest.raises(ValueError):
        simulate_ensemble(BM, 1.0, 10, 1, range(2), keep_indices=[11])


def test_aux_streams_disjoint_from_path_streams():
    idx = aux_stream_index(1, 5)
    assert idx > 1 << 60
    assert aux_stream_index(2, 5) != idx
    with pytest.raises(ValueError):
        aux_stream_index(256)
