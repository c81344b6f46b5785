"""Environment, demand lifecycle, stream generation, and serialization."""
import math

import numpy as np
import pytest

from guardsim import (
    ContractViolationError,
    Demand,
    DemandStatus,
    DemandStream,
    ParameterDomainError,
    demand_position,
    generate_stream,
    make_env,
    read_stream_jsonl,
    region_count,
    write_stream_jsonl,
)


def test_make_env_basic():
    env = make_env(W=10.0, L=20.0, v=0.5, lam=2.0)
    assert env.W == 10.0 and env.L == 20.0
    assert env.areal_intensity == 2.0 / (0.5 * 10.0)


def test_make_env_rejects_bad_parameters():
    for kwargs in (
        dict(W=0.0, L=1, v=1, lam=1),
        dict(W=1, L=-3, v=1, lam=1),
        dict(W=1, L=1, v=0, lam=1),
        dict(W=1, L=1, v=1, lam=math.inf),
        dict(W=1, L=1, v=1, lam=math.nan),
        dict(W=True, L=1, v=1, lam=1),
        dict(W="10", L=1, v=1, lam=1),
    ):
        with pytest.raises(ParameterDomainError):
            make_env(**kwargs)


def test_demand_lifecycle():
    env = make_env(W=10, L=20, v=0.5, lam=1)
    d = Demand(0, t_arr=3.0, x=4.0)
    assert d.status is DemandStatus.PENDING
    assert d.escape_time(env) == 3.0 + 20 / 0.5
    d.mark_outstanding()
    d.mark_captured(17.0)
    assert d.status is DemandStatus.CAPTURED and d.resolve_time == 17.0


def test_demand_illegal_transitions():
    d = Demand(0, 0.0, 0.0)
    with pytest.raises(ContractViolationError):
        d.mark_captured(1.0)          # pending -> captured skips arrival
    d.mark_outstanding()
    d.mark_escaped(5.0)
    with pytest.raises(ContractViolationError):
        d.mark_captured(6.0)          # already resolved
    with pytest.raises(ContractViolationError):
        d.mark_outstanding()


def test_demand_position_translates_up():
    d = Demand(0, t_arr=2.0, x=7.0)
    assert demand_position(d, v=0.5, t=2.0) == (7.0, 0.0)
    assert demand_position(d, v=0.5, t=6.0) == (7.0, 2.0)
    # before arrival the ordinate is negative by convention
    x, y = demand_position(d, v=0.5, t=1.0)
    assert y < 0.0


def test_stream_validation():
    env = make_env(W=10, L=20, v=1, lam=1)
    with pytest.raises(ContractViolationError):
        DemandStream(env, 0, [Demand(0, 1.0, 5.0), Demand(1, 1.0, 6.0)])
    with pytest.raises(ContractViolationError):
        DemandStream(env, 0, [Demand(0, 1.0, 10.5)])
    # boundary abscissa x = W is tolerated for hand-built streams
    s = DemandStream(env, 0, [Demand(0, 1.0, 10.0)])
    assert len(s) == 1


def test_generate_stream_reproducible():
    env = make_env(W=10, L=20, v=0.5, lam=2.0)
    a = generate_stream(env, 200, seed=42)
    b = generate_stream(env, 200, seed=42)
    assert [(d.t_arr, d.x) for d in a] == [(d.t_arr, d.x) for d in b]
    c = generate_stream(env, 200, seed=43)
    assert [(d.t_arr, d.x) for d in a] != [(d.t_arr, d.x) for d in c]


def test_generate_stream_shape():
    env = make_env(W=10, L=20, v=0.5, lam=2.0)
    s = generate_stream(env, 500, seed=7)
    ts = np.array([d.t_arr for d in s])
    xs = np.array([d.x for d in s])
    assert np.all(np.diff(ts) > 0)
    assert np.all((xs >= 0) & (xs < env.W))
    assert [d.id for d in s] == list(range(500))
    assert all(d.status is DemandStatus.PENDING for d in s)


def test_generate_stream_statistics():
    # interarrival mean 1/lam, abscissa mean W/2; loose 5-sigma style gates
    env = make_env(W=10, L=20, v=0.5, lam=2.0)
    gaps, xs = [], []
    for seed in range(20):
        s = generate_stream(env, 400, seed=seed)
        ts = np.array([d.t_arr for d in s])
        gaps.append(np.diff(ts, prepend=0.0))
        xs.append([d.x for d in s])
    gaps = np.concatenate(gaps)
    xs = np.concatenate(xs)
    assert abs(gaps.mean() - 0.5) < 0.01
    assert abs(xs.mean() - 5.0) < 0.1


def test_generate_stream_rejects_bad_args():
    env = make_env(W=10, L=20, v=0.5, lam=2.0)
    for n, seed in ((-1, 0), (2.5, 0), (10, -1), (10, 1.5)):
        with pytest.raises(ParameterDomainError):
            generate_stream(env, n, seed)


def test_empty_stream():
    env = make_env(W=10, L=20, v=0.5, lam=2.0)
    s = generate_stream(env, 0, seed=0)
    assert len(s) == 0 and list(s) == []


def test_region_count_hand_instance():
    env = make_env(W=10, L=20, v=0.5, lam=1)
    s = DemandStream(env, 0, [Demand(0, 0.0, 2.0), Demand(1, 2.0, 5.0),
                              Demand(2, 4.0, 9.0)])
    # at t=4: ordinates are 2.0, 1.0, 0.0
    assert region_count(s, (0, 10, 0, 2), 4.0) == 3
    assert region_count(s, (0, 10, 1, 2), 4.0) == 2      # closed boundaries
    assert region_count(s, (0, 4, 0, 2), 4.0) == 1
    assert region_count(s, (0, 10, 0.5, 0.5), 4.0) == 0
    with pytest.raises(ParameterDomainError):
        region_count(s, (5, 4, 0, 2), 4.0)


def test_stream_jsonl_round_trip(tmp_path):
    env = make_env(W=10, L=20, v=0.5, lam=2.0)
    s = generate_stream(env, 50, seed=9)
    path = str(tmp_path / "stream.jsonl")
    write_stream_jsonl(s, path)
    r = read_stream_jsonl(path)
    assert r.env == s.env and r.seed == s.seed
    assert [(d.id, d.t_arr, d.x) for d in r] == [(d.id, d.t_arr, d.x) for d in s]


def test_read_stream_rejects_empty(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    with pytest.raises(ContractViolationError):
        read_stream_jsonl(str(path))
