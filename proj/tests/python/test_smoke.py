import json
import math

import mptcs


BREAKOUT = json.dumps({"schema": "mptcs-env-v1", "id": "minibreakout"})
DODGE = json.dumps({"schema": "mptcs-env-v1", "id": "griddodge", "max_steps": 30})


def test_environment_roundtrip():
    env = mptcs.make_environment(BREAKOUT)
    assert env.id == "minibreakout"
    assert env.action_count == 3
    tc = env.sample_initial(7)
    assert env.validate_state(tc.state)
    assert tc == env.sample_initial(7)
    obs = env.observe(tc.state)
    assert len(obs) == env.observation_size
    assert all(0.0 <= v <= 1.0 for v in obs)


def test_execution_is_deterministic():
    env = mptcs.make_environment(DODGE)
    pool = mptcs.provision_policy_pool(env, count=3, seed=5)
    tc = env.sample_initial(11)
    a = mptcs.execute(tc, pool[0], env)
    b = mptcs.execute(tc, pool[0], env)
    assert a.return_sum == b.return_sum
    assert len(a.steps) == len(b.steps)
    assert a.steps[0].action == b.steps[0].action
    dist = a.steps[0].action_distribution
    assert abs(sum(dist) - 1.0) < 1e-6


def test_difficulty_score():
    assert mptcs.difficulty([1, 1, 0, 0, 0]) == (2, 5)
    assert mptcs.difficulty([1, 1, 1]) == (0, 3)
    assert mptcs.difficulty([0, 0]) == (0, 2)


def test_oracle_horizon():
    env = mptcs.make_environment(BREAKOUT)
    pool = mptcs.provision_policy_pool(env, count=2, seed=9)
    tc = env.sample_initial(3)
    verdict = mptcs.oracle(tc, pool[0], env, horizon=10)
    traj = mptcs.execute(tc, pool[0], env)
    expected = (
        traj.terminated_at is not None
        and traj.terminated_at < 10
        and traj.terminal_event == mptcs.TerminalEvent.DEFEAT
    )
    assert verdict.failed == expected


def test_small_campaign_populates_archive():
    env = mptcs.make_environment(DODGE)
    pool = mptcs.provision_policy_pool(env, count=5, seed=2)
    sel, ev = mptcs.partition_alternating(pool, env, episodes=30, seed=4, n_sel=3, n_eval=2)
    assert len(sel) == 3 and len(ev) == 2

    bounds = mptcs.calibrate_bounds(env, sel, probe_count=200, seed=8)
    assert bounds.entropy_hi == math.log(env.action_count)

    archive = mptcs.Archive(bounds, 10, 10)
    stats = mptcs.run_ga_campaign(
        archive, env, sel, iterations=5, samples_per_iteration=20,
        bootstrap_min_archive=10, seed=1,
    )
    assert stats["policy_executions"] == (
        stats["bootstrap_candidates"] + stats["main_candidates"]
    ) * len(sel)
    assert archive.size > 0
    for niche, elite in archive.occupants():
        num, m = elite.score
        assert 0 < num < m == 3

    report = mptcs.evaluate_suite(archive.suite(), ev, env)
    assert 0.0 <= report["mean_failure_rate"] <= 1.0
    assert report["pass_entropy"] <= math.log(2) + 1e-9
    assert report["suite_size"] == archive.size
