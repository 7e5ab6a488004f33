import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import problems
from oracles import feasible, feasible_points, keys, max_linear, pareto_front
from crpareto.bip import solve
from crpareto.errors import BudgetExceeded, ConfigError
from crpareto.pareto import (GridSpec, ParetoPoint, PayoffTable, brute_force_front,
                             build_subproblem, dominates, epsilon_constraint_solve, grid_points,
                             nondominated_filter, payoff_table)
from crpareto.problem import Allocation, AllocationProblem, is_feasible, reward_vector

TABLE2_A = {(0.0, 32.0), (16.0, 16.0), (32.0, 0.0)}
TABLE2_B = {(34.0982, 16.0, 0.0), (18.0982, 32.0, 16.0), (2.0982, 48.0, 32.0)}


def pt(*v):
    return ParetoPoint(tuple(float(x) for x in v), Allocation(np.zeros((1, 1))))


# -- dominance --------------------------------------------------------------

def test_dominates_examples():
    assert dominates((2, 2), (1, 2))
    assert not dominates((32, 0), (16, 16)) and not dominates((16, 16), (32, 0))
    assert not dominates((5, 5), (5, 5))
    with pytest.raises(ValueError):
        dominates((1, 2), (1, 2, 3))


def test_dominance_tolerance():
    assert not dominates((1 + 1e-12, 2), (1, 2))


def test_filter_examples():
    kept = nondominated_filter([pt(32, 0), pt(16, 16), pt(0, 32), pt(16, 0)])
    assert [p.objectives for p in kept] == [(32, 0), (16, 16), (0, 32)]
    assert nondominated_filter([]) == []


def test_filter_keeps_table2b_set():
    pts = [pt(*v) for v in TABLE2_B]
    for a in TABLE2_B:
        for b in TABLE2_B:
            assert not dominates(a, b)
    assert {p.objectives for p in nondominated_filter(pts)} == TABLE2_B


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5)), max_size=25))
def test_filter_matches_pairwise_definition(vs):
    pts = [pt(*v) for v in vs]
    kept = nondominated_filter(pts)
    expected = [v for v in vs if not any(
        all(a >= b for a, b in zip(w, v)) and w != v for w in vs)]
    assert sorted(p.objectives for p in kept) == sorted(tuple(map(float, v)) for v in expected)
    objs = [p.objectives for p in kept]
    assert objs == sorted(objs, reverse=True)


# -- grid -------------------------------------------------------------------

def test_grid_worked_example():
    assert grid_points(300, 360, 8) == [360, 352.5, 345, 337.5, 330, 322.5, 315, 307.5, 300]


def test_grid_small_cases():
    assert grid_points(0, 32, 1) == [32, 0]
    assert grid_points(7.5, 7.5, 3) == [7.5] * 4


@given(st.floats(-1e3, 1e3), st.floats(0, 1e3), st.integers(1, 50))
def test_grid_properties(lo, width, q):
    hi = lo + width
    e = grid_points(lo, hi, q)
    assert len(e) == q + 1
    assert e[0] == hi and e[-1] == lo
    assert all(a >= b for a, b in zip(e, e[1:]))
    assert np.allclose(np.diff(e), (lo - hi) / q, atol=1e-9 * max(1, abs(hi)))


def test_grid_refinement_contains_coarse_levels():
    coarse = grid_points(2.0982, 34.0982, 5)
    fine = grid_points(2.0982, 34.0982, 20)
    for e in coarse:
        assert min(abs(e - f) for f in fine) < 1e-12


# -- payoff table --------------------------------------------------------------

def test_payoff_table1a(table1a):
    t = payoff_table(table1a)
    assert t.phi.tolist() == [[32, 0], [0, 32]]
    assert t.utopia.tolist() == [32, 32]
    assert t.pseudo_nadir.tolist() == [0, 0]
    assert t.nadir.tolist() == [0, 0]


def test_payoff_table1b(table1b):
    t = payoff_table(table1b)
    assert np.allclose(t.phi, [[34.0982, 16, 0], [2.0982, 48, 32], [2.0982, 48, 32]], atol=1e-12)
    assert np.allclose(t.utopia, [34.0982, 48, 32], atol=1e-12)
    assert np.allclose(t.pseudo_nadir, [2.0982, 16, 0], atol=1e-12)
    assert np.allclose(t.ranges, [32, 32, 32], atol=1e-12)


def test_payoff_from_worked_example_matrix():
    t = PayoffTable.from_phi([[80, 300], [16, 360]])
    assert t.utopia.tolist() == [80, 360]
    assert t.pseudo_nadir.tolist() == [16, 300]
    assert t.ranges[1] == 60


def test_payoff_needs_two_users():
    p = AllocationProblem(1, 2, [[1.0, 2.0]], (), 2, frozenset())
    with pytest.raises(ConfigError):
        payoff_table(p)


@given(problems(min_users=2))
def test_payoff_rows_are_pareto_optimal(problem):
    t = payoff_table(problem)
    front = pareto_front(problem)
    feas = [v for v, _ in feasible_points(problem)]
    for i, w in enumerate(t.witnesses):
        assert is_feasible(problem, w)
        assert keys([t.phi[i]], 6) <= keys(front, 6)
    assert np.all(t.nadir <= t.pseudo_nadir + 1e-12)
    assert np.all(t.pseudo_nadir <= t.utopia + 1e-12)
    assert np.all(t.nadir == 0)
    assert np.allclose(np.diag(t.phi), t.utopia)
    for v in feas:
        assert np.all(np.array(v) <= t.utopia + 1e-9)


# -- subproblems -------------------------------------------------------------

def test_subproblem_strictest_level(table1a):
    t = payoff_table(table1a)
    obj, side = build_subproblem(table1a, t, GridSpec(), [32.0])
    a1 = np.array([[0, 0], [1, 1]])
    assert obj.evaluate(a1) == pytest.approx(0 + 1e-6 * (32 - 32) / 32)
    assert len(side) == 1 and side[0].sense == ">=" and side[0].rhs == 32
    res = solve(table1a, obj, side)
    assert tuple(reward_vector(table1a, res.witness)) == (0, 32)


def test_subproblem_loosest_level(table1a):
    t = payoff_table(table1a)
    obj, side = build_subproblem(table1a, t, GridSpec(), [0.0])
    res = solve(table1a, obj, side)
    assert tuple(reward_vector(table1a, res.witness)) == (32, 0)
    assert res.value == pytest.approx(32)


def test_subproblem_objective_coefficients(table1a):
    t = payoff_table(table1a)
    obj, _ = build_subproblem(table1a, t, GridSpec(epsilon=1e-6), [16.0])
    assert np.allclose(obj.coeffs, [[16, 16], [16e-6 / 32, 16e-6 / 32]])
    assert obj.constant == pytest.approx(-1e-6 * 16 / 32)


def test_subproblem_zero_range():
    p = AllocationProblem(2, 2, [[4.0, 4.0], [0.0, 0.0]], (), 2, frozenset({(1, 0), (1, 1)}))
    t = payoff_table(p)
    assert t.ranges[1] == 0
    obj, side = build_subproblem(p, t, GridSpec(), [0.0])
    assert np.all(obj.coeffs[1] == 0)
    assert side[0].rhs == t.pseudo_nadir[1]
    front = epsilon_constraint_solve(p, GridSpec(intervals=3))
    assert [q.objectives for q in front.points] == [(8.0, 0.0)]


# -- sweep --------------------------------------------------------------------

def test_sweep_table1a(table1a):
    front = epsilon_constraint_solve(table1a, GridSpec(intervals=20))
    assert {p.objectives for p in front.points} == TABLE2_A
    assert front.subproblems_total == 21
    assert front.filtered == 0


def test_sweep_table1b(table1b):
    front = epsilon_constraint_solve(table1b, GridSpec(intervals=20))
    assert keys(front.vectors(), 9) == keys(TABLE2_B, 9)
    assert front.subproblems_total == 441


def test_no_tradeoff_single_point():
    p = AllocationProblem(2, 2, [[3.0, 5.0], [7.0, 11.0]], (), 2, frozenset())
    front = epsilon_constraint_solve(p, GridSpec(intervals=4))
    assert [q.objectives for q in front.points] == [(8.0, 18.0)]
    assert front.subproblems_infeasible == 0


def test_per_objective_intervals(table1b):
    front = epsilon_constraint_solve(table1b, GridSpec(intervals=(2, 4)))
    assert front.subproblems_total == 15
    assert [len(g) for g in front.grids] == [3, 5]
    with pytest.raises(ConfigError):
        epsilon_constraint_solve(table1b, GridSpec(intervals=(2, 4, 6)))


def test_main_objective_choice(table1b):
    front = epsilon_constraint_solve(table1b, GridSpec(main_objective=2, intervals=20))
    assert front.constrained == (0, 1)
    assert keys(front.vectors(), 9) == keys(TABLE2_B, 9)


def test_sweep_needs_two_users():
    p = AllocationProblem(1, 2, [[1.0, 2.0]], (), 2, frozenset())
    with pytest.raises(ConfigError):
        epsilon_constraint_solve(p)


def test_bad_gridspec():
    with pytest.raises(ConfigError):
        GridSpec(intervals=0)
    with pytest.raises(ConfigError):
        GridSpec(epsilon=0)


def test_time_budget(table1b):
    with pytest.raises(BudgetExceeded):
        epsilon_constraint_solve(table1b, GridSpec(intervals=2000), time_budget=1e-3)


def _signature(front):
    return [(p.objectives, p.witness.key(), p.grid_index) for p in front.points]


@settings(max_examples=30)
@given(problems(min_users=2), st.integers(1, 6))
def test_sweep_sound_and_reuse_exact(problem, q):
    spec = GridSpec(intervals=q)
    fast = epsilon_constraint_solve(problem, spec)
    slow = epsilon_constraint_solve(problem, spec, reuse=False)
    assert _signature(fast) == _signature(slow)
    assert fast.subproblems_infeasible == slow.subproblems_infeasible
    assert slow.subproblems_solved == slow.subproblems_total
    front = pareto_front(problem)
    assert keys(fast.vectors(), 6) <= keys(front, 6)
    for p in fast.points:
        assert feasible(problem, p.witness.assign)
        assert np.allclose(reward_vector(problem, p.witness), p.objectives)


@settings(max_examples=30)
@given(problems(min_users=2), st.integers(1, 4), st.integers(2, 4))
def test_parallel_sweep_identical(problem, q, workers):
    spec = GridSpec(intervals=q)
    a = epsilon_constraint_solve(problem, spec)
    b = epsilon_constraint_solve(problem, spec, workers=workers)
    assert _signature(a) == _signature(b)
    assert a.subproblems_infeasible == b.subproblems_infeasible


def test_process_pool_sweep_identical(table1b):
    a = epsilon_constraint_solve(table1b, GridSpec(intervals=6))
    b = epsilon_constraint_solve(table1b, GridSpec(intervals=6), workers=2, processes=True)
    assert _signature(a) == _signature(b)


@settings(max_examples=30)
@given(problems(min_users=2, max_users=2, max_channels=4, cells=8))
def test_biobjective_complete_with_fine_grid(problem):
    distinct = {v[1] for v, _ in feasible_points(problem)}
    front = pareto_front(problem)
    f2 = sorted({v[1] for v in front})
    # a grid level must fall between consecutive front values of f2
    gap = min((b - a for a, b in zip(f2, f2[1:])), default=np.inf)
    t = payoff_table(problem)
    q = max(len(distinct), 1)
    while t.ranges[1] / q >= gap:
        q *= 2
    got = epsilon_constraint_solve(problem, GridSpec(intervals=q))
    assert keys(got.vectors(), 6) == keys(front, 6)


def test_refinement_keeps_points(table1b):
    coarse = epsilon_constraint_solve(table1b, GridSpec(intervals=2))
    fine = epsilon_constraint_solve(table1b, GridSpec(intervals=8))
    assert coarse.vector_keys() <= fine.vector_keys()


@settings(max_examples=30)
@given(problems(min_users=2), st.sampled_from([0.5, 3.0, 10.0]))
def test_scale_invariance(problem, c):
    spec = GridSpec(intervals=3)
    a = epsilon_constraint_solve(problem, spec)
    b = epsilon_constraint_solve(problem.scaled(c), spec)
    assert keys(np.array([p.objectives for p in a.points]) * c, 6) == keys(b.vectors(), 6)
    assert {p.witness for p in a.points} == {p.witness for p in b.points}


# -- brute-force oracle --------------------------------------------------------

def test_brute_force_tables(table1a, table1b):
    assert {p.objectives for p in brute_force_front(table1a).points} == TABLE2_A
    assert keys(brute_force_front(table1b).vectors(), 9) == keys(TABLE2_B, 9)


def test_brute_force_single_user():
    p = AllocationProblem(1, 3, [[5.0, 0.0, 2.0]], (), 2, frozenset({(0, 1)}))
    front = brute_force_front(p)
    assert [q.objectives for q in front.points] == [(7.0,)]
    assert front.points[0].witness.assign.tolist() == [[1, 0, 1]]
    capped = AllocationProblem(1, 3, [[5.0, 1.0, 2.0]], (), 1, frozenset())
    assert [q.objectives for q in brute_force_front(capped).points] == [(5.0,)]


def test_brute_force_budget():
    p = AllocationProblem(5, 5, np.ones((5, 5)), (), 5, frozenset())
    with pytest.raises(BudgetExceeded):
        brute_force_front(p)


@given(problems())
def test_brute_force_matches_test_oracle(problem):
    bf = brute_force_front(problem)
    assert keys(bf.vectors().reshape(-1, problem.num_users), 6) == keys(pareto_front(problem), 6)
    for p in bf.points:
        same = [a for v, a in feasible_points(problem) if keys([v], 6) == keys([p.objectives], 6)]
        best = max(same, key=lambda a: "".join(map(str, a.ravel())))
        assert np.array_equal(p.witness.assign, best)


def test_max_linear_helper_agrees(table1a):
    # sanity check of the test oracle itself against a hand count
    assert max_linear(table1a, table1a.reward) == 32
