"""Smoke tests for the Python bindings."""

import itertools

import pytest

ddplab = pytest.importorskip("ddplab")


def brute_force_feasible(inst):
    """Tries every combination of simple paths, one per unit request."""
    g = inst.graph
    n = inst.n

    def paths(s, t):
        out, stack = [], [[s]]
        while stack:
            p = stack.pop()
            if p[-1] == t:
                out.append(p)
                continue
            for w in range(n):
                if g.has_arc(p[-1], w) and w not in p:
                    stack.append(p + [w])
        return out

    cands = [paths(s, t) for s, t in inst.expanded()]
    for combo in itertools.product(*cands):
        load = [0] * n
        for p in combo:
            for v in p:
                load[v] += 1
        if max(load, default=0) <= inst.congestion:
            return True
    return False


def test_digraph_basics():
    d = ddplab.Digraph(3)
    d.add_arc(0, 1)
    d.add_arc(1, 2)
    d.add_arc(0, 2)
    assert d.has_arc(0, 1) and not d.has_arc(1, 0)
    assert d.arc_count() == 3
    assert ddplab.is_tournament(d)
    assert ddplab.exact_dpw(d)[0] == 0


def test_counterexample_has_one_solution():
    inst = ddplab.counterexample(1)
    assert (inst.n, inst.k, inst.congestion) == (8, 2, 1)
    sols = ddplab.enumerate_solutions(inst)
    assert len(sols) == 1
    assert ddplab.verify_solution(inst, sols[0]) == []


def test_text_round_trip():
    inst = ddplab.random_instance(6, 0.2, 2, 1, 7)
    assert ddplab.Instance.from_text(inst.to_text()) == inst
    sol = ddplab.solve(inst)
    if sol is not None:
        assert ddplab.RoutedSolution.from_text(sol.to_text(), inst.n) == sol


@pytest.mark.parametrize("seed", range(15))
def test_solver_matches_brute_force(seed):
    inst = ddplab.random_instance(6, 0.2, 1 + seed % 3, 1 + seed % 2, 300 + seed)
    sol = ddplab.solve(inst)
    assert (sol is not None) == brute_force_feasible(inst)
    if sol is not None:
        assert ddplab.verify_solution(inst, sol) == []


def test_dp_solve_agrees_with_solve():
    inst = ddplab.random_instance(7, 0.2, 2, 2, 11)
    width, bags = ddplab.exact_dpw(inst.graph)
    ok, _, _ = ddplab.validate_decomposition(inst.graph, bags)
    assert ok and width >= 0
    assert (ddplab.dp_solve(inst, bags) is None) == (ddplab.solve(inst) is None)


def test_sat_reduction_round_trip():
    sat = ddplab.random_sat31(3, 1)
    art = ddplab.reduce_sat_to_tournament(sat)
    assert ddplab.is_tournament(art.instance.graph)
    assignment = ddplab.sat_brute_force(sat)
    assert assignment is not None
    sol = ddplab.sat_solution_from_assignment(art, assignment)
    assert ddplab.verify_solution(art.instance, sol) == []
    assert sat.satisfied_by(ddplab.sat_assignment_from_solution(art, sol))


def test_mcc_reduction():
    mcc = ddplab.random_mcc(2, 2, 0.5, 3)
    art = ddplab.reduce_mcc(mcc)
    assert art.instance.k == 13
    clique = ddplab.mcc_brute_force(mcc)
    sol = ddplab.mcc_solution_from_clique(art, clique)
    assert ddplab.verify_solution(art.instance, sol) == []


def test_planted_triple_and_irrelevant_vertex():
    inst, triple = ddplab.planted_triple_instance(3, 2, 1, 1, 5)
    assert ddplab.validate_triple(inst.graph, triple)
    v, confirmed = ddplab.find_irrelevant_vertex(inst, triple, ddplab.Thresholds.desk(3))
    if v >= 0:
        assert confirmed
        assert not ddplab.is_relevant(inst, v)


def test_winwin_verdict():
    inst = ddplab.counterexample_asymmetric(2)
    sol, deleted, width = ddplab.winwin_solve(inst, ddplab.Thresholds.desk(2))
    assert sol is not None
    assert ddplab.verify_solution(inst, sol) == []
    assert width >= 0


def test_errors_carry_codes():
    inst = ddplab.counterexample(2)
    with pytest.raises(ddplab.DdpError) as info:
        ddplab.winwin_solve(inst, ddplab.Thresholds.desk(2))
    assert info.value.code == "PreconditionFailed"
    with pytest.raises(ddplab.DdpError) as info:
        ddplab.Instance.from_text("not an instance")
    assert info.value.code == "ParseError"
