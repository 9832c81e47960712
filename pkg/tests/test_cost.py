import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from basesplit.cost import (BatchEvaluator, ClusteringScheme, CostProfile, DegenerateNormError, FitnessParams,
                            InvalidSchemeError, check_scheme, compute_norms, computational_cost, evaluate,
                            fronthauling_cost, path_delay, reference_schemes)
from basesplit.graph import Cluster, ClusterKind, FlowEdge, FunctionNode, build_graph

from conftest import by_label
from naive import naive_fitness, unpack

S0 = Cluster(0, ClusterKind.CELL_SITE, "s0")
S1 = Cluster(1, ClusterKind.CELL_SITE, "s1")
CO = Cluster(2, ClusterKind.CENTRAL_OFFICE, "co")


def centralized(g):
    return reference_schemes(g)["centralized"]


def place(g, scheme, labels, cluster):
    a = np.array(scheme)
    for lab in labels:
        a[by_label(g, lab)] = cluster
    return a


def params(g, profile, alpha=0.1, bound=30.0, mode="shared"):
    return FitnessParams.for_graph(g, profile, alpha, bound, normalization=mode)


class TestComputational:
    def test_zero_weight_site_costs_one(self, small, profile):
        assert computational_cost(small, centralized(small), profile, 0) == 1.0

    def test_weight_two_site(self, two_cell, profile):
        a = place(two_cell, centralized(two_cell), ["fft.1", "MIMOrx.1.1", "MIMOrx.1.2"], 0)
        assert computational_cost(two_cell, a, profile, 0) == pytest.approx(4.0, abs=1e-9)

    def test_office_is_free(self, two_cell, profile):
        assert computational_cost(two_cell, centralized(two_cell), profile, 2) == 0.0


def _pair_graph(bw, comp, dst_cluster):
    nodes = [FunctionNode(0, "a", 0.0, 0), FunctionNode(1, "b", 0.0, dst_cluster)]
    return build_graph(nodes, [FlowEdge(0, 0, 1, bw, comp)], [S0, S1, CO])


class TestFronthaul:
    def test_no_crossing(self, two_cell, profile):
        assert fronthauling_cost(two_cell, centralized(two_cell), profile, 0, 1) == 0.0

    def test_site_to_office(self, profile):
        g = _pair_graph(0.45, False, 2)
        assert fronthauling_cost(g, [0, 2], profile, 0, 2) == pytest.approx(2 ** 0.45, abs=1e-9)
        assert fronthauling_cost(g, [0, 2], profile, 0, 2) == pytest.approx(1.3660402567543954, abs=1e-9)

    def test_site_to_site(self, profile):
        g = _pair_graph(0.45, True, 1)
        assert fronthauling_cost(g, [0, 1], profile, 0, 1) == pytest.approx(4 ** 0.45, abs=1e-9)
        assert fronthauling_cost(g, [0, 1], profile, 0, 1) == pytest.approx(1.8660659830736148, abs=1e-9)

    def test_intra_cluster_free(self, two_cell, profile):
        a = centralized(two_cell)
        assert fronthauling_cost(two_cell, a, profile, 2, 2) == 0.0

    def test_directions_pooled(self, profile):
        nodes = [FunctionNode(0, "a", 0.0, 0), FunctionNode(1, "b", 0.0, 2),
                 FunctionNode(2, "c", 0.0, 2), FunctionNode(3, "d", 0.0, 0)]
        edges = [FlowEdge(0, 0, 1, 0.3), FlowEdge(1, 2, 3, 0.2)]
        g = build_graph(nodes, edges, [S0, S1, CO])
        assert fronthauling_cost(g, [0, 2, 2, 0], profile, 0, 2) == pytest.approx(2 ** 0.5, abs=1e-12)


class TestDelay:
    def test_all_at_office(self, two_cell, profile):
        a = centralized(two_cell)
        assert all(path_delay(two_cell, a, profile, p) == 0 for p in two_cell.paths)

    def test_single_node_alone(self, profile):
        nodes = [FunctionNode(0, "s", 0.0, 0), FunctionNode(1, "x", 1.0), FunctionNode(2, "t", 0.0, 2)]
        g = build_graph(nodes, [FlowEdge(0, 0, 1, 1), FlowEdge(1, 1, 2, 1)], [S0, S1, CO])
        assert path_delay(g, [0, 0, 2], profile, g.paths[0]) == 1.0

    def test_fft_with_two_mimo(self, two_cell, profile):
        a = place(two_cell, centralized(two_cell), ["fft.1", "MIMOrx.1.1", "MIMOrx.1.2"], 0)
        path = next(p for p in two_cell.paths if by_label(two_cell, "MIMOrx.1.1") in p)
        # fft 1*2 + MIMOrx.1.1 0.5*2, the rest of the path is at the office
        assert path_delay(two_cell, a, profile, path) == pytest.approx(3.0, abs=1e-9)
        only_fft = path_delay(two_cell, a, profile, [by_label(two_cell, "fft.1")])
        assert only_fft == pytest.approx(2.0, abs=1e-9)


class TestEvaluate:
    def test_fully_centralized(self, two_cell, profile):
        for alpha in (0.0, 0.3, 1.0):
            b = evaluate(two_cell, centralized(two_cell), profile, params(two_cell, profile, alpha))
            assert b.comp_total == 2.0
            assert b.penalty == 0.0
            assert b.max_path_delay == 0.0

    def test_alpha_zero_ignores_comp(self, two_cell, profile):
        p = params(two_cell, profile, 0.0)
        b = evaluate(two_cell, reference_schemes(two_cell)["distributed"], profile, p)
        assert b.fitness == pytest.approx(b.fh_scaled + p.beta * b.penalty, abs=1e-15)

    def test_penalty_term(self, profile):
        nodes = [FunctionNode(0, "s", 0.0, 0), FunctionNode(1, "x", 5.0), FunctionNode(2, "y", 2.0),
                 FunctionNode(3, "t", 0.0, 2)]
        g = build_graph(nodes, [FlowEdge(i, i, i + 1, 1.0) for i in range(3)], [S0, S1, CO])
        a = [0, 0, 0, 2]
        assert path_delay(g, a, profile, g.paths[0]) == 49.0
        base = FitnessParams(alpha=0.5, comp_norm=1.0, fh_norm=1.0, delay_bound=(44.0,))
        b = evaluate(g, a, profile, base)
        assert b.penalty == 5.0
        assert b.fitness - (0.5 * b.comp_scaled + 0.5 * b.fh_scaled) == pytest.approx(50.0, abs=1e-9)

    def test_equality_is_feasible(self, profile):
        nodes = [FunctionNode(0, "s", 0.0, 0), FunctionNode(1, "x", 2.0), FunctionNode(2, "t", 0.0, 2)]
        g = build_graph(nodes, [FlowEdge(0, 0, 1, 1), FlowEdge(1, 1, 2, 1)], [S0, S1, CO])
        b = evaluate(g, [0, 0, 2], profile, FitnessParams(0.5, 1.0, 1.0, (4.0,)))
        assert b.path_delays == (4.0,) and b.penalty == 0.0

    def test_scheme_type_accepted(self, small, profile):
        p = params(small, profile)
        a = centralized(small)
        assert evaluate(small, ClusteringScheme(a), profile, p) == evaluate(small, a.tolist(), profile, p)


class TestNorms:
    def test_small_scenario(self, small, profile):
        comp, fh = compute_norms(small, profile, "separate")
        assert comp == pytest.approx(2 ** 5.3, abs=1e-9)
        assert fh == pytest.approx(4.0, abs=1e-9)
        assert compute_norms(small, profile, "shared") == pytest.approx((2 ** 5.3, 2 ** 5.3), abs=1e-9)

    def test_two_cell(self, two_cell, profile):
        comp, fh = compute_norms(two_cell, profile, "separate")
        assert comp == pytest.approx(2 * 2 ** 8.6, abs=1e-9)
        assert fh == pytest.approx(8.0, abs=1e-9)

    def test_degenerate(self, profile):
        nodes = [FunctionNode(0, "s", 0.0, 0), FunctionNode(1, "x", 1.0), FunctionNode(2, "t", 0.0, 2)]
        g = build_graph(nodes, [FlowEdge(0, 0, 1, 0.0), FlowEdge(1, 1, 2, 0.0)], [S0, S1, CO])
        with pytest.raises(DegenerateNormError):
            compute_norms(g, profile, "separate")

    def test_unknown_mode(self, small, profile):
        with pytest.raises(ValueError):
            compute_norms(small, profile, "bogus")

    def test_params_validation(self):
        with pytest.raises(ValueError):
            FitnessParams(1.5, 1, 1, (30,))
        with pytest.raises(ValueError):
            FitnessParams(0.5, 1, 1, (30,), beta=1.0)
        with pytest.raises(ValueError):
            FitnessParams(0.5, 1, 1, (0.0,))
        with pytest.raises(ValueError):
            FitnessParams(0.5, 0, 1, (30,))


def test_check_scheme(small):
    a = centralized(small)
    check_scheme(small, a)
    bad = a.copy()
    bad[0] = 0  # sourceDL is seeded to the office
    with pytest.raises(InvalidSchemeError):
        check_scheme(small, bad)
    with pytest.raises(InvalidSchemeError):
        check_scheme(small, a[:-1])


def random_scheme(g, draw):
    a = g.seed_values.copy()
    for v in g.free_nodes:
        a[v] = draw(st.integers(0, g.n_clusters - 1))
    return a


@pytest.fixture(scope="module", params=["plain", "comp"])
def graph(request, two_cell, two_cell_comp):
    return two_cell if request.param == "plain" else two_cell_comp


@settings(max_examples=200, deadline=None)
@given(data=st.data(), alpha=st.floats(0, 1), bound=st.floats(1, 40))
def test_batch_scalar_naive_agree(graph, profile, data, alpha, bound):
    a = random_scheme(graph, data.draw)
    p = params(graph, profile, alpha, bound)
    scalar = evaluate(graph, a, profile, p)
    batch = BatchEvaluator(graph, profile, p)(a[None])
    assert batch.fitness[0] == pytest.approx(scalar.fitness, rel=1e-12, abs=1e-12)
    assert batch.comp_total[0] == pytest.approx(scalar.comp_total, rel=1e-12)
    assert batch.fh_total[0] == pytest.approx(scalar.fh_total, rel=1e-12)
    np.testing.assert_allclose(batch.path_delays[0], scalar.path_delays, rtol=1e-12, atol=1e-12)
    naive = naive_fitness(*unpack(graph), a.tolist(), alpha, p.comp_norm, p.fh_norm, bound)
    assert scalar.fitness == pytest.approx(naive, rel=1e-12, abs=1e-12)
    assert evaluate(graph, a, profile, p) == scalar


@settings(max_examples=200, deadline=None)
@given(data=st.data())
def test_cost_properties(graph, profile, data):
    a = random_scheme(graph, data.draw)
    p = params(graph, profile, 0.3, data.draw(st.floats(1, 40)))
    b = evaluate(graph, a, profile, p)
    k = graph.n_clusters
    for i in range(k):
        for j in range(k):
            assert fronthauling_cost(graph, a, profile, i, j) == fronthauling_cost(graph, a, profile, j, i)
    assert (b.penalty == 0) == all(d <= bound for d, bound in zip(b.path_delays, p.delay_bound))
    on_site = [v for v in graph.free_nodes if graph.clusters[a[v]].is_site]
    if on_site:
        v = data.draw(st.sampled_from(on_site))
        moved = a.copy()
        moved[v] = graph.office_clusters[0]
        assert evaluate(graph, moved, profile, p).comp_total <= b.comp_total + 1e-12
