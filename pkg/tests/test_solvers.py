import math
import random

import pytest

from seqsub.errors import ConfigError, InputError
from seqsub.hypergraph import (DirectedHypergraph, eligible_prefix_edges, eligible_suffix_edges,
                               induced_edges)
from seqsub.instances import lotr, random_digraph, random_hypergraph, random_utility
from seqsub.oracle import brute_force_opt
from seqsub.solvers import (SolveConfig, approx_bound, asymptotic_bound, best_of_both,
                            classical_greedy, frequency_baseline, hyper_sequence_greedy_backward,
                            hyper_sequence_greedy_forward, sequence_greedy_backward,
                            sequence_greedy_forward, solve)
from seqsub.utility import CoverageUtility, ModularUtility

F, T, R = 0, 1, 2
PAIRWISE = (sequence_greedy_forward, sequence_greedy_backward)
HYPER = (hyper_sequence_greedy_forward, hyper_sequence_greedy_backward)


@pytest.fixture
def lotr_count():
    H = lotr()
    return H, ModularUtility.count(H)


class TestConfig:
    @pytest.mark.parametrize("kwargs", [{"k": -1}, {"k": 2.5}, {"k": True},
                                        {"k": 2, "direction": "sideways"},
                                        {"k": 2, "tie_break": "random"}])
    def test_rejects(self, kwargs):
        with pytest.raises(ConfigError):
            SolveConfig(**kwargs)


class TestWorkedExample:
    @pytest.mark.parametrize("solver", PAIRWISE + HYPER)
    def test_k2_finds_f_then_t(self, lotr_count, solver):
        H, h = lotr_count
        rep = solver(H, h, SolveConfig(2, fill_to_k=False))
        assert rep.sigma == (F, T)
        assert rep.objective == 3.0

    def test_k3_takes_the_whole_franchise(self, lotr_count):
        H, h = lotr_count
        rep = hyper_sequence_greedy_forward(H, h, SolveConfig(3))
        assert rep.sigma == (F, T, R)
        assert rep.objective == 6.0

    def test_pairwise_k3_without_fill_stops_at_two(self, lotr_count):
        # the loop guard allows one pick only, which places two vertices
        H, h = lotr_count
        assert sequence_greedy_forward(H, h, SolveConfig(3)).sigma == (F, T)
        assert sequence_greedy_forward(H, h, SolveConfig(3, fill_to_k=True)).sigma == (F, T, R)

    def test_report_fields(self, lotr_count):
        H, h = lotr_count
        rep = sequence_greedy_forward(H, h, SolveConfig(2))
        assert rep.algorithm == "sequence-greedy"
        assert rep.direction_used == "forward"
        assert rep.tie_break == "smallest-id"
        assert rep.bound == pytest.approx(-math.expm1(-0.5) / 7)
        assert [t.edge for t in rep.trace] == [0]
        assert rep.trace[0].gain == 1.0 and rep.trace[0].realized == 3.0
        d = rep.to_dict()
        assert d["sigma"] == [F, T] and d["trace"][0]["edge"] == 0


class TestSmallCases:
    def test_self_loops_only(self):
        H = DirectedHypergraph(3, [((0,), 5.0), ((1,), 3.0), ((2,), 1.0)])
        h = ModularUtility.from_hypergraph(H)
        rep = sequence_greedy_forward(H, h, SolveConfig(2))
        assert rep.sigma == (0,) and rep.objective == 5.0
        rep = sequence_greedy_forward(H, h, SolveConfig(3))
        assert rep.sigma == (0, 1) and rep.objective == 8.0
        rep = hyper_sequence_greedy_forward(H, h, SolveConfig(2))
        assert rep.sigma == (0, 1) and rep.objective == 8.0

    @pytest.mark.parametrize("solver", PAIRWISE + HYPER)
    def test_empty_graph(self, solver):
        H = DirectedHypergraph(4)
        rep = solver(H, ModularUtility([]), SolveConfig(3))
        assert rep.sigma == () and rep.objective == 0.0 and rep.trace == ()

    @pytest.mark.parametrize("solver", PAIRWISE + HYPER)
    def test_k0(self, lotr_count, solver):
        H, h = lotr_count
        assert solver(H, h, SolveConfig(0)).sigma == ()

    def test_single_edge_backward(self):
        H = DirectedHypergraph(2, [((0, 1), 2.5)])
        rep = sequence_greedy_backward(H, ModularUtility.from_hypergraph(H), SolveConfig(2))
        assert rep.sigma == (0, 1) and rep.objective == 2.5

    def test_k1_needs_fill(self):
        H = DirectedHypergraph(3, [((0,), 1.0), ((1,), 4.0), ((0, 2), 9.0)])
        h = ModularUtility.from_hypergraph(H)
        assert sequence_greedy_backward(H, h, SolveConfig(1)).sigma == ()
        rep = sequence_greedy_backward(H, h, SolveConfig(1, fill_to_k=True))
        assert rep.sigma == (1,) and rep.objective == 4.0
        assert rep.objective == brute_force_opt(H, h, 1).opt_value

    def test_hyperedge_against_heavy_loop(self):
        H = DirectedHypergraph(4, [((0, 1, 2), 1.0), ((3,), 10.0)])
        h = ModularUtility.from_hypergraph(H)
        rep = hyper_sequence_greedy_forward(H, h, SolveConfig(3))
        assert rep.sigma == (3,) and rep.objective == 10.0
        assert brute_force_opt(H, h, 3).opt_value == 10.0
        rep = hyper_sequence_greedy_forward(H, h, SolveConfig(4))
        assert rep.sigma == (3, 0, 1, 2) and rep.objective == 11.0

    def test_k_below_r_without_fill(self):
        H = DirectedHypergraph(3, [((0, 1, 2), 1.0)])
        h = ModularUtility.from_hypergraph(H)
        assert hyper_sequence_greedy_forward(H, h, SolveConfig(2, fill_to_k=False)).sigma == ()
        # fill only takes edges that fit
        assert hyper_sequence_greedy_forward(H, h, SolveConfig(2)).sigma == ()

    @pytest.mark.parametrize("edges, fwd_sigma, bwd_sigma", [
        ([(0, 1), (1, 2)], (0, 1, 2), (0, 1)),
        ([(1, 2), (0, 1)], (1, 2), (0, 1, 2)),
    ])
    def test_chain(self, edges, fwd_sigma, bwd_sigma):
        # equal values make the first pick a tie; the direction that takes the
        # "wrong" link first cannot attach the other one
        H = DirectedHypergraph(3, [(e, 1.0) for e in edges])
        h = ModularUtility.from_hypergraph(H)
        assert hyper_sequence_greedy_forward(H, h, SolveConfig(3)).sigma == fwd_sigma
        assert hyper_sequence_greedy_backward(H, h, SolveConfig(3)).sigma == bwd_sigma
        both = best_of_both(H, h, SolveConfig(3, "both"), "hyper")
        assert both.sigma == (0, 1, 2)
        assert both.objective == brute_force_opt(H, h, 3).opt_value == 2.0

    def test_pairwise_rejects_hyperedges(self):
        H = DirectedHypergraph(3, [((0, 1, 2), 1.0)])
        with pytest.raises(InputError):
            sequence_greedy_forward(H, ModularUtility([1.0]), SolveConfig(3))

    def test_utility_size_mismatch(self, lotr_count):
        H, _ = lotr_count
        with pytest.raises(InputError):
            sequence_greedy_forward(H, ModularUtility([1.0]), SolveConfig(2))


class TestBestOfBoth:
    def test_forward_wins_ties(self, lotr_count):
        H, h = lotr_count
        rep = best_of_both(H, h, SolveConfig(2, "both"))
        assert rep.direction_used == "forward"
        assert rep.extra == {"forward_objective": 3.0, "backward_objective": 3.0}
        assert rep.bound == approx_bound(2, H.d_in, H.d_out, 2, "both")

    def test_backward_wins_on_in_star(self):
        # forward grabs the heavy loop at 0 and then every edge into 0 is closed
        H = DirectedHypergraph(3, [((1, 0), 1.0), ((0,), 5.0)])
        h = ModularUtility.from_hypergraph(H)
        rep = best_of_both(H, h, SolveConfig(3, "both"))
        assert rep.direction_used == "backward"
        assert rep.sigma == (1, 0) and rep.objective == 6.0
        assert rep.extra["forward_objective"] == 5.0

    def test_solve_dispatch(self, lotr_count):
        H, h = lotr_count
        assert solve(H, h, SolveConfig(2, "both"), "pairwise").extra["backward_objective"] == 3.0
        assert solve(H, h, SolveConfig(2, "backward"), "hyper").direction_used == "backward"
        with pytest.raises(ConfigError):
            solve(H, h, SolveConfig(2), "nope")
        with pytest.raises(ConfigError):
            solve(H, h, SolveConfig(2, "backward"), "hyper", history=(0,))
        with pytest.raises(ConfigError):
            best_of_both(H, h, SolveConfig(2), "frequency")


class TestFrequency:
    @pytest.fixture
    def loops(self):
        H = DirectedHypergraph(3, [((0,), 0.9), ((1,), 0.5), ((2,), 0.1), ((0, 1), 0.3)])
        return H, CoverageUtility.from_hypergraph(H)

    def test_top_k(self, loops):
        H, h = loops
        rep = frequency_baseline(H, h, 2)
        assert rep.sigma == (0, 1)
        assert rep.objective == pytest.approx(1.0 - 0.5 * 0.7 + 0.9)

    def test_history_skipped(self, loops):
        H, h = loops
        rep = frequency_baseline(H, h, 2, history=(0,))
        assert rep.sigma == (0, 1, 2) and rep.added == (1, 2)

    def test_no_loops_orders_by_id(self):
        H = DirectedHypergraph(4, [((3, 1), 1.0)])
        rep = frequency_baseline(H, ModularUtility.from_hypergraph(H), 3)
        assert rep.sigma == (0, 1, 2)
        assert [t.edge for t in rep.trace] == [-1, -1, -1]


class TestBounds:
    def test_pairwise_example(self):
        assert approx_bound(2, 1, r=2) == pytest.approx((1 - math.exp(-0.5)) / 3, abs=1e-15)

    def test_general_r(self):
        assert approx_bound(6, 2, r=3) == pytest.approx((1 - math.exp(-0.5)) / 7, abs=1e-15)

    def test_backward_uses_out_degree(self):
        assert approx_bound(4, 5, 1, direction="backward") == approx_bound(4, 1)
        assert approx_bound(4, 5, 1, direction="both") == approx_bound(4, 1)

    def test_limits(self):
        assert approx_bound(math.inf, 3, 3, 2, "both") == pytest.approx(asymptotic_bound(3, 2))
        assert approx_bound(math.inf, 3, r=4) == pytest.approx((1 - 1 / math.e) / 13)
        assert approx_bound(1e12, 2, r=3) == pytest.approx(asymptotic_bound(2, 3))

    def test_vacuous(self):
        assert approx_bound(2, 1, r=3) == 0.0
        assert approx_bound(0, 1) == 0.0

    def test_needs_out_degree(self):
        with pytest.raises(ConfigError):
            approx_bound(3, 1, direction="backward")
        with pytest.raises(ConfigError):
            approx_bound(3, 1, 1, direction="up")


def _instances(seed, count, r):
    rng = random.Random(seed)
    for _ in range(count):
        H = random_hypergraph(rng, rng.randint(2, 7), rng.randint(0, 20), r)
        yield H, random_utility(rng, H), rng.randint(0, 6)


class TestInvariants:
    @pytest.mark.parametrize("fill", [False, True])
    def test_trace_and_feasibility(self, fill):
        for H, h, k in _instances(0, 300, 3):
            solvers = HYPER + (PAIRWISE if H.r <= 2 else ())
            for solver in solvers:
                rep = solver(H, h, SolveConfig(k, fill_to_k=fill))
                assert len(rep.sigma) <= k
                assert len(set(rep.sigma)) == len(rep.sigma)
                assert rep.objective == pytest.approx(h.value(induced_edges(H, rep.sigma)), abs=1e-9)
                assert sum(t.realized for t in rep.trace) == pytest.approx(rep.objective, abs=1e-9)
                for t in rep.trace:
                    assert t.realized >= t.gain - 1e-9

    def test_picks_were_eligible(self):
        for H, h, k in _instances(1, 200, 3):
            for solver, eligible in ((hyper_sequence_greedy_forward, eligible_prefix_edges),
                                     (hyper_sequence_greedy_backward, eligible_suffix_edges)):
                rep = solver(H, h, SolveConfig(k))
                for step, before in zip(rep.trace, _states_before(rep)):
                    assert step.edge in eligible(H, before)
                    assert step.edge not in induced_edges(H, before)

    def test_pairwise_picks_follow_endpoint_rule(self):
        for H, h, k in _instances(2, 200, 2):
            fwd = sequence_greedy_forward(H, h, SolveConfig(k, fill_to_k=True))
            for step, before in zip(fwd.trace, _states_before(fwd)):
                assert H.edges[step.edge].last not in before
            bwd = sequence_greedy_backward(H, h, SolveConfig(k, fill_to_k=True))
            for step, before in zip(bwd.trace, _states_before(bwd)):
                assert H.edges[step.edge].first not in before

    def test_deterministic(self):
        for H, h, k in _instances(3, 50, 3):
            assert hyper_sequence_greedy_forward(H, h, SolveConfig(k)) == \
                hyper_sequence_greedy_forward(H, h, SolveConfig(k))


def _states_before(rep):
    # forward runs grow at the end, backward runs at the front
    lengths = [0] + [t.length for t in rep.trace[:-1]]
    if rep.direction_used == "forward":
        return [rep.sigma[:n] for n in lengths]
    return [rep.sigma[len(rep.sigma) - n:] for n in lengths]


class TestDegeneracy:
    def test_r2_hyper_equals_pairwise(self):
        rng = random.Random(4)
        for _ in range(200):
            H = random_digraph(rng, rng.randint(2, 7), rng.randint(0, 20))
            h = random_utility(rng, H)
            k = rng.randint(0, 7)
            for fill in (False, True):
                cfg = SolveConfig(k, fill_to_k=fill)
                assert hyper_sequence_greedy_forward(H, h, cfg).sigma == \
                    sequence_greedy_forward(H, h, cfg).sigma
                assert hyper_sequence_greedy_backward(H, h, cfg).sigma == \
                    sequence_greedy_backward(H, h, cfg).sigma

    def test_r1_equals_classical_greedy(self):
        rng = random.Random(5)
        for _ in range(200):
            n = rng.randint(1, 8)
            H = random_hypergraph(rng, n, rng.randint(0, n), 1, one_loop_per_vertex=True)
            h = random_utility(rng, H)
            k = rng.randint(0, n)
            ref = classical_greedy(H, h, k)
            assert hyper_sequence_greedy_forward(H, h, SolveConfig(k, fill_to_k=False)).sigma == ref.sigma
            assert hyper_sequence_greedy_backward(H, h, SolveConfig(k, fill_to_k=False)).sigma == \
                tuple(reversed(ref.sigma))


class TestHistory:
    def test_history_seeds_sequence(self, lotr_count):
        H, h = lotr_count
        rep = hyper_sequence_greedy_forward(H, h, SolveConfig(1), history=(F,))
        assert rep.history == (F,)
        assert rep.added == (T,)
        assert rep.objective == 3.0
        assert sum(t.realized for t in rep.trace) == 2.0

    def test_history_matches_scan(self):
        # seeding must leave the same eligible set a full rescan would give
        rng = random.Random(6)
        for _ in range(100):
            H = random_hypergraph(rng, 7, 20, 3)
            h = random_utility(rng, H)
            hist = tuple(rng.sample(range(7), rng.randint(0, 4)))
            rep = hyper_sequence_greedy_forward(H, h, SolveConfig(3, fill_to_k=False), hist)
            if rep.trace:
                eid = rep.trace[0].edge
                assert eid in eligible_prefix_edges(H, hist)
                assert eid not in induced_edges(H, hist)

    def test_bad_history(self, lotr_count):
        H, h = lotr_count
        with pytest.raises(InputError):
            sequence_greedy_forward(H, h, SolveConfig(2), history=(0, 0))
        with pytest.raises(InputError):
            sequence_greedy_forward(H, h, SolveConfig(2), history=(7,))
