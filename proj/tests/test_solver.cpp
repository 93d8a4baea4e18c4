#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace persuade;

namespace {

MartingaleSpec counterexample_spec() {
    DiscreteMeasure mu1({{rat(1, 3), rat(1, 7)}, {rat(1, 2), rat(2, 7)}, {rat(3, 4), rat(4, 7)}});
    std::map<Rat, DiscreteMeasure> t;
    t[rat(1, 2)] = DiscreteMeasure({{rat(0), rat(1, 2)}, {rat(1), rat(1, 2)}});
    t[rat(1, 3)] = DiscreteMeasure::dirac(rat(1, 3));
    t[rat(3, 4)] = DiscreteMeasure::dirac(rat(3, 4));
    return MartingaleSpec(std::move(mu1), Kernel(std::move(t)), 2);
}

MartingaleSpec example1_spec() {
    DiscreteMeasure mu1({{rat(1, 4), rat(1, 2)}, {rat(3, 4), rat(1, 2)}});
    Kernel k = binary_signal_kernel(rat(4, 5), {rat(1, 4), rat(3, 4)});
    return MartingaleSpec(std::move(mu1), std::move(k), 2);
}

/// Random spec whose kernels need not be Blackwell preserving: arbitrary
/// mean-preserving tables over the reachable supports.
rnd::RandomSpec random_general_spec(rnd::Rng& rng, int maxT) {
    DiscreteMeasure mu1 = rnd::probability_measure(rng, 1, 4, 10);
    int T = rng.uniform(1, maxT);
    Rat l = rnd::rational(rng, 16, mu1.min_point(), Rat(1));
    if (l == 0) l = Rat(1, 2);
    std::vector<Kernel> kernels;
    std::set<Rat> cur;
    for (const auto& a : mu1.atoms()) cur.insert(a.point);
    for (int t = 1; t < T; ++t) {
        std::vector<Rat> sup(cur.begin(), cur.end());
        Kernel k = rnd::mps_kernel(rng, sup, 8);
        std::set<Rat> next;
        for (const auto& x : sup)
            for (const auto& b : k.at(x).atoms()) next.insert(b.point);
        kernels.push_back(std::move(k));
        cur = std::move(next);
    }
    return {MartingaleSpec(mu1, kernels, T), l, rnd::random_weights(rng, T)};
}

} // namespace

TEST_CASE("weight schedules") {
    CHECK_THROWS_AS(WeightSchedule::explicit_weights({}), DomainError);
    CHECK_THROWS_AS(WeightSchedule::explicit_weights({rat(1), rat(2)}), DomainError);
    CHECK_THROWS_AS(WeightSchedule::explicit_weights({rat(-1)}), DomainError);
    CHECK_THROWS_AS(WeightSchedule::geometric(rat(1)), DomainError);
    CHECK_THROWS_AS(WeightSchedule::geometric(rat(0)), DomainError);
    auto geo = WeightSchedule::geometric(rat(2, 3));
    CHECK(geo.weight(1) == rat(2, 3));
    CHECK(geo.weight(3) == rat(8, 27));
    auto ex = WeightSchedule::explicit_weights({rat(1), rat(1, 2)});
    CHECK(ex.weight(2) == rat(1, 2));
    CHECK(ex.weight(3) == 0);
}

TEST_CASE("lp_solve on the counterexample") {
    auto spec = counterexample_spec();
    auto w = WeightSchedule::explicit_weights({rat(1), rat(3, 4)});
    auto res = lp_solve(spec, rat(2, 3), w);
    CHECK(res.value.lo == rat(25, 28)); // the exact optimum; beats the 7/8 reference plan
    CHECK(res.value.lo >= rat(7, 8));
    CHECK(res.value.lo > rat(6, 7));
    CHECK(ic_check(res.plan, spec, rat(2, 3)).ok);
    CHECK(plan_value(res.plan, w) == res.value.lo);
}

TEST_CASE("lp_solve on example 1") {
    auto spec = example1_spec();
    Rat l(18, 25);
    auto res = lp_solve(spec, l, WeightSchedule::explicit_weights({rat(1), rat(1, 2)}));
    CHECK(res.per_period_mass[0] == rat(25, 47)); // greedy regime
    CHECK(res.value.lo == rat(25, 47));

    auto interior = lp_solve(spec, l, WeightSchedule::explicit_weights({rat(1), rat(4, 5)}));
    CHECK(interior.per_period_mass[0] == rat(125, 378));
    CHECK(interior.value.lo == rat(71, 126));
}

TEST_CASE("lp_solve single period reduces to greedy") {
    rnd::Rng rng(41);
    for (int i = 0; i < 20; ++i) {
        DiscreteMeasure mu = rnd::probability_measure(rng, 1, 5, 10);
        Rat l = rnd::rational(rng, 12);
        Rat w1 = rnd::rational(rng, 6, Rat(1, 6), Rat(1));
        MartingaleSpec spec(mu, std::vector<Kernel>{}, 1);
        auto res = lp_solve(spec, l, WeightSchedule::explicit_weights({w1}));
        Rat g = mu.max_point() < l ? Rat(0) : greedy_mass(mu, l);
        CHECK(res.value.lo == w1 * g);
    }
}

TEST_CASE("lp_solve variable cap") {
    auto spec = example1_spec();
    CHECK_THROWS_AS(lp_solve(spec, rat(18, 25), WeightSchedule::explicit_weights({rat(1), rat(1, 2)}), 3),
                    HorizonTooLargeError);
}

TEST_CASE("interval_optimize equals lp on Blackwell-preserving specs") {
    auto spec = example1_spec();
    Rat l(18, 25);
    for (const Rat& w2 : {rat(1, 4), rat(3, 4), rat(49, 50)}) {
        auto w = WeightSchedule::explicit_weights({rat(1), w2});
        auto lp = lp_solve(spec, l, w);
        auto io = interval_optimize(spec, l, w);
        CHECK(io.value.lo == lp.value.lo);
        CHECK(ic_check(io.plan, spec, l).ok);
    }
    rnd::Rng rng(47);
    for (int i = 0; i < 15; ++i) {
        auto rs = rnd::blackwell_preserving_spec(rng, 4, 9);
        auto lp = lp_solve(rs.spec, rs.l, rs.weights);
        auto io = interval_optimize(rs.spec, rs.l, rs.weights);
        CHECK(lp.value.lo == io.value.lo);
    }
}

TEST_CASE("interval_optimize on the counterexample stays at 6/7") {
    auto spec = counterexample_spec();
    auto res = interval_optimize(spec, rat(2, 3), WeightSchedule::explicit_weights({rat(1), rat(3, 4)}));
    CHECK(res.value.lo == rat(6, 7));
    CHECK(res.per_period_mass[0] == rat(6, 7)); // greedy at t=1 among interval policies
}

TEST_CASE("interval_optimize dominates dense scans and matches its own plan") {
    rnd::Rng rng(53);
    for (int i = 0; i < 12; ++i) {
        auto rs = random_general_spec(rng, 2);
        auto io = interval_optimize(rs.spec, rs.l, rs.weights);
        CHECK(plan_value(io.plan, rs.weights) == io.value.lo);
        CHECK(ic_check(io.plan, rs.spec, rs.l).ok);
        const DiscreteMeasure& mu1 = rs.spec.initial();
        if (mu1.max_point() < rs.l) continue;
        Rat g = greedy_mass(mu1, rs.l);
        int T = finite_horizon(rs.spec.horizon());
        for (int k = 0; k <= 16; ++k) {
            Rat alpha = g * rat(k, 16);
            DiscreteMeasure nu1 = interval_measure(mu1, rs.l, alpha);
            Rat v = rs.weights.weight(1) * alpha;
            if (T >= 2) {
                DiscreteMeasure mu2 = pushforward(rs.spec.kernel(1), subtract(mu1, nu1));
                if (mu2.total_mass() > 0 && mu2.max_point() >= rs.l)
                    v += rs.weights.weight(2) * greedy_mass(mu2, rs.l);
            }
            CHECK(io.value.lo >= v);
        }
    }
}

TEST_CASE("interval_optimize horizon cap") {
    Grid g = Grid::standard(rat(1, 4), rat(1, 2));
    MartingaleSpec spec(DiscreteMeasure::dirac(rat(1, 4)), random_walk_kernel(g), 12);
    CHECK_THROWS_AS(interval_optimize(spec, rat(1, 2), WeightSchedule::geometric(rat(1, 2))),
                    HorizonTooLargeError);
}

TEST_CASE("greedy_evaluate") {
    auto spec = example1_spec();
    Rat l(18, 25);
    auto res = greedy_evaluate(spec, l, WeightSchedule::explicit_weights({rat(1), rat(1, 2)}));
    REQUIRE(res.per_period_mass.size() == 2);
    CHECK(res.per_period_mass[0] == rat(25, 47));
    CHECK(res.per_period_mass[1] == 0); // the residual lands strictly below l
    CHECK(res.value.lo == rat(25, 47));
    CHECK(res.exact);

    // immediate full adoption when the prior mean clears the threshold
    DiscreteMeasure high({{rat(1, 2), rat(1, 2)}, {rat(1), rat(1, 2)}});
    MartingaleSpec hspec(high, std::vector<Kernel>{}, 1);
    auto hres = greedy_evaluate(hspec, rat(3, 5), WeightSchedule::explicit_weights({rat(7, 8)}));
    CHECK(hres.value.lo == rat(7, 8));
}

TEST_CASE("greedy value recursion on the grid") {
    // V_T(delta_{l-eps}) = (delta/2) (delta + V_{T-1}(delta_{l-2eps})), exactly
    Rat eps(1, 20), l(1, 2), delta(3, 5);
    Grid g = Grid::standard(eps, l);
    Kernel walk = random_walk_kernel(g);
    auto w = WeightSchedule::geometric(delta);
    auto vT = greedy_evaluate(MartingaleSpec(DiscreteMeasure::dirac(l - eps), walk, 30), l, w);
    auto vT1 = greedy_evaluate(MartingaleSpec(DiscreteMeasure::dirac(l - 2 * eps), walk, 29), l, w);
    CHECK(vT.value.lo == (delta / 2) * (delta + vT1.value.lo));
}

TEST_CASE("oracle dominance: lp >= interval >= greedy") {
    rnd::Rng rng(61);
    for (int i = 0; i < 12; ++i) {
        auto rs = random_general_spec(rng, 3);
        auto lp = lp_solve(rs.spec, rs.l, rs.weights);
        auto io = interval_optimize(rs.spec, rs.l, rs.weights);
        auto gr = greedy_evaluate(rs.spec, rs.l, rs.weights);
        CHECK(lp.value.lo >= io.value.lo);
        CHECK(io.value.lo >= gr.value.lo);
    }
    for (int i = 0; i < 10; ++i) {
        auto rs = rnd::impatient_walk_spec(rng, 5);
        auto lp = lp_solve(rs.spec, rs.l, rs.weights);
        auto gr = greedy_evaluate(rs.spec, rs.l, rs.weights);
        CHECK(lp.value.lo == gr.value.lo); // impatient walk regime: greedy is optimal
    }
}

TEST_CASE("value iteration brackets") {
    Rat eps(1, 100), l(1, 2);
    Grid g = Grid::standard(eps, l);
    Rat tol = parse_rational("1e-9");

    // absorbing start at the top: adopt at t=1, value delta
    auto atTop = value_iterate_random_walk(g, l, rat(3, 5), DiscreteMeasure::dirac(rat(1)), tol);
    CHECK(atTop.lo == rat(3, 5));
    CHECK(atTop.hi == rat(3, 5));

    auto atBottom = value_iterate_random_walk(g, l, rat(3, 5), DiscreteMeasure::dirac(rat(0)), tol);
    CHECK(atBottom.lo == 0);
    CHECK(atBottom.hi == 0);

    // v(l - eps)/delta approaches c = (1 - sqrt(1 - delta^2))/delta; at delta = 4/5, c = 1/2
    Rat delta(4, 5);
    auto v = value_iterate_random_walk(g, l, delta, DiscreteMeasure::dirac(l - eps), tol);
    RatInterval norm{v.lo / delta, v.hi / delta};
    CHECK(abs_rat(norm.midpoint() - rat(1, 2)) <= 2 * eps);
    CHECK(norm.width() <= tol * 2);

    CHECK_THROWS_AS(
        value_iterate_random_walk(g, l, rat(99, 100), DiscreteMeasure::dirac(l - eps),
                                  parse_rational("1e-12"), 50),
        ToleranceUnachievableError);
    CHECK_THROWS_AS(value_iterate_random_walk(g, l, rat(1, 2), DiscreteMeasure::dirac(rat(1, 3)),
                                              tol),
                    OffGridSupportError);
}

TEST_CASE("grid D") {
    CHECK(grid_D(Grid::standard(rat(1, 100), rat(1, 2))).value == 2);
    // off-grid threshold: l = n eps + eps', D = (eps' + eps)/eps'
    {
        Rat eps(1, 10), epsPrime(1, 40);
        Grid g = Grid::standard(eps, rat(3, 10) + epsPrime);
        CHECK(grid_D(g).value == (epsPrime + eps) / epsPrime);
        CHECK_FALSE(grid_D(g).lower_bound_only);
    }
    // binary-signal grid at p = 3/4: 1/D = 2p^2 - 2p + 1 = 5/8
    {
        Grid g = Grid::binary_signal(rat(3, 4), 6, rat(1, 2));
        auto d = grid_D(g);
        CHECK(d.value == rat(8, 5));
        CHECK(d.lower_bound_only); // finite window onto an infinite grid
    }
    CHECK_THROWS_AS(grid_D(Grid({rat(0), rat(1, 2), rat(1)}, rat(1, 4))), DegenerateGridError);
}

TEST_CASE("transparent policy matches the greedy adoption law") {
    rnd::Rng rng(67);
    for (int i = 0; i < 10; ++i) {
        Grid g = rnd::grid(rng, 9);
        DiscreteMeasure mu1 = rnd::delta_star_measure(rng, g);
        int T = rng.uniform(3, 20);
        auto law = transparent_equivalent_adoption_law(g, g.threshold(), mu1, T);
        auto greedy =
            greedy_evaluate(MartingaleSpec(mu1, random_walk_kernel(g), T), g.threshold(),
                            WeightSchedule::geometric(rat(1, 2)));
        REQUIRE(static_cast<int>(law.size()) == T);
        for (int t = 0; t < T; ++t) {
            Rat gmass = static_cast<std::size_t>(t) < greedy.per_period_mass.size()
                            ? greedy.per_period_mass[static_cast<std::size_t>(t)]
                            : Rat(0);
            CHECK(law[static_cast<std::size_t>(t)].second == gmass);
        }
    }
    // start at z_1 >= l: adopt at t = 1 with probability one
    Grid g = Grid::standard(rat(1, 5), rat(1, 2));
    auto law = transparent_equivalent_adoption_law(g, rat(1, 2), DiscreteMeasure::dirac(rat(3, 5)), 3);
    CHECK(law[0].second == 1);
    CHECK(law[1].second == 0);
    // start at the absorbing bottom: never adopt
    auto law0 = transparent_equivalent_adoption_law(g, rat(1, 2), DiscreteMeasure::dirac(rat(0)), 5);
    for (auto& [t, a] : law0) CHECK(a == 0);
}

TEST_CASE("truncated-infinite greedy evaluation certifies its interval") {
    Grid g = Grid::standard(rat(1, 10), rat(1, 2));
    DiscreteMeasure mu1 = DiscreteMeasure::dirac(rat(2, 5));
    Rat delta(1, 2);
    MartingaleSpec inf(mu1, random_walk_kernel(g), TruncatedInfinite{parse_rational("1e-8")});
    auto res = greedy_evaluate(inf, rat(1, 2), WeightSchedule::geometric(delta));
    CHECK(res.value.width() <= parse_rational("1e-8"));
    // finite-horizon values approach the bracket from below
    for (int T : {4, 8, 16}) {
        auto fin = greedy_evaluate(MartingaleSpec(mu1, random_walk_kernel(g), T), rat(1, 2),
                                   WeightSchedule::geometric(delta));
        CHECK(fin.value.lo <= res.value.hi);
    }
    auto fin16 = greedy_evaluate(MartingaleSpec(mu1, random_walk_kernel(g), 16), rat(1, 2),
                                 WeightSchedule::geometric(delta));
    CHECK(res.value.lo >= fin16.value.lo);
}
