#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace persuade;

TEST_CASE("rational parsing and rendering") {
    CHECK(to_string(parse_rational("3/94")) == "3/94");
    CHECK(to_string(parse_rational("-2/4")) == "-1/2");
    CHECK(to_string(parse_rational("0.25")) == "1/4");
    CHECK(to_string(parse_rational("1e-4")) == "1/10000");
    CHECK(to_string(parse_rational("2.5e3")) == "2500");
    CHECK(to_string(parse_rational(" 18/25 ")) == "18/25");
    CHECK_THROWS_AS(parse_rational("1/0"), DomainError);
    CHECK_THROWS_AS(parse_rational("abc"), DomainError);

    CHECK(to_decimal_string(rat(1, 3), 6) == "0.333333");
    CHECK(to_decimal_string(rat(2, 3), 6) == "0.666667");
    CHECK(to_decimal_string(rat(-1, 8), 3) == "-0.125");
    CHECK(to_decimal_string(rat(5), 0) == "5");

    rnd::Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        Rat r = rnd::rational(rng, 1000) - rnd::rational(rng, 1000);
        CHECK(parse_rational(to_string(r)) == r);
    }
}

TEST_CASE("sqrt enclosure") {
    auto iv = sqrt_interval(rat(2), 25);
    CHECK(iv.lo * iv.lo <= 2);
    CHECK(iv.hi * iv.hi >= 2);
    CHECK(iv.width() <= parse_rational("1e-24"));
    // exact square
    auto iv2 = sqrt_interval(rat(9, 16), 10);
    CHECK(iv2.lo <= rat(3, 4));
    CHECK(iv2.hi >= rat(3, 4));
}

TEST_CASE("measure construction canonicalizes") {
    DiscreteMeasure m({{rat(1, 2), rat(1, 4)}, {rat(1, 4), rat(0)}, {rat(1, 2), rat(1, 4)}});
    REQUIRE(m.size() == 1);
    CHECK(m.atoms()[0].point == rat(1, 2));
    CHECK(m.atoms()[0].weight == rat(1, 2));
    CHECK_THROWS_AS(DiscreteMeasure({{rat(3, 2), rat(1)}}), DomainError);
    CHECK_THROWS_AS(DiscreteMeasure({{rat(1, 2), rat(-1)}}), DomainError);
}

TEST_CASE("total_mass") {
    CHECK(DiscreteMeasure::zero().total_mass() == 0);
    DiscreteMeasure spread({{rat(1, 4), rat(1, 2)}, {rat(3, 4), rat(1, 2)}});
    CHECK(spread.total_mass() == 1);
    DiscreteMeasure cx({{rat(1, 3), rat(1, 7)}, {rat(1, 2), rat(2, 7)}, {rat(3, 4), rat(4, 7)}});
    CHECK(cx.total_mass() == 1);
}

TEST_CASE("barycenter") {
    CHECK(DiscreteMeasure::dirac(rat(1, 2)).barycenter() == rat(1, 2));
    DiscreteMeasure spread({{rat(1, 4), rat(1, 2)}, {rat(3, 4), rat(1, 2)}});
    CHECK(spread.barycenter() == rat(1, 2));
    DiscreteMeasure tail({{rat(1, 2), rat(2, 7)}, {rat(3, 4), rat(4, 7)}});
    CHECK(tail.barycenter() == rat(2, 3));
    CHECK_THROWS_AS(DiscreteMeasure::zero().barycenter(), ZeroMassError);
}

TEST_CASE("subtract") {
    DiscreteMeasure mu({{rat(1, 4), rat(1, 2)}, {rat(3, 4), rat(1, 2)}});
    CHECK(subtract(mu, mu) == DiscreteMeasure::zero());

    DiscreteMeasure nu({{rat(1, 4), rat(3, 94)}, {rat(3, 4), rat(1, 2)}});
    DiscreteMeasure residual = subtract(mu, nu);
    CHECK(residual == DiscreteMeasure::dirac(rat(1, 4), rat(22, 47)));

    DiscreteMeasure tooMuch({{rat(3, 4), rat(3, 5)}});
    try {
        subtract(mu, tooMuch);
        FAIL("expected NotSubmeasureError");
    } catch (const NotSubmeasureError& e) {
        CHECK(e.point == "3/4");
    }

    // subtract(mu, nu) + nu == mu whenever nu <= mu
    rnd::Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        DiscreteMeasure m = rnd::measure(rng, 1, 5, 12);
        DiscreteMeasure s = rnd::submeasure(rng, m);
        REQUIRE(leq(s, m));
        CHECK(add(subtract(m, s), s) == m);
    }
}

TEST_CASE("leq") {
    DiscreteMeasure mu({{rat(1, 4), rat(1, 2)}, {rat(3, 4), rat(1, 2)}});
    CHECK(leq(DiscreteMeasure::zero(), mu));
    CHECK(leq(DiscreteMeasure::dirac(rat(3, 4), rat(1, 2)), mu));
    CHECK_FALSE(leq(DiscreteMeasure::dirac(rat(1, 2)), mu));
}

TEST_CASE("fosd_leq") {
    DiscreteMeasure mu({{rat(1, 4), rat(1, 2)}, {rat(3, 4), rat(1, 2)}});
    CHECK(fosd_leq(mu, mu));
    CHECK(fosd_leq(DiscreteMeasure::dirac(rat(1, 4)), DiscreteMeasure::dirac(rat(3, 4))));
    DiscreteMeasure ends({{rat(0), rat(1, 2)}, {rat(1), rat(1, 2)}});
    CHECK_FALSE(fosd_leq(DiscreteMeasure::dirac(rat(3, 4)), ends)); // tail at 3/4: 1/2 < 1
    // larger total mass can never be dominated
    CHECK_FALSE(fosd_leq(DiscreteMeasure::dirac(rat(1, 2), rat(2)), ends));

    rnd::Rng rng(11);
    for (int i = 0; i < 60; ++i) {
        auto [lo, hi] = rnd::fosd_pair(rng);
        CHECK(fosd_leq(lo, hi));
        CHECK(dominates(lo, hi).dominated); // FOSD implies domination
    }
}

TEST_CASE("blackwell_leq basics") {
    DiscreteMeasure mid = DiscreteMeasure::dirac(rat(1, 2));
    DiscreteMeasure ends({{rat(0), rat(1, 2)}, {rat(1), rat(1, 2)}});
    DiscreteMeasure quarters({{rat(1, 4), rat(1, 2)}, {rat(3, 4), rat(1, 2)}});
    CHECK(blackwell_leq(mid, ends));
    CHECK_FALSE(blackwell_leq(ends, mid));
    CHECK(blackwell_leq(quarters, ends));
    CHECK_THROWS_AS(blackwell_leq(mid, DiscreteMeasure::dirac(rat(1, 2), rat(2))),
                    MassMismatchError);
    CHECK_THROWS_AS(blackwell_leq(mid, DiscreteMeasure::dirac(rat(1, 4))), MeanMismatchError);
}

TEST_CASE("blackwell_leq agrees with the transport oracle") {
    rnd::Rng rng(23);
    int positives = 0;
    for (int i = 0; i < 80; ++i) {
        auto [lambda, mu] = rnd::blackwell_pair(rng);
        REQUIRE(blackwell_leq(lambda, mu));
        CHECK(oracle::blackwell_by_transport(lambda, mu));
        CHECK(oracle::stop_loss_leq(lambda, mu));
        CHECK(dominates(lambda, mu).dominated); // Blackwell implies domination
        ++positives;
    }
    REQUIRE(positives == 80);
    // random equal-mass equal-mean pairs: agreement in both directions
    for (int i = 0; i < 120; ++i) {
        DiscreteMeasure a = rnd::measure(rng, 1, 4, 8);
        if (a.total_mass() == 0) continue;
        auto b = rnd::submeasure_with_mean(rng, rnd::measure(rng, 2, 5, 8), a.barycenter());
        if (!b || b->total_mass() == 0) continue;
        DiscreteMeasure bn = scale(*b, a.total_mass() / b->total_mass());
        REQUIRE(bn.barycenter() == a.barycenter());
        CHECK(blackwell_leq(a, bn) == oracle::blackwell_by_transport(a, bn));
    }
}

TEST_CASE("blackwell_leq is a partial order") {
    rnd::Rng rng(31);
    for (int i = 0; i < 40; ++i) {
        DiscreteMeasure a = rnd::measure(rng, 1, 4, 8);
        if (a.total_mass() == 0) continue;
        CHECK(blackwell_leq(a, a)); // reflexive
        // transitive along a spread chain
        std::vector<Rat> sup;
        for (const auto& at : a.atoms()) sup.push_back(at.point);
        DiscreteMeasure b = pushforward(rnd::mps_kernel(rng, sup), a);
        std::vector<Rat> sup2;
        for (const auto& at : b.atoms()) sup2.push_back(at.point);
        DiscreteMeasure c = pushforward(rnd::mps_kernel(rng, sup2), b);
        CHECK(blackwell_leq(a, b));
        CHECK(blackwell_leq(b, c));
        CHECK(blackwell_leq(a, c));
        // antisymmetric up to equality
        if (blackwell_leq(b, a)) CHECK(a == b);
    }
}

TEST_CASE("dominates") {
    CHECK(dominates(DiscreteMeasure::dirac(rat(1, 4)), DiscreteMeasure::dirac(rat(3, 4))).dominated);
    CHECK_FALSE(
        dominates(DiscreteMeasure::dirac(rat(3, 4)), DiscreteMeasure::dirac(rat(1, 4))).dominated);
    CHECK_THROWS_AS(dominates(DiscreteMeasure::dirac(rat(1, 2), rat(2)),
                              DiscreteMeasure::dirac(rat(1, 2))),
                    MassMismatchError);

    rnd::Rng rng(43);
    for (int i = 0; i < 60; ++i) {
        auto [lambda, mu] = rnd::domination_pair(rng);
        auto res = dominates(lambda, mu);
        REQUIRE(res.dominated);
        REQUIRE(res.witness.has_value());
        CHECK(oracle::witness_is_valid(*res.witness, lambda, mu));
    }
    // closed under addition
    for (int i = 0; i < 60; ++i) {
        auto [a, b] = rnd::domination_pair(rng);
        auto [c, d] = rnd::domination_pair(rng);
        CHECK(dominates(add(a, c), add(b, d)).dominated);
    }
}

TEST_CASE("dominates equals the increasing convex order on equal masses") {
    rnd::Rng rng(57);
    int agreements = 0;
    for (int i = 0; i < 120; ++i) {
        DiscreteMeasure a = rnd::measure(rng, 1, 4, 8);
        DiscreteMeasure b = rnd::measure(rng, 1, 4, 8);
        if (a.total_mass() == 0 || b.total_mass() == 0) continue;
        b = scale(b, a.total_mass() / b.total_mass());
        CHECK(dominates(a, b).dominated == oracle::stop_loss_leq(a, b));
        ++agreements;
    }
    REQUIRE(agreements >= 100);
}

TEST_CASE("top_mass") {
    DiscreteMeasure mu({{rat(1, 4), rat(1, 2)}, {rat(3, 4), rat(1, 2)}});
    CHECK(top_mass(mu, mu.total_mass()) == mu);
    CHECK(top_mass(mu, rat(1, 2)) == DiscreteMeasure::dirac(rat(3, 4), rat(1, 2)));
    DiscreteMeasure expect({{rat(1, 4), rat(1, 4)}, {rat(3, 4), rat(1, 2)}});
    CHECK(top_mass(mu, rat(3, 4)) == expect);
    CHECK_THROWS_AS(top_mass(mu, rat(2)), MassMismatchError);

    rnd::Rng rng(71);
    for (int i = 0; i < 60; ++i) {
        DiscreteMeasure m = rnd::measure(rng, 1, 5, 10);
        if (m.total_mass() == 0) continue;
        Rat target = m.total_mass() * rnd::rational(rng, 8, Rat(0), Rat(1));
        DiscreteMeasure top = top_mass(m, target);
        CHECK(top.total_mass() == target);
        // FOSD-dominates every other sub-measure of the same mass
        DiscreteMeasure s = rnd::submeasure(rng, m);
        if (s.total_mass() >= target && s.total_mass() > 0) {
            DiscreteMeasure other = scale(s, target / s.total_mass());
            CHECK(fosd_leq(other, top));
        }
    }
}

TEST_CASE("measure JSON round trip is bit exact") {
    rnd::Rng rng(83);
    for (int i = 0; i < 50; ++i) {
        DiscreteMeasure m = rnd::measure(rng, 0, 6, 997);
        Json j = measure_to_json(m);
        CHECK(measure_from_json(j) == m);
        CHECK(Json::parse(j.dump()) == j);
    }
}
