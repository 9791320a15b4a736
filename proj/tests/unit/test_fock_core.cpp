#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "bellbin/optics.hpp"
#include "bellbin/photonic_state.hpp"
#include "support/random_optics.hpp"

using namespace bellbin;

namespace {

Mode at(Port p, int t = 0) { return {p, t, 0}; }

double prob(const ProbabilityMap& pm, Occupation occ) {
    auto it = pm.find(canonical(std::move(occ)));
    return it == pm.end() ? 0.0 : it->second;
}

}  // namespace

TEST_CASE("make_state builds single normalized terms") {
    auto one = make_state({{at(Port::a), 1}});
    CHECK(one.terms().size() == 1);
    CHECK(one.amplitude({at(Port::a)}) == Amplitude{1.0, 0.0});
    CHECK(one.normalized());

    auto two = make_state({{at(Port::a), 2}});
    CHECK(two.terms().size() == 1);
    CHECK(two.norm_squared() == doctest::Approx(1.0));

    auto vac = make_state({});
    CHECK(vac.is_vacuum());
    CHECK(vac.norm_squared() == 1.0);
}

TEST_CASE("make_state rejects window and budget violations") {
    CHECK_THROWS_AS(make_state({{at(Port::a, 3), 1}}), std::out_of_range);
    CHECK_THROWS_AS(make_state({{at(Port::a), 5}}), std::out_of_range);
    CHECK_THROWS_AS(make_state({{at(Port::a), 2}}, FockLimits{.window = 3, .max_photons = 1}), std::out_of_range);
    CHECK_THROWS_AS(make_state({{Mode{Port::a, 0, 2}, 1}}), std::out_of_range);
}

TEST_CASE("superpose") {
    const double s = std::numbers::sqrt2 / 2;
    auto q = superpose({{s, make_state({{at(Port::a, 0), 1}})}, {s, make_state({{at(Port::a, 1), 1}})}});
    CHECK(q.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q.terms().size() == 2);

    auto psi = make_state({{at(Port::b, 1), 1}});
    auto phi = make_state({{at(Port::c, 0), 1}});
    auto same = superpose({{1.0, psi}, {0.0, phi}});
    CHECK(max_amplitude_difference(same, psi) < 1e-15);

    auto singlet = superpose({{s, make_state({{at(Port::a, 0), 1}, {at(Port::b, 1), 1}})},
                              {-s, make_state({{at(Port::a, 1), 1}, {at(Port::b, 0), 1}})}});
    CHECK(std::abs(singlet.norm_squared() - 1.0) < 1e-12);

    CHECK_THROWS_AS(superpose({{1.0, psi}, {-1.0, psi}}), std::domain_error);
}

TEST_CASE("apply_transform: vacuum, single photon and Hong-Ou-Mandel") {
    auto bs = beamsplitter(Port::a, Port::b, Port::c, Port::d, 0.5, 3);
    CHECK(apply_transform(make_state({}), bs).is_vacuum());

    auto single = measure_number(apply_transform(make_state({{at(Port::a), 1}}), bs));
    CHECK(prob(single, {at(Port::c)}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(prob(single, {at(Port::d)}) == doctest::Approx(0.5).epsilon(1e-12));

    // a^dag b^dag -> (c + i d)(i c + d)/2 = (i c^2 + i d^2)/2  =>  |2_c> and
    // |2_d> each with amplitude i/sqrt 2, no coincidence term.
    auto out = apply_transform(make_state({{at(Port::a), 1}, {at(Port::b), 1}}), bs);
    auto pm = measure_number(out);
    CHECK(prob(pm, {at(Port::c), at(Port::d)}) < 1e-30);
    CHECK(prob(pm, {at(Port::c), at(Port::c)}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(prob(pm, {at(Port::d), at(Port::d)}) == doctest::Approx(0.5).epsilon(1e-12));
    const Amplitude expected{0.0, std::numbers::sqrt2 / 2};
    CHECK(std::abs(out.amplitude({at(Port::c), at(Port::c)}) - expected) < 1e-12);
    CHECK(std::abs(out.amplitude({at(Port::d), at(Port::d)}) - expected) < 1e-12);
}

TEST_CASE("two photons in one mode through a beamsplitter follow the binomial sqrt(n!) amplitudes") {
    // (a^dag)^2/sqrt2 |0> -> (c + i d)^2 / (2 sqrt2) |0>
    //   = (c^2 + 2i cd - d^2)/(2 sqrt 2)
    //   -> |2_c> : 1/2,  |1_c 1_d> : i/sqrt2,  |2_d> : -1/2
    auto bs = beamsplitter(Port::a, Port::b, Port::c, Port::d, 0.5, 3);
    auto out = apply_transform(make_state({{at(Port::a), 2}}), bs);
    CHECK(std::abs(out.amplitude({at(Port::c), at(Port::c)}) - Amplitude(0.5, 0)) < 1e-12);
    CHECK(std::abs(out.amplitude({at(Port::c), at(Port::d)}) - Amplitude(0, std::numbers::sqrt2 / 2)) < 1e-12);
    CHECK(std::abs(out.amplitude({at(Port::d), at(Port::d)}) - Amplitude(-0.5, 0)) < 1e-12);
}

TEST_CASE("apply_transform errors") {
    auto bs = beamsplitter(Port::a, Port::b, Port::c, Port::d, 0.5, 3, 2);
    CHECK_THROWS_AS(apply_transform(make_state({{at(Port::a, 2), 1}}), bs), std::out_of_range);
    auto delay = delay_line(Port::a, 1, 3);
    CHECK_THROWS_AS(apply_transform(make_state({{at(Port::a, 2), 1}}), delay), std::out_of_range);
    // A photon on an untouched port passes through.
    auto passthrough = apply_transform(make_state({{at(Port::bob, 1), 1}}), bs);
    CHECK(passthrough.amplitude({at(Port::bob, 1)}) == Amplitude{1.0, 0.0});
}

TEST_CASE("property: unitarity, linearity and composition for random unitaries") {
    std::mt19937_64 rng(20261018);
    const auto modes = testing::small_mode_set();
    for (int trial = 0; trial < 100; ++trial) {
        auto u1 = testing::random_unitary(modes, rng);
        auto u2 = testing::random_unitary(modes, rng);
        REQUIRE(u1.is_unitary(1e-12));
        auto s = testing::random_state(modes, 3, rng);
        auto t = testing::random_state(modes, 3, rng);

        auto us = apply_transform(s, u1);
        CHECK(std::abs(us.norm_squared() - s.norm_squared()) < 1e-12);

        const Amplitude alpha{0.3, -0.7}, beta{1.1, 0.2};
        auto lhs = apply_transform(superpose({{alpha, s}, {beta, t}}, false), u1);
        auto rhs = superpose({{alpha, us}, {beta, apply_transform(t, u1)}}, false);
        CHECK(max_amplitude_difference(lhs, rhs) < 1e-12);

        auto twice = apply_transform(us, u2);
        auto composed = apply_transform(s, compose(u1, u2));
        CHECK(max_amplitude_difference(twice, composed) < 1e-12);

        double total = 0.0;
        for (const auto& [occ, p] : measure_number(us)) total += p;
        CHECK(std::abs(total - us.norm_squared()) < 1e-12);
    }
}

TEST_CASE("measure_number") {
    auto pm = measure_number(make_state({{at(Port::a), 1}}));
    CHECK(pm.size() == 1);
    CHECK(prob(pm, {at(Port::a)}) == 1.0);

    const double s = std::numbers::sqrt2 / 2;
    auto eq = measure_number(superpose({{s, make_state({{at(Port::a), 1}})}, {s, make_state({{at(Port::b), 1}})}}));
    CHECK(prob(eq, {at(Port::a)}) == doctest::Approx(0.5));
    CHECK(prob(eq, {at(Port::b)}) == doctest::Approx(0.5));
}

TEST_CASE("tensor and creation operators") {
    auto a = make_state({{at(Port::a), 1}});
    auto b = make_state({{at(Port::b), 1}});
    auto ab = tensor(a, b);
    CHECK(ab.normalized());
    CHECK(ab.amplitude(canonical({at(Port::a), at(Port::b)})) == Amplitude{1.0, 0.0});
    CHECK_THROWS_AS(tensor(a, a), std::invalid_argument);

    // a^dag |1_a> = sqrt2 |2_a>
    const ModeAmplitude op[] = {{at(Port::a), 1.0}};
    auto twice = apply_creation(a, op);
    CHECK(std::abs(twice.amplitude({at(Port::a), at(Port::a)}) - std::sqrt(2.0)) < 1e-15);
    CHECK(!twice.normalized());

    FockLimits tight{.window = 3, .max_photons = 1};
    auto cut = tensor(superpose({{1.0, make_state({}, tight)}, {1.0, make_state({{at(Port::a), 1}}, tight)}}),
                      superpose({{1.0, make_state({}, tight)}, {1.0, make_state({{at(Port::b), 1}}, tight)}}));
    CHECK(!cut.normalized());
    CHECK(cut.norm_squared() == doctest::Approx(0.75));
}
