#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "bellbin/detection.hpp"

using namespace bellbin;

namespace {

constexpr double pi = std::numbers::pi;

std::size_t idx(const CoincidenceOutcome& o) { return outcome_index(o); }

std::vector<double> grid(int n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = 2 * pi * i / n;
    return x;
}

}  // namespace

TEST_CASE("ideal detectors reproduce the phi+ row within 5 sigma") {
    const auto row = bell_table(0.0)[0];
    const std::uint64_t shots = 1'000'000;
    const auto rec = sample_outcomes(row, DetectorModel::ideal(), shots, 2024);
    std::uint64_t total = rec.no_coincidence;
    for (std::size_t i = 0; i < kOutcomeCount; ++i) {
        const double p = row[i];
        const double sigma = std::sqrt(shots * p * (1 - p));
        CHECK(std::abs(static_cast<double>(rec.counts[i]) - shots * p) <= 5 * sigma + 1e-9);
        total += rec.counts[i];
    }
    CHECK(total == shots);
    CHECK(rec.no_coincidence == 0);
}

TEST_CASE("counts depend only on the seed, not on the worker count") {
    const auto row = bell_table(0.0)[3];
    DetectorModel det{{0.6, 0.8}, 0.01, AnalyzerMode::DeadTimeLimited};
    const auto events = events_from_outcomes(row);
    const auto serial = sample_counts_serial(events, det, 50'000, 11, coincidence_bin, kOutcomeCount);
    for (int workers : {1, 2, 4}) {
        CHECK(sample_counts(events, det, 50'000, 11, coincidence_bin, kOutcomeCount, workers) == serial);
    }
    CHECK(sample_outcomes(row, det, 20'000, 5, 1) == sample_outcomes(row, det, 20'000, 5, 3));
    CHECK_FALSE(sample_outcomes(row, det, 20'000, 5) == sample_outcomes(row, det, 20'000, 6));
}

TEST_CASE("sampler input validation") {
    const auto row = bell_table(0.0)[0];
    CHECK_THROWS_AS(sample_outcomes(row, DetectorModel::ideal(), 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_outcomes(row, DetectorModel{{1.2, 1.0}}, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_outcomes(row, DetectorModel{{1.0, 1.0}, -0.1}, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_outcomes(row, DetectorModel::ideal(3), 10, 1), std::invalid_argument);
    EventDistribution too_much{{{{0, 0}}, 0.7}, {{{1, 0}}, 0.7}};
    CHECK_THROWS_AS(observed_probabilities(too_much, DetectorModel::ideal(), coincidence_bin, kOutcomeCount),
                    std::invalid_argument);
    EventDistribution off_grid{{{{0, 5}}, 0.1}};
    CHECK_THROWS_AS(observed_probabilities(off_grid, DetectorModel::ideal(), coincidence_bin, kOutcomeCount),
                    std::invalid_argument);
}

TEST_CASE("observed_probabilities against hand-computed detector effects") {
    SUBCASE("ideal detectors pass the distribution through") {
        const auto row = bell_table(0.0)[2];
        const auto p = observed_probabilities(events_from_outcomes(row), DetectorModel::ideal(), coincidence_bin,
                                              kOutcomeCount);
        for (std::size_t i = 0; i < kOutcomeCount; ++i) CHECK(p[i] == doctest::Approx(row[i]).epsilon(1e-14));
    }
    SUBCASE("efficiency scales a coincidence by eta1 eta2") {
        EventDistribution ev{{{{0, 1}, {1, 1}}, 0.4}};
        DetectorModel det{{0.3, 0.7}};
        const auto p = observed_probabilities(ev, det, coincidence_bin, kOutcomeCount);
        CHECK(p[idx(CoincidenceOutcome::cross(1, 1))] == doctest::Approx(0.4 * 0.3 * 0.7).epsilon(1e-14));
    }
    SUBCASE("two dark clicks on an empty shot") {
        const double d = 0.02;
        DetectorModel det{{1.0, 1.0}, d};
        const auto p = observed_probabilities({}, det, coincidence_bin, kOutcomeCount);
        const double pair = d * d * std::pow(1 - d, 4);
        CHECK(p[idx(CoincidenceOutcome::cross(0, 2))] == doctest::Approx(pair).epsilon(1e-13));
        CHECK(p[idx(CoincidenceOutcome::same(Detector::D2, 0, 1))] == doctest::Approx(pair).epsilon(1e-13));
        double total = 0;
        for (double x : p) total += x;
        CHECK(total == doctest::Approx(15 * pair).epsilon(1e-13));  // C(6,2) gate pairs
    }
    SUBCASE("dead time keeps only the first click per detector") {
        EventDistribution ev{{{{0, 0}, {0, 2}}, 1.0}};
        auto p = observed_probabilities(ev, DetectorModel::ideal(), coincidence_bin, kOutcomeCount);
        CHECK(p[idx(CoincidenceOutcome::same(Detector::D1, 0, 2))] == 1.0);
        DetectorModel dead{{1.0, 1.0}, 0.0, AnalyzerMode::DeadTimeLimited};
        p = observed_probabilities(ev, dead, coincidence_bin, kOutcomeCount);
        for (double x : p) CHECK(x == 0.0);
    }
    SUBCASE("a dark count cannot add a second click to an occupied gate") {
        EventDistribution ev{{{{0, 1}}, 1.0}};
        DetectorModel det{{1.0, 1.0}, 0.1};
        const auto p = observed_probabilities(ev, det, coincidence_bin, kOutcomeCount);
        CHECK(p[idx(CoincidenceOutcome::same(Detector::D1, 1, 1))] == 0.0);
        // exactly one dark click among the five other gates
        double total = 0;
        for (double x : p) total += x;
        CHECK(total == doctest::Approx(5 * 0.1 * std::pow(0.9, 4)).epsilon(1e-13));
    }
}

TEST_CASE("sampling agrees with the exact expectation under noise") {
    const auto row = bell_table(0.0)[0];
    DetectorModel det{{0.5, 0.9}, 0.05, AnalyzerMode::DeadTimeLimited};
    const std::uint64_t shots = 400'000;
    const auto events = events_from_outcomes(row);
    const auto exact = observed_probabilities(events, det, coincidence_bin, kOutcomeCount);
    const auto counts = sample_counts(events, det, shots, 99, coincidence_bin, kOutcomeCount);
    for (std::size_t i = 0; i < kOutcomeCount; ++i) {
        const double sigma = std::sqrt(shots * exact[i] * (1 - exact[i]));
        CHECK(std::abs(static_cast<double>(counts[i]) - shots * exact[i]) <= 5 * sigma + 1e-9);
    }
}

TEST_CASE("estimate_visibility") {
    const auto x = grid(16);
    auto fringe = [&](double amp, double vis, double phase, double background) {
        std::vector<double> y;
        for (double xi : x) y.push_back(amp * (1 + vis * std::cos(xi + phase)) + background);
        return y;
    };
    SUBCASE("recovers visibility and phase") {
        const auto f = estimate_visibility(x, fringe(3.0, 0.5, 0.8, 0.0));
        CHECK(f.visibility == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(f.phase_offset == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(f.baseline == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(f.rms_residual < 1e-12);
        CHECK_FALSE(f.flat);
        const auto g = estimate_visibility(x, fringe(1.0, 1.0, pi, 0.0));
        CHECK(g.visibility == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(std::abs(g.phase_offset) - pi) < 1e-12);
    }
    SUBCASE("uniform background b lowers V to 1/(1+b); subtracting it restores 1") {
        for (double b : {0.1, 0.5, 2.0}) {
            const auto y = fringe(1.0, 1.0, 0.0, b);
            CHECK(estimate_visibility(x, y).visibility == doctest::Approx(1 / (1 + b)).epsilon(1e-12));
            const auto net = net_visibility(x, y, b);
            CHECK(net.net.visibility == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(net.clamped_points == 0);
        }
    }
    SUBCASE("background equal to the mean signal halves the raw visibility") {
        const auto y = fringe(2.0, 0.6, 0.0, 2.0);
        const auto net = net_visibility(x, y, 2.0);
        CHECK(net.net.visibility == doctest::Approx(2 * net.raw.visibility).epsilon(1e-12));
    }
    SUBCASE("flat, clamped and invalid inputs") {
        const auto flat = estimate_visibility(x, fringe(1.0, 0.0, 0.0, 0.0));
        CHECK(flat.flat);
        CHECK(flat.visibility == 0.0);
        const auto over = net_visibility(x, fringe(1.0, 0.5, 0.0, 0.0), 0.9);
        CHECK(over.net.clamped);
        CHECK(over.net.visibility == 1.0);
        CHECK(over.clamped_points > 0);
        const std::vector<double> few{0, 1, 2, 3};
        CHECK_THROWS_AS(estimate_visibility(few, few), std::invalid_argument);
        const std::vector<double> narrow{0, 0.1, 0.2, 0.3, 0.4, 0.5};
        CHECK_THROWS_AS(estimate_visibility(narrow, narrow), std::invalid_argument);
        CHECK_THROWS_AS(net_visibility(x, fringe(1, 1, 0, 0), std::vector<double>{1.0}), std::invalid_argument);
    }
}

TEST_CASE("raw visibility decreases monotonically with the dark-count rate") {
    const auto x = grid(12);
    double previous = 2.0;
    for (double d : {0.0, 1e-3, 1e-2, 5e-2}) {
        DetectorModel det{{0.8, 0.8}, d};
        std::vector<double> y;
        for (double xi : x) {
            EventDistribution ev{{{{0, 1}, {1, 1}}, (1 + std::cos(xi)) / 8}};
            y.push_back(observed_probabilities(ev, det, coincidence_bin, kOutcomeCount)[idx(CoincidenceOutcome::cross(1, 1))]);
        }
        const double v = estimate_visibility(x, y).visibility;
        CHECK(v < previous);
        previous = v;
    }
}
