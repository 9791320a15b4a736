#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "bellbin/bell_analysis.hpp"
#include "support/two_photon_oracle.hpp"

using namespace bellbin;

namespace {

constexpr double pi = std::numbers::pi;
const std::array<double, 5> kDeltas{0.0, 0.4, pi / 3, 1.9, 2 * pi - 0.1};

std::size_t row(BellKind k) { return static_cast<std::size_t>(k); }

}  // namespace

TEST_CASE("outcome enumeration") {
    const auto outs = all_outcomes();
    CHECK(outs.size() == 21);
    int same_d1 = 0, same_d2 = 0, cross = 0;
    for (std::size_t i = 0; i < outs.size(); ++i) {
        CHECK(outcome_index(outs[i]) == i);
        CHECK(parse_outcome(outcome_label(outs[i])) == outs[i]);
        if (!outs[i].same_detector()) ++cross;
        else if (outs[i].first.detector == Detector::D1) ++same_d1;
        else ++same_d2;
        for (std::size_t j = i + 1; j < outs.size(); ++j) CHECK(outs[i] != outs[j]);
    }
    CHECK(same_d1 == 6);
    CHECK(same_d2 == 6);
    CHECK(cross == 9);
    CHECK(outcome_label(CoincidenceOutcome::cross(1, 0)) == "X:10");
    CHECK(CoincidenceOutcome::same(Detector::D1, 2, 0) == CoincidenceOutcome::same(Detector::D1, 0, 2));
    CHECK_FALSE(parse_outcome("D3:00").has_value());
}

TEST_CASE("bell_state") {
    const double s = std::numbers::sqrt2 / 2;
    auto phi = bell_state(BellKind::PhiPlus, 0.0);
    CHECK(std::abs(phi.amplitude(canonical({{Port::a, 0}, {Port::b, 0}})) - s) < 1e-15);
    CHECK(std::abs(phi.amplitude(canonical({{Port::a, 1}, {Port::b, 1}})) - s) < 1e-15);

    CHECK(max_amplitude_difference(bell_state(BellKind::PhiPlus, pi / 2), bell_state(BellKind::PhiMinus, 0.0)) <
          1e-15);

    for (double delta : kDeltas) {
        for (auto k1 : kAllBellKinds) {
            auto s1 = bell_state(k1, delta);
            CHECK(std::abs(s1.norm_squared() - 1.0) < 1e-12);
            for (auto k2 : kAllBellKinds) {
                if (k1 == k2) continue;
                CHECK(std::abs(inner_product(s1, bell_state(k2, delta))) < 1e-12);
            }
        }
    }
}

TEST_CASE("outcome_distribution agrees with the reference table and the first-quantized oracle") {
    const auto table = bell_table(0.0);
    CHECK(max_table_deviation(table) < 1e-12);

    const auto& psi_p = table[row(BellKind::PsiPlus)];
    int nonzero = 0;
    for (double p : psi_p) {
        if (p > 1e-12) {
            ++nonzero;
            CHECK(p == doctest::Approx(0.125).epsilon(1e-12));
        }
    }
    CHECK(nonzero == 8);

    const auto& phi_m = table[row(BellKind::PhiMinus)];
    CHECK(phi_m[outcome_index(CoincidenceOutcome::same(Detector::D1, 0, 0))] == doctest::Approx(1.0 / 16));
    CHECK(phi_m[outcome_index(CoincidenceOutcome::same(Detector::D2, 1, 1))] == doctest::Approx(0.25));
    CHECK(phi_m[outcome_index(CoincidenceOutcome::cross(2, 2))] == doctest::Approx(0.125));

    const auto& psi_m = table[row(BellKind::PsiMinus)];
    CHECK(psi_m[outcome_index(CoincidenceOutcome::cross(0, 2))] == doctest::Approx(0.125));
    CHECK(psi_m[outcome_index(CoincidenceOutcome::cross(2, 0))] == doctest::Approx(0.125));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2 * pi);
    for (int trial = 0; trial < 20; ++trial) {
        const double delta = u(rng);
        for (auto k : kAllBellKinds) {
            const auto fock = outcome_distribution(bell_state(k, delta), delta);
            const auto oracle = testing::oracle_distribution(testing::bell_coefficients(k, delta), delta);
            for (std::size_t i = 0; i < kOutcomeCount; ++i) CHECK(std::abs(fock[i] - oracle[i]) < 1e-12);
        }
    }
}

TEST_CASE("outcome_distribution rejects inputs that are not one photon on each of a, b") {
    CHECK_THROWS_AS(outcome_distribution(make_state({{{Port::a, 0}, 1}}), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(outcome_distribution(make_state({{{Port::a, 0}, 1}, {{Port::bob, 0}, 1}}), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(outcome_distribution(make_state({{{Port::a, 2}, 1}, {{Port::b, 0}, 1}}), 0.0),
                    std::invalid_argument);
}

TEST_CASE("properties: delta covariance, row normalization, conclusive soundness") {
    const auto ref = bell_table(0.0);
    const auto ideal = derive_classification(ref, AnalyzerMode::Ideal);
    for (double delta : kDeltas) {
        const auto t = bell_table(delta);
        for (std::size_t k = 0; k < 4; ++k) {
            double total = 0.0;
            for (std::size_t i = 0; i < kOutcomeCount; ++i) {
                CHECK(std::abs(t[k][i] - ref[k][i]) < 1e-12);
                total += t[k][i];
            }
            CHECK(std::abs(total - 1.0) < 1e-12);
        }
        for (std::size_t i = 0; i < kOutcomeCount; ++i) {
            auto kind = conclusive_kind(ideal[i]);
            if (!kind) continue;
            for (auto other : kAllBellKinds) {
                if (other != *kind) CHECK(t[row(other)][i] < 1e-12);
            }
        }
    }
}

TEST_CASE("classify") {
    using enum AnalyzerMode;
    CHECK(classify(CoincidenceOutcome::cross(1, 1), Ideal) == Classification::ConclusivePhiPlus);
    CHECK(classify(CoincidenceOutcome::same(Detector::D1, 0, 2), Ideal) == Classification::ConclusivePsiMinus);
    CHECK(classify(CoincidenceOutcome::same(Detector::D1, 0, 2), DeadTimeLimited) == Classification::Inconclusive);
    CHECK(classify(CoincidenceOutcome::same(Detector::D1, 0, 0), Ideal) == Classification::Inconclusive);
    CHECK(classify(CoincidenceOutcome::same(Detector::D1, 0, 0), DeadTimeLimited) == Classification::Inconclusive);

    // Conclusive entries are exactly the bold cells of the reference table:
    // a nonzero entry that is the only nonzero one in its column.
    const auto& ref = reference_table();
    for (std::size_t i = 0; i < kOutcomeCount; ++i) {
        int nonzero = 0;
        std::size_t which = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            if (ref[k][i].num != 0) {
                ++nonzero;
                which = k;
            }
        }
        const auto c = classify(all_outcomes()[i], Ideal);
        if (nonzero == 1) {
            CHECK(conclusive_kind(c) == kAllBellKinds[which]);
        } else {
            CHECK(c == Classification::Inconclusive);
        }
        if (all_outcomes()[i].same_detector()) CHECK(classify(all_outcomes()[i], DeadTimeLimited) == Classification::Inconclusive);
    }
}

TEST_CASE("success rates") {
    using enum AnalyzerMode;
    for (double delta : {0.0, 0.4, 1.9}) {
        CHECK(success_rate(BellKind::PsiPlus, delta, Ideal) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(success_rate(BellKind::PsiMinus, delta, Ideal) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(success_rate(BellKind::PhiPlus, delta, Ideal) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(success_rate(BellKind::PhiMinus, delta, Ideal) == 0.0);
        CHECK(average_success_rate(delta, Ideal) == doctest::Approx(0.5).epsilon(1e-12));

        CHECK(success_rate(BellKind::PsiPlus, delta, DeadTimeLimited) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(success_rate(BellKind::PsiMinus, delta, DeadTimeLimited) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(success_rate(BellKind::PhiPlus, delta, DeadTimeLimited) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(average_success_rate(delta, DeadTimeLimited) == doctest::Approx(5.0 / 16).epsilon(1e-12));
    }
    CHECK(baseline_average_success_rate(DeadTimeLimited) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(baseline_success_rate(BellKind::PsiMinus, DeadTimeLimited) == doctest::Approx(1.0).epsilon(1e-12));
    // With photon-number and fast-timing resolution the lone beamsplitter also
    // separates psi+ (both photons on one detector, different bins).
    CHECK(baseline_average_success_rate(Ideal) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("correction unitaries") {
    CHECK(correction_unitary(Classification::ConclusivePhiPlus, 0.0).isApprox(CorrectionUnitary::Identity(), 1e-15));
    for (double delta : {0.0, 0.7, 2.2}) {
        for (auto c : {Classification::ConclusivePhiPlus, Classification::ConclusivePsiPlus,
                       Classification::ConclusivePsiMinus}) {
            const auto u = correction_unitary(c, delta);
            CHECK((u.adjoint() * u - CorrectionUnitary::Identity()).norm() < 1e-12);
        }
    }
    CHECK_THROWS_AS(correction_unitary(Classification::Inconclusive, 0.3), std::invalid_argument);
}
