#include "bellbin/bell_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "bellbin/optics.hpp"

namespace bellbin {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

constexpr std::array<CoincidenceOutcome, kOutcomeCount> kOutcomes = [] {
    using D = Detector;
    auto same = [](D d, int t1, int t2) { return CoincidenceOutcome{{d, t1}, {d, t2}}; };
    auto cross = [](int t1, int t2) { return CoincidenceOutcome{{D::D1, t1}, {D::D2, t2}}; };
    return std::array<CoincidenceOutcome, kOutcomeCount>{
        same(D::D1, 0, 0), same(D::D2, 0, 0), same(D::D1, 1, 1), same(D::D2, 1, 1), same(D::D1, 2, 2),
        same(D::D2, 2, 2), same(D::D1, 0, 1), same(D::D2, 0, 1), same(D::D1, 0, 2), same(D::D2, 0, 2),
        same(D::D1, 1, 2), same(D::D2, 1, 2), cross(0, 0),        cross(2, 2),        cross(1, 1),
        cross(1, 0),        cross(0, 1),        cross(1, 2),        cross(2, 1),        cross(0, 2),
        cross(2, 0),
    };
}();

void require_ab_pair(const PhotonicState& input) {
    for (const auto& [occ, amp] : input.terms()) {
        if (occ.size() != 2) {
            throw std::invalid_argument(fmt::format("analyzer input must hold exactly two photons, got {}", occ.size()));
        }
        for (const auto& m : occ) {
            if ((m.port != Port::a && m.port != Port::b) || m.time_bin > 1) {
                throw std::invalid_argument("analyzer input photons must sit on ports a, b in bins 0 or 1");
            }
        }
    }
}

OutcomeDistribution bin_outcomes(const PhotonicState& out, const DetectorPorts& ports) {
    OutcomeDistribution dist{};
    for (const auto& [occ, p] : measure_number(out)) {
        auto hits = detections_on(occ, ports);
        if (hits.size() != 2) continue;
        dist[outcome_index(CoincidenceOutcome::make(hits[0], hits[1]))] += p;
    }
    return dist;
}

Fraction fr(int n, int d) { return {n, d}; }

}  // namespace

CoincidenceOutcome CoincidenceOutcome::make(Detection x, Detection y) {
    if (y < x) std::swap(x, y);
    return {x, y};
}

CoincidenceOutcome CoincidenceOutcome::same(Detector d, int t1, int t2) { return make({d, t1}, {d, t2}); }

CoincidenceOutcome CoincidenceOutcome::cross(int t_d1, int t_d2) {
    return make({Detector::D1, t_d1}, {Detector::D2, t_d2});
}

std::span<const CoincidenceOutcome, kOutcomeCount> all_outcomes() { return kOutcomes; }

std::size_t outcome_index(const CoincidenceOutcome& o) {
    auto it = std::find(kOutcomes.begin(), kOutcomes.end(), o);
    if (it == kOutcomes.end()) {
        throw std::out_of_range(fmt::format("detection times ({}, {}) are outside 0..2", o.first.time, o.second.time));
    }
    return static_cast<std::size_t>(it - kOutcomes.begin());
}

std::string outcome_label(const CoincidenceOutcome& o) {
    if (o.same_detector()) {
        return fmt::format("{}:{}{}", o.first.detector == Detector::D1 ? "D1" : "D2", o.first.time, o.second.time);
    }
    return fmt::format("X:{}{}", o.first.time, o.second.time);
}

std::optional<CoincidenceOutcome> parse_outcome(std::string_view label) {
    for (const auto& o : kOutcomes) {
        if (outcome_label(o) == label) return o;
    }
    return std::nullopt;
}

std::string_view kind_name(BellKind k) {
    switch (k) {
        case BellKind::PhiPlus: return "phi+";
        case BellKind::PhiMinus: return "phi-";
        case BellKind::PsiPlus: return "psi+";
        case BellKind::PsiMinus: return "psi-";
    }
    return "?";
}

std::string_view classification_name(Classification c) {
    switch (c) {
        case Classification::ConclusivePsiPlus: return "psi+";
        case Classification::ConclusivePsiMinus: return "psi-";
        case Classification::ConclusivePhiPlus: return "phi+";
        case Classification::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::optional<BellKind> conclusive_kind(Classification c) {
    switch (c) {
        case Classification::ConclusivePsiPlus: return BellKind::PsiPlus;
        case Classification::ConclusivePsiMinus: return BellKind::PsiMinus;
        case Classification::ConclusivePhiPlus: return BellKind::PhiPlus;
        case Classification::Inconclusive: return std::nullopt;
    }
    return std::nullopt;
}

std::vector<Detection> detections_on(const Occupation& occ, const DetectorPorts& ports) {
    std::vector<Detection> hits;
    for (const auto& m : occ) {
        if (m.port == ports.d1) hits.push_back({Detector::D1, m.time_bin});
        else if (m.port == ports.d2) hits.push_back({Detector::D2, m.time_bin});
    }
    return hits;
}

PhotonicState bell_state(BellKind kind, double delta, FockLimits limits) {
    auto pair = [&](int ta, int tb) { return make_state({{{Port::a, ta}, 1}, {{Port::b, tb}, 1}}, limits); };
    const Amplitude rot1 = std::polar(1.0, delta);
    const Amplitude rot2 = std::polar(1.0, 2.0 * delta);
    switch (kind) {
        case BellKind::PhiPlus:
            return superpose({{kInvSqrt2, pair(0, 0)}, {kInvSqrt2 * rot2, pair(1, 1)}});
        case BellKind::PhiMinus:
            return superpose({{kInvSqrt2, pair(0, 0)}, {-kInvSqrt2 * rot2, pair(1, 1)}});
        case BellKind::PsiPlus:
            return superpose({{kInvSqrt2 * rot1, pair(0, 1)}, {kInvSqrt2 * rot1, pair(1, 0)}});
        case BellKind::PsiMinus:
            return superpose({{kInvSqrt2 * rot1, pair(0, 1)}, {-kInvSqrt2 * rot1, pair(1, 0)}});
    }
    throw std::invalid_argument("unknown Bell kind");
}

OutcomeDistribution outcome_distribution(const PhotonicState& input, double delta, const DetectorPorts& ports) {
    require_ab_pair(input);
    return bin_outcomes(apply_transform(input, bsa_interferometer(delta, input.limits().window)), ports);
}

BellTable bell_table(double delta, const DetectorPorts& ports) {
    BellTable t{};
    for (std::size_t k = 0; k < 4; ++k) t[k] = outcome_distribution(bell_state(kAllBellKinds[k], delta), delta, ports);
    return t;
}

ClassificationTable derive_classification(const BellTable& table, AnalyzerMode mode, double tol) {
    ClassificationTable out{};
    for (std::size_t i = 0; i < kOutcomeCount; ++i) {
        out[i] = Classification::Inconclusive;
        if (mode == AnalyzerMode::DeadTimeLimited && kOutcomes[i].same_detector()) continue;
        std::optional<BellKind> only;
        int seen = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            if (table[k][i] > tol) {
                ++seen;
                only = kAllBellKinds[k];
            }
        }
        if (seen != 1) continue;
        switch (*only) {
            case BellKind::PsiPlus: out[i] = Classification::ConclusivePsiPlus; break;
            case BellKind::PsiMinus: out[i] = Classification::ConclusivePsiMinus; break;
            case BellKind::PhiPlus: out[i] = Classification::ConclusivePhiPlus; break;
            case BellKind::PhiMinus:
                throw std::logic_error("analyzer singles out phi-, which linear optics here cannot do");
        }
    }
    return out;
}

Classification classify(const CoincidenceOutcome& outcome, AnalyzerMode mode) {
    static const BellTable table = bell_table(0.0);
    static const ClassificationTable ideal = derive_classification(table, AnalyzerMode::Ideal);
    static const ClassificationTable dead = derive_classification(table, AnalyzerMode::DeadTimeLimited);
    const auto i = outcome_index(outcome);
    return mode == AnalyzerMode::Ideal ? ideal[i] : dead[i];
}

double success_rate(BellKind kind, double delta, AnalyzerMode mode) {
    const auto dist = outcome_distribution(bell_state(kind, delta), delta);
    double p = 0.0;
    for (std::size_t i = 0; i < kOutcomeCount; ++i) {
        if (conclusive_kind(classify(kOutcomes[i], mode)) == kind) p += dist[i];
    }
    return p;
}

double average_success_rate(double delta, AnalyzerMode mode) {
    double acc = 0.0;
    for (auto k : kAllBellKinds) acc += success_rate(k, delta, mode);
    return acc / 4.0;
}

OutcomeDistribution baseline_outcome_distribution(const PhotonicState& input, const DetectorPorts& ports) {
    require_ab_pair(input);
    const auto bs = beamsplitter(Port::a, Port::b, Port::e, Port::f, 0.5, input.limits().window);
    return bin_outcomes(apply_transform(input, bs), ports);
}

double baseline_success_rate(BellKind kind, AnalyzerMode mode) {
    static const BellTable table = [] {
        BellTable t{};
        for (std::size_t k = 0; k < 4; ++k) t[k] = baseline_outcome_distribution(bell_state(kAllBellKinds[k], 0.0));
        return t;
    }();
    const auto classes = derive_classification(table, mode);
    const auto row = static_cast<std::size_t>(std::find(kAllBellKinds.begin(), kAllBellKinds.end(), kind) -
                                              kAllBellKinds.begin());
    double p = 0.0;
    for (std::size_t i = 0; i < kOutcomeCount; ++i) {
        if (conclusive_kind(classes[i]) == kind) p += table[row][i];
    }
    return p;
}

double baseline_average_success_rate(AnalyzerMode mode) {
    double acc = 0.0;
    for (auto k : kAllBellKinds) acc += baseline_success_rate(k, mode);
    return acc / 4.0;
}

const ReferenceTable& reference_table() {
    static const ReferenceTable table = [] {
        ReferenceTable t{};
        for (auto& row : t) row.fill(fr(0, 1));
        // phi+
        for (int i : {0, 1, 4, 5}) t[0][i] = fr(1, 16);
        for (int i : {12, 13}) t[0][i] = fr(1, 8);
        t[0][14] = fr(1, 2);
        // phi-
        for (int i : {0, 1, 4, 5}) t[1][i] = fr(1, 16);
        for (int i : {2, 3}) t[1][i] = fr(1, 4);
        for (int i : {12, 13}) t[1][i] = fr(1, 8);
        // psi+
        for (int i : {6, 7, 10, 11, 15, 16, 17, 18}) t[2][i] = fr(1, 8);
        // psi-
        for (int i : {2, 3}) t[3][i] = fr(1, 4);
        for (int i : {8, 9, 19, 20}) t[3][i] = fr(1, 8);
        return t;
    }();
    return table;
}

double max_table_deviation(const BellTable& computed) {
    const auto& ref = reference_table();
    double worst = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        for (std::size_t i = 0; i < kOutcomeCount; ++i) {
            worst = std::max(worst, std::abs(computed[k][i] - ref[k][i].value()));
        }
    }
    return worst;
}

CorrectionUnitary pauli_x() {
    CorrectionUnitary m;
    m << 0, 1, 1, 0;
    return m;
}

CorrectionUnitary pauli_z() {
    CorrectionUnitary m;
    m << 1, 0, 0, -1;
    return m;
}

CorrectionUnitary phase_correction(double delta) {
    CorrectionUnitary m = CorrectionUnitary::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = std::polar(1.0, 2.0 * delta);
    return m;
}

CorrectionUnitary correction_for_kind(BellKind kind, double delta) {
    switch (kind) {
        case BellKind::PhiPlus: return phase_correction(delta);
        case BellKind::PhiMinus: return pauli_z() * phase_correction(delta);
        case BellKind::PsiPlus: return pauli_x();
        case BellKind::PsiMinus: return pauli_z() * pauli_x();
    }
    throw std::invalid_argument("unknown Bell kind");
}

CorrectionUnitary correction_unitary(Classification c, double delta) {
    auto kind = conclusive_kind(c);
    if (!kind) throw std::invalid_argument("no correction exists for an inconclusive result");
    return correction_for_kind(*kind, delta);
}

}  // namespace bellbin
