#include "bellbin/teleportation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>
#include <omp.h>

#include "bellbin/optics.hpp"
#include "bellbin/pair_sources.hpp"
#include "bellbin/rng.hpp"

namespace bellbin {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;
constexpr double kPi = std::numbers::pi;

double wrap_pm_pi(double x) {
    x = std::fmod(x, 2 * kPi);
    if (x <= -kPi) x += 2 * kPi;
    if (x > kPi) x -= 2 * kPi;
    return x;
}

int class_index(Classification c) {
    switch (c) {
        case Classification::ConclusivePsiPlus: return 0;
        case Classification::ConclusivePsiMinus: return 1;
        case Classification::ConclusivePhiPlus: return 2;
        case Classification::Inconclusive: return -1;
    }
    return -1;
}

ExperimentPhases at(ScanAxis axis, ExperimentPhases phases, double x) {
    (axis == ScanAxis::Alpha ? phases.alpha : phases.beta) = x;
    return phases;
}

void check_grid(std::span<const double> grid) {
    if (grid.size() < 5) throw std::invalid_argument("fringe grid needs at least 5 points");
}

ScanResult finish_scan(ScanAxis axis, std::span<const double> grid, const ExperimentPhases& fixed,
                       AnalyzerMode mode, const std::vector<std::array<double, 3>>& rates) {
    ScanResult out;
    out.axis = axis;
    out.fixed = fixed;
    out.grid.assign(grid.begin(), grid.end());
    out.calibration = calibration_offset(axis, mode);
    for (std::size_t c = 0; c < 3; ++c) {
        auto& cls = out.classes[c];
        for (const auto& r : rates) cls.rates.push_back(r[c]);
        cls.fit = estimate_visibility(grid, cls.rates);
        cls.offset = wrap_pm_pi(cls.fit.phase_offset - out.calibration);
    }
    return out;
}

}  // namespace

QubitState alice_qubit(double alpha) { return QubitState(kInvSqrt2, std::polar(kInvSqrt2, alpha)); }

PhotonicState build_joint_state(const ExperimentPhases& p) {
    const auto q = alice_qubit(p.alpha);
    TermMap terms;
    for (int ta = 0; ta < 2; ++ta) {
        for (int tb = 0; tb < 2; ++tb) {
            const Amplitude pair = tb == 0 ? Amplitude(kInvSqrt2) : std::polar(kInvSqrt2, p.gamma);
            terms[canonical({{Port::a, ta}, {Port::b, tb}, {Port::bob, tb}})] = q(ta) * pair;
        }
    }
    return PhotonicState::from_terms(std::move(terms), {}, true);
}

ConditionalState conditional_bob_state(const ExperimentPhases& phases, const CoincidenceOutcome& outcome) {
    const auto out = apply_transform(build_joint_state(phases), bsa_interferometer(phases.delta));
    QubitState bob = QubitState::Zero();
    for (const auto& [occ, amp] : out.terms()) {
        const auto hits = detections_on(occ, {});
        if (hits.size() != 2 || CoincidenceOutcome::make(hits[0], hits[1]) != outcome) continue;
        for (const auto& m : occ) {
            if (m.port == Port::bob) bob(m.time_bin) += amp;
        }
    }
    const double p = bob.squaredNorm();
    if (p < 1e-24) throw std::domain_error(fmt::format("outcome {} cannot occur", outcome_label(outcome)));
    return {bob / std::sqrt(p), p};
}

QubitState to_reference_frame(const QubitState& state, double gamma) {
    return QubitState(state(0), std::polar(1.0, -gamma) * state(1));
}

QubitState apply_correction(const QubitState& state, Classification c, double delta) {
    return correction_unitary(c, delta) * state;
}

QubitState teleported_state(const ExperimentPhases& phases, const CoincidenceOutcome& outcome, AnalyzerMode mode) {
    const auto c = classify(outcome, mode);
    if (c == Classification::Inconclusive) {
        throw std::invalid_argument(fmt::format("outcome {} is inconclusive", outcome_label(outcome)));
    }
    const auto bob = conditional_bob_state(phases, outcome);
    return apply_correction(to_reference_frame(bob.state, phases.gamma), c, phases.delta);
}

double fidelity(const QubitState& a, const QubitState& b) { return std::norm(a.dot(b)); }

double visibility_to_fidelity(double visibility) {
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
        throw std::invalid_argument(fmt::format("visibility {} outside [0, 1]", visibility));
    }
    return (1.0 + visibility) / 2.0;
}

bool beats_cloning_limit(double f) { return f > kCloningLimit; }

std::array<double, 3> fringe_rates(const ExperimentPhases& phases, AnalyzerMode mode) {
    const auto ports = bob_analyzer_ports();
    const auto out = apply_transform(apply_transform(build_joint_state(phases), bsa_interferometer(phases.delta)),
                                     qubit_analyzer(ports, phases.beta));
    std::array<double, 3> rates{};
    for (const auto& [occ, p] : measure_number(out)) {
        if (std::none_of(occ.begin(), occ.end(), [&](const Mode& m) { return m.port == ports.out2 && m.time_bin == 1; })) {
            continue;
        }
        const auto hits = detections_on(occ, {});
        if (hits.size() != 2) continue;
        const int c = class_index(classify(CoincidenceOutcome::make(hits[0], hits[1]), mode));
        if (c >= 0) rates[static_cast<std::size_t>(c)] += p;
    }
    return rates;
}

std::vector<double> phase_grid(int points) {
    if (points < 1) throw std::invalid_argument("phase grid needs at least one point");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = 2 * kPi * i / points;
    return grid;
}

double calibration_offset(ScanAxis axis, AnalyzerMode mode) {
    const auto grid = phase_grid(8);
    std::vector<double> psi_plus;
    for (double x : grid) psi_plus.push_back(fringe_rates(at(axis, {}, x), mode)[0]);
    return estimate_visibility(grid, psi_plus).phase_offset;
}

ScanResult fringe_scan_serial(ScanAxis axis, std::span<const double> grid, const ExperimentPhases& fixed,
                              AnalyzerMode mode) {
    check_grid(grid);
    std::vector<std::array<double, 3>> rates;
    for (double x : grid) rates.push_back(fringe_rates(at(axis, fixed, x), mode));
    return finish_scan(axis, grid, fixed, mode, rates);
}

ScanResult fringe_scan(ScanAxis axis, std::span<const double> grid, const ExperimentPhases& fixed,
                       AnalyzerMode mode, int workers) {
    check_grid(grid);
    std::vector<std::array<double, 3>> rates(grid.size());
    const int threads = workers > 0 ? workers : omp_get_max_threads();
    const auto n = static_cast<std::int64_t>(grid.size());
#pragma omp parallel for num_threads(threads) schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        rates[k] = fringe_rates(at(axis, fixed, grid[k]), mode);
    }
    return finish_scan(axis, grid, fixed, mode, rates);
}

void NoiseModel::validate() const {
    if (detectors.detectors() != 3) throw std::invalid_argument("noise model needs three detectors (D1, D2, D3)");
    detectors.validate();
    if (detectors.time_bins != 3) throw std::invalid_argument("noise model needs three time bins per detector");
    if (chi_entangled == 0.0) throw std::domain_error("entangled source must emit (chi > 0)");
    alice_source(chi_alice, 0.0, overlap, order).validate();
    entangled_source(chi_entangled, 0.0, order).validate();
}

EventDistribution noisy_events(const ExperimentPhases& phases, const NoiseModel& noise) {
    noise.validate();
    const FockLimits limits{};
    const auto ports = bob_analyzer_ports();
    const auto joint =
        tensor(spdc_state(alice_source(noise.chi_alice, phases.alpha, noise.overlap, noise.order), limits),
               spdc_state(entangled_source(noise.chi_entangled, phases.gamma, noise.order), limits))
            .normalize();
    const auto out = apply_transform(apply_transform(joint, bsa_interferometer(phases.delta, limits.window)),
                                     qubit_analyzer(ports, phases.beta, limits.window));
    std::map<std::vector<PhotonHit>, double> merged;
    double heralded = 0.0;
    for (const auto& [occ, p] : measure_number(out)) {
        bool emitted = false;
        std::vector<PhotonHit> hits;
        for (const auto& m : occ) {
            if (m.port == ports.out1 || m.port == ports.out2) emitted = true;
            if (m.port == Port::e) hits.push_back({0, m.time_bin});
            if (m.port == Port::f) hits.push_back({1, m.time_bin});
            if (m.port == ports.out2) hits.push_back({2, m.time_bin});
        }
        if (!emitted) continue;
        heralded += p;
        std::sort(hits.begin(), hits.end());
        merged[hits] += p;
    }
    EventDistribution events;
    for (auto& [hits, p] : merged) events.push_back({hits, p / heralded});
    return events;
}

int teleportation_bin(std::span<const PhotonHit> clicks, AnalyzerMode mode) {
    std::vector<Detection> bsa;
    bool central = false;
    for (const auto& c : clicks) {
        if (c.detector == 2) central = central || c.time == 1;
        else bsa.push_back({c.detector == 0 ? Detector::D1 : Detector::D2, c.time});
    }
    if (!central || bsa.size() != 2) return -1;
    return class_index(classify(CoincidenceOutcome::make(bsa[0], bsa[1]), mode));
}

NoisyFringes simulate_noisy_fringes(ScanAxis axis, std::span<const double> grid, const ExperimentPhases& fixed,
                                    const NoiseModel& noise, std::uint64_t shots, std::uint64_t seed, bool exact,
                                    int workers) {
    check_grid(grid);
    noise.validate();
    if (shots == 0) throw std::invalid_argument("shots must be at least 1");
    const AnalyzerMode mode = noise.detectors.mode;
    const ClickBinner binner = [mode](std::span<const PhotonHit> clicks) { return teleportation_bin(clicks, mode); };
    DetectorModel quiet = noise.detectors;
    quiet.dark_count = 0.0;

    NoisyFringes out;
    out.axis = axis;
    out.fixed = fixed;
    out.grid.assign(grid.begin(), grid.end());
    out.exact = exact;
    out.shots = shots;
    out.seed = seed;
    const double n = static_cast<double>(shots);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto events = noisy_events(at(axis, fixed, grid[i]), noise);
        const auto p = observed_probabilities(events, noise.detectors, binner, 3);
        const auto p_quiet = observed_probabilities(events, quiet, binner, 3);
        std::array<double, 3> counts{};
        if (exact) {
            for (std::size_t c = 0; c < 3; ++c) counts[c] = n * p[c];
        } else {
            const auto sampled =
                sample_counts(events, noise.detectors, shots, ShotRng(seed, i).next(), binner, 3, workers);
            for (std::size_t c = 0; c < 3; ++c) counts[c] = static_cast<double>(sampled[c]);
        }
        for (std::size_t c = 0; c < 3; ++c) {
            out.counts[c].push_back(counts[c]);
            out.accidentals[c].push_back(std::max(0.0, n * (p[c] - p_quiet[c])));
        }
    }
    for (std::size_t c = 0; c < 3; ++c) {
        out.fits[c] = net_visibility(grid, out.counts[c], out.accidentals[c]);
        out.mean_raw += out.fits[c].raw.visibility / 3.0;
        out.mean_net += out.fits[c].net.visibility / 3.0;
    }
    return out;
}

}  // namespace bellbin
