#include "bellbin/pair_sources.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>
#include <omp.h>

#include "bellbin/bell_analysis.hpp"
#include "bellbin/optics.hpp"

namespace bellbin {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

std::vector<PairTerm> pair_operator(const SourceSpec& spec) {
    const double v = spec.overlap;
    const double w = std::sqrt(std::max(0.0, 1.0 - v * v));
    std::vector<PairTerm> op;
    for (const auto& e : spec.emission) {
        PairTerm term;
        if (v > 0.0) term.signal.push_back({{spec.signal, e.signal_bin, 0}, v});
        if (w > 0.0) term.signal.push_back({{spec.signal, e.signal_bin, 1}, w});
        term.idler.push_back({{spec.idler, e.idler_bin, 0}, 1.0});
        term.weight = e.weight;
        op.push_back(std::move(term));
    }
    return op;
}

double visibility_of(double peak, double baseline) { return peak > 0.0 ? (peak - baseline) / peak : 0.0; }

}  // namespace

void SourceSpec::validate() const {
    if (!(chi >= 0.0 && chi < 1.0)) throw std::invalid_argument(fmt::format("pair amplitude {} outside [0, 1)", chi));
    if (order != 1 && order != 2) throw std::invalid_argument(fmt::format("expansion order {} unsupported", order));
    if (!(overlap >= 0.0 && overlap <= 1.0)) throw std::invalid_argument(fmt::format("overlap {} outside [0, 1]", overlap));
    if (signal == idler) throw std::invalid_argument("signal and idler need distinct ports");
    if (emission.empty()) throw std::invalid_argument("source has no emission modes");
    double norm = 0.0;
    for (const auto& e : emission) norm += std::norm(e.weight);
    if (std::abs(norm - 1.0) > 1e-12) throw std::invalid_argument(fmt::format("emission weights have norm {}", norm));
}

PhotonicState spdc_state(const SourceSpec& spec, FockLimits limits) {
    spec.validate();
    if (2 * spec.order > limits.max_photons) {
        throw std::out_of_range(fmt::format("order {} needs {} photons, budget is {}", spec.order, 2 * spec.order,
                                            limits.max_photons));
    }
    const PhotonicState vacuum(limits);
    if (spec.chi == 0.0) return vacuum;
    const auto op = pair_operator(spec);
    const auto one = apply_pair_creation(vacuum, op);
    std::vector<WeightedState> parts{{1.0, vacuum}, {spec.chi, one}};
    if (spec.order == 2) parts.push_back({spec.chi * spec.chi / 2.0, apply_pair_creation(one, op)});
    return superpose(parts);
}

double DelayModel::overlap(double delay) const {
    validate();
    return std::exp(-delay * delay / (2.0 * coherence * coherence));
}

void DelayModel::validate() const {
    if (!(coherence > 0.0) || !std::isfinite(coherence)) {
        throw std::invalid_argument(fmt::format("coherence scale {} must be positive", coherence));
    }
}

SourceSpec alice_source(double chi, double alpha, double overlap, int order) {
    return {chi, Port::a, Port::idler_a, order, overlap,
            {{0, 0, kInvSqrt2}, {1, 0, std::polar(kInvSqrt2, alpha)}}};
}

SourceSpec entangled_source(double chi, double gamma, int order) {
    return {chi, Port::b, Port::bob, order, 1.0, {{0, 0, kInvSqrt2}, {1, 1, std::polar(kInvSqrt2, gamma)}}};
}

void AntidipConfig::validate() const {
    if (chi_alice == 0.0 || chi_entangled == 0.0) throw std::domain_error("antidip needs both sources to emit (chi > 0)");
    alice_source(chi_alice, alpha, 1.0, order).validate();
    entangled_source(chi_entangled, gamma, order).validate();
}

AntidipRates antidip_rates(double overlap, const AntidipConfig& config) {
    config.validate();
    const FockLimits limits{};
    const auto joint = tensor(spdc_state(alice_source(config.chi_alice, config.alpha, overlap, config.order), limits),
                              spdc_state(entangled_source(config.chi_entangled, config.gamma, config.order), limits))
                           .normalize();
    const auto out = apply_transform(joint, bsa_interferometer(config.delta, limits.window));
    AntidipRates r;
    for (const auto& [occ, p] : measure_number(out)) {
        if (std::none_of(occ.begin(), occ.end(), [](const Mode& m) { return m.port == Port::bob; })) continue;
        const auto hits = detections_on(occ, {});
        if (hits.size() != 2 || hits[0].time != hits[1].time) continue;
        if (hits[0].time == 0) r.early += p;
        if (hits[0].time == 2) r.late += p;
    }
    return r;
}

namespace {

AntidipScan finish_scan(std::span<const double> delays, const AntidipConfig& config, const DelayModel& model,
                        std::vector<AntidipRates> rates) {
    AntidipScan scan;
    scan.delays.assign(delays.begin(), delays.end());
    for (double d : delays) scan.overlaps.push_back(model.overlap(d));
    scan.rates = std::move(rates);
    scan.baseline = antidip_rates(0.0, config);
    if (scan.baseline.total() <= 0.0) throw std::domain_error("no triple coincidences at the analyzer");
    double peak_early = 0.0, peak_late = 0.0;
    for (const auto& r : scan.rates) {
        if (r.total() > scan.peak.total()) scan.peak = r;
        peak_early = std::max(peak_early, r.early);
        peak_late = std::max(peak_late, r.late);
        scan.point_visibility.push_back(visibility_of(r.total(), scan.baseline.total()));
    }
    scan.visibility = visibility_of(scan.peak.total(), scan.baseline.total());
    scan.visibility_early = visibility_of(peak_early, scan.baseline.early);
    scan.visibility_late = visibility_of(peak_late, scan.baseline.late);
    return scan;
}

void check_grid(std::span<const double> delays, const AntidipConfig& config, const DelayModel& model) {
    if (delays.empty()) throw std::invalid_argument("delay grid is empty");
    model.validate();
    config.validate();
}

}  // namespace

AntidipScan antidip_scan_serial(std::span<const double> delays, const AntidipConfig& config,
                                const DelayModel& model) {
    check_grid(delays, config, model);
    std::vector<AntidipRates> rates;
    for (double d : delays) rates.push_back(antidip_rates(model.overlap(d), config));
    return finish_scan(delays, config, model, std::move(rates));
}

AntidipScan antidip_scan(std::span<const double> delays, const AntidipConfig& config, const DelayModel& model,
                         int workers) {
    check_grid(delays, config, model);
    std::vector<AntidipRates> rates(delays.size());
    const int threads = workers > 0 ? workers : omp_get_max_threads();
    const auto n = static_cast<std::int64_t>(delays.size());
#pragma omp parallel for num_threads(threads) schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        rates[k] = antidip_rates(model.overlap(delays[k]), config);
    }
    return finish_scan(delays, config, model, std::move(rates));
}

}  // namespace bellbin
