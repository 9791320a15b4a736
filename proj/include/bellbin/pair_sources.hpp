#pragma once

#include <span>
#include <vector>

#include "bellbin/photonic_state.hpp"

namespace bellbin {

// One term w * s^dagger_{signal_bin} i^dagger_{idler_bin} of the pair
// creation operator.
struct BinPair {
    int signal_bin = 0;
    int idler_bin = 0;
    Amplitude weight{1.0, 0.0};
};

struct SourceSpec {
    double chi = 0.0;  // pair amplitude, [0, 1)
    Port signal = Port::a;
    Port idler = Port::idler_a;
    int order = 2;         // 1: up to one pair, 2: up to two pairs
    double overlap = 1.0;  // signal wavepacket v|0> + sqrt(1 - v^2)|1> in the internal index
    std::vector<BinPair> emission{{0, 0, 1.0}};  // sum |w|^2 = 1

    void validate() const;  // throws std::invalid_argument
};

// Normalized truncation of |0> + chi P|0> + (chi^2 / 2) P^2 |0>, with P the
// pair creation operator. For a single emission mode the double-pair
// amplitude is chi^2, as in the two-mode squeezed vacuum.
PhotonicState spdc_state(const SourceSpec& spec, FockLimits limits = {});

struct DelayModel {
    double coherence = 1.0;  // sigma_c, same units as the delay

    double overlap(double delay) const;  // exp(-delay^2 / (2 sigma_c^2))
    void validate() const;
};

// Alice's crystal: signal on port a in (|0> + e^{i alpha}|1>)/sqrt2, idler
// on idler_a in bin 0.
SourceSpec alice_source(double chi, double alpha = 0.0, double overlap = 1.0, int order = 2);

// Time-bin entangled pair (|0 0> + e^{i gamma}|1 1>)/sqrt2 on ports b, bob.
SourceSpec entangled_source(double chi, double gamma = 0.0, int order = 2);

struct AntidipConfig {
    double chi_alice = 0.05;
    double chi_entangled = 0.05;
    int order = 2;
    double alpha = 0.0;
    double gamma = 0.0;
    double delta = 0.0;

    void validate() const;
};

// Triple-coincidence rates (a photon at Bob plus the named pair of
// detections at the analyzer) for one overlap value.
struct AntidipRates {
    double early = 0.0;  // D1"00", D2"00" and cross "00"
    double late = 0.0;   // same for "22"
    double total() const { return early + late; }
};

AntidipRates antidip_rates(double overlap, const AntidipConfig& config);

struct AntidipScan {
    std::vector<double> delays;
    std::vector<double> overlaps;
    std::vector<AntidipRates> rates;
    AntidipRates baseline;  // fully distinguishable photons
    AntidipRates peak;      // largest rate on the grid
    double visibility = 0.0;        // (peak - baseline) / peak on early + late
    double visibility_early = 0.0;
    double visibility_late = 0.0;
    std::vector<double> point_visibility;  // (rate - baseline) / rate per delay
};

// Throws std::domain_error when either source is dark (chi = 0).
AntidipScan antidip_scan(std::span<const double> delays, const AntidipConfig& config, const DelayModel& model,
                         int workers = 0);
AntidipScan antidip_scan_serial(std::span<const double> delays, const AntidipConfig& config,
                                const DelayModel& model);

}  // namespace bellbin
