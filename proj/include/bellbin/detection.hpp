#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bellbin/bell_analysis.hpp"

namespace bellbin {

// Photon arriving at a detector gate, or a click registered there.
struct PhotonHit {
    int detector = 0;
    int time = 0;
    auto operator<=>(const PhotonHit&) const = default;
};

// One mutually exclusive "true" event: the photons reaching detectors in a
// shot, with its probability. Probabilities may sum to less than one; the
// remainder is a shot where nothing reaches a detector.
struct Event {
    std::vector<PhotonHit> hits;  // sorted
    double probability = 0.0;
};
using EventDistribution = std::vector<Event>;

struct DetectorModel {
    std::vector<double> efficiency{1.0, 1.0};  // one entry per detector
    double dark_count = 0.0;                   // per detector, per time-bin gate
    AnalyzerMode mode = AnalyzerMode::Ideal;
    int time_bins = 3;

    int detectors() const { return static_cast<int>(efficiency.size()); }
    bool is_ideal() const;
    void validate() const;  // throws std::invalid_argument

    static DetectorModel ideal(int detectors = 2) { return {std::vector<double>(detectors, 1.0), 0.0}; }
};

// Maps the clicks of one shot to a counter index, or -1 to drop the shot.
using ClickBinner = std::function<int(std::span<const PhotonHit>)>;

// The 21 coincidence outcomes on detectors 0 (D1) and 1 (D2): exactly two
// clicks on those detectors.
int coincidence_bin(std::span<const PhotonHit> clicks);

EventDistribution events_from_outcomes(const OutcomeDistribution& dist);

// Per shot: draw the true event, thin each photon with its detector
// efficiency, add dark counts to empty gates, then keep only the first
// click per detector in DeadTimeLimited mode. Photon-number resolution
// is idealized in Ideal mode (two photons in one gate are two clicks).
//
// Shot i always draws from ShotRng(seed, i), so the counts are identical
// for every worker count.
std::vector<std::uint64_t> sample_counts(const EventDistribution& dist, const DetectorModel& det,
                                         std::uint64_t shots, std::uint64_t seed, const ClickBinner& binner,
                                         int bins, int workers = 0);

// Single-threaded reference for sample_counts.
std::vector<std::uint64_t> sample_counts_serial(const EventDistribution& dist, const DetectorModel& det,
                                                std::uint64_t shots, std::uint64_t seed,
                                                const ClickBinner& binner, int bins);

// Exact expectation of what sample_counts estimates: probability per bin,
// enumerating photon survival and dark-count configurations.
std::vector<double> observed_probabilities(const EventDistribution& dist, const DetectorModel& det,
                                           const ClickBinner& binner, int bins);

struct CountRecord {
    std::array<std::uint64_t, kOutcomeCount> counts{};
    std::uint64_t no_coincidence = 0;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;

    bool operator==(const CountRecord&) const = default;
};

// Samples the 21-outcome distribution through a two-detector model.
CountRecord sample_outcomes(const OutcomeDistribution& dist, const DetectorModel& det, std::uint64_t shots,
                            std::uint64_t seed, int workers = 0);

struct VisibilityFit {
    double visibility = 0.0;
    double phase_offset = 0.0;  // phi0 in baseline * (1 + V cos(x + phi0)), in (-pi, pi]
    double baseline = 0.0;
    double rms_residual = 0.0;
    bool flat = false;     // no measurable modulation; visibility reported as 0
    bool clamped = false;  // raw estimate exceeded 1
};

// Linear least squares on y = A + B cos x + C sin x. Needs at least 5
// points spanning a full period.
VisibilityFit estimate_visibility(std::span<const double> x, std::span<const double> y);

struct NetVisibility {
    VisibilityFit raw;
    VisibilityFit net;
    int clamped_points = 0;  // points where subtraction went negative and was set to 0
};

// Fits the raw counts, then again after subtracting `accidentals[i]` from
// every point.
NetVisibility net_visibility(std::span<const double> x, std::span<const double> counts,
                             std::span<const double> accidentals);
NetVisibility net_visibility(std::span<const double> x, std::span<const double> counts, double accidental);

}  // namespace bellbin
