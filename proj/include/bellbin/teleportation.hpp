#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bellbin/bell_analysis.hpp"
#include "bellbin/detection.hpp"

namespace bellbin {

struct ExperimentPhases {
    double alpha = 0.0;  // Alice's preparation
    double beta = 0.0;   // Bob's analyzer
    double gamma = 0.0;  // pump interferometer of the entangled pair
    double delta = 0.0;  // analyzer interferometer
};

// Time-bin qubit amplitudes on {|0>, |1>}.
using QubitState = Eigen::Vector2cd;

QubitState alice_qubit(double alpha);  // (|0> + e^{i alpha}|1>) / sqrt2

// Alice's qubit on port a times (|0>_b |0>_bob + e^{i gamma}|1>_b |1>_bob) / sqrt2.
PhotonicState build_joint_state(const ExperimentPhases& phases);

struct ConditionalState {
    QubitState state;
    double probability = 0.0;
};

// Bob's qubit after the analyzer registers `outcome`, with the joint
// probability of that outcome. Throws std::domain_error if it cannot occur.
ConditionalState conditional_bob_state(const ExperimentPhases& phases, const CoincidenceOutcome& outcome);

// Removes the pump phase carried by Bob's late bin: diag(1, e^{-i gamma}).
QubitState to_reference_frame(const QubitState& state, double gamma);

// correction_unitary(c, delta) * state. Throws std::invalid_argument for Inconclusive.
QubitState apply_correction(const QubitState& state, Classification c, double delta);

// Conditional state, moved to the reference frame and corrected according
// to classify(outcome, mode).
QubitState teleported_state(const ExperimentPhases& phases, const CoincidenceOutcome& outcome,
                            AnalyzerMode mode = AnalyzerMode::Ideal);

double fidelity(const QubitState& a, const QubitState& b);  // |<a|b>|^2

inline constexpr double kCloningLimit = 5.0 / 6.0;

// (1 + V) / 2. Throws std::invalid_argument outside 0 <= V <= 1.
double visibility_to_fidelity(double visibility);
bool beats_cloning_limit(double fidelity);

enum class ScanAxis { Alpha, Beta };

// Conclusive classes in Classification order: psi+, psi-, phi+.
inline constexpr std::array<Classification, 3> kConclusiveClasses{
    Classification::ConclusivePsiPlus, Classification::ConclusivePsiMinus, Classification::ConclusivePhiPlus};

// Probability that the analyzer reports each conclusive class and Bob's
// photon leaves his analyzer in the central time bin.
std::array<double, 3> fringe_rates(const ExperimentPhases& phases, AnalyzerMode mode = AnalyzerMode::Ideal);

struct ClassFringe {
    std::vector<double> rates;
    VisibilityFit fit;
    double offset = 0.0;  // fit.phase_offset minus the calibration offset, in (-pi, pi]
};

struct ScanResult {
    ScanAxis axis = ScanAxis::Alpha;
    ExperimentPhases fixed;
    std::vector<double> grid;
    double calibration = 0.0;
    std::array<ClassFringe, 3> classes;  // kConclusiveClasses order
};

// `points` equally spaced phases in [0, 2 pi).
std::vector<double> phase_grid(int points);

// Fitted psi+ phase offset with every phase at zero, along `axis`.
double calibration_offset(ScanAxis axis, AnalyzerMode mode = AnalyzerMode::Ideal);

ScanResult fringe_scan(ScanAxis axis, std::span<const double> grid, const ExperimentPhases& fixed,
                       AnalyzerMode mode = AnalyzerMode::Ideal, int workers = 0);
ScanResult fringe_scan_serial(ScanAxis axis, std::span<const double> grid, const ExperimentPhases& fixed,
                              AnalyzerMode mode = AnalyzerMode::Ideal);

// Two crystals with multi-pair emission, partial overlap and three
// imperfect detectors: D1 (e), D2 (f) and Bob's D3 (central output).
struct NoiseModel {
    double chi_alice = 0.1;
    double chi_entangled = 0.1;
    double overlap = 1.0;
    int order = 2;
    DetectorModel detectors{{0.5, 0.5, 0.5}, 1e-4, AnalyzerMode::DeadTimeLimited};

    void validate() const;
};

// Photons reaching D1, D2, D3 per shot, for shots where the entangled
// crystal emitted (the heralded sub-ensemble, renormalized).
EventDistribution noisy_events(const ExperimentPhases& phases, const NoiseModel& noise);

// Conclusive class index (kConclusiveClasses order) when D1/D2 show a
// conclusive coincidence and D3 clicked in the central bin; otherwise -1.
int teleportation_bin(std::span<const PhotonHit> clicks, AnalyzerMode mode);

struct NoisyFringes {
    ScanAxis axis = ScanAxis::Alpha;
    ExperimentPhases fixed;
    std::vector<double> grid;
    bool exact = false;  // expected counts instead of sampled ones
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::array<std::vector<double>, 3> counts;
    std::array<std::vector<double>, 3> accidentals;  // model-based dark-count contribution
    std::array<NetVisibility, 3> fits;
    double mean_raw = 0.0;
    double mean_net = 0.0;
};

// Per grid point, `shots` heralded shots. With `exact` the counts are
// shots times the exact detection probabilities.
NoisyFringes simulate_noisy_fringes(ScanAxis axis, std::span<const double> grid, const ExperimentPhases& fixed,
                                    const NoiseModel& noise, std::uint64_t shots, std::uint64_t seed, bool exact,
                                    int workers = 0);

}  // namespace bellbin
