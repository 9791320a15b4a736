#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bellbin/photonic_state.hpp"

namespace bellbin {

// Row order follows the reference coincidence table.
enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };
inline constexpr std::array<BellKind, 4> kAllBellKinds{BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus,
                                                       BellKind::PsiMinus};

enum class Detector { D1, D2 };

struct Detection {
    Detector detector = Detector::D1;
    int time = 0;  // 0, 1 or 2 in units of the time-bin separation

    auto operator<=>(const Detection&) const = default;
};

// Unordered pair of detections, stored with first <= second.
struct CoincidenceOutcome {
    Detection first;
    Detection second;

    static CoincidenceOutcome make(Detection x, Detection y);
    static CoincidenceOutcome same(Detector d, int t1, int t2);
    static CoincidenceOutcome cross(int t_d1, int t_d2);

    bool same_detector() const { return first.detector == second.detector; }
    auto operator<=>(const CoincidenceOutcome&) const = default;
};

inline constexpr std::size_t kOutcomeCount = 21;

// The 21 outcomes in table column order: same-detector pairs 00, 11, 22, 01,
// 02, 12 (D1 then D2 for each), then cross pairs (t_D1, t_D2) =
// 00, 22, 11, 10, 01, 12, 21, 02, 20.
std::span<const CoincidenceOutcome, kOutcomeCount> all_outcomes();
std::size_t outcome_index(const CoincidenceOutcome& o);
std::optional<CoincidenceOutcome> parse_outcome(std::string_view label);
std::string outcome_label(const CoincidenceOutcome& o);  // "D1:02", "D2:11", "X:10"

std::string_view kind_name(BellKind k);

enum class Classification { ConclusivePsiPlus, ConclusivePsiMinus, ConclusivePhiPlus, Inconclusive };
std::string_view classification_name(Classification c);
std::optional<BellKind> conclusive_kind(Classification c);

enum class AnalyzerMode { Ideal, DeadTimeLimited };

// Which output port each detector watches. Swapping them is the single
// global relabeling allowed when comparing against the reference table.
struct DetectorPorts {
    Port d1 = Port::e;
    Port d2 = Port::f;
};

using OutcomeDistribution = std::array<double, kOutcomeCount>;
using BellTable = std::array<OutcomeDistribution, 4>;
using ClassificationTable = std::array<Classification, kOutcomeCount>;

// Detections registered on the two detector ports (internal index ignored).
std::vector<Detection> detections_on(const Occupation& occ, const DetectorPorts& ports);

// Bell states on ports a, b with |1> replaced by e^{i delta}|1>:
//     phi'_pm = (|00> pm e^{2 i delta}|11>) / sqrt 2
//     psi'_pm = e^{i delta} (|01> pm |10>) / sqrt 2
PhotonicState bell_state(BellKind kind, double delta, FockLimits limits = {});

// Propagates a two-photon a/b input through bsa_interferometer(delta) and
// bins the result into the 21 coincidence classes.
OutcomeDistribution outcome_distribution(const PhotonicState& input, double delta,
                                         const DetectorPorts& ports = {});

// Rows for the rotated Bell inputs at `delta`.
BellTable bell_table(double delta, const DetectorPorts& ports = {});

// An outcome is conclusive for kind k when only k gives it nonzero
// probability. In DeadTimeLimited mode same-detector outcomes are dropped.
ClassificationTable derive_classification(const BellTable& table, AnalyzerMode mode, double tol = 1e-12);

Classification classify(const CoincidenceOutcome& outcome, AnalyzerMode mode);

double success_rate(BellKind kind, double delta, AnalyzerMode mode);
double average_success_rate(double delta, AnalyzerMode mode);

// Reference analyzer made of one 50/50 beamsplitter (a, b -> e, f) and the
// same two detectors.
OutcomeDistribution baseline_outcome_distribution(const PhotonicState& input, const DetectorPorts& ports = {});
double baseline_success_rate(BellKind kind, AnalyzerMode mode);
double baseline_average_success_rate(AnalyzerMode mode);

// Reference coincidence probabilities as exact fractions.
struct Fraction {
    int num = 0;
    int den = 1;
    double value() const { return static_cast<double>(num) / den; }
};
using ReferenceTable = std::array<std::array<Fraction, kOutcomeCount>, 4>;
const ReferenceTable& reference_table();

// Largest |computed - reference| over all 84 entries.
double max_table_deviation(const BellTable& computed);

// 2x2 operators on the time-bin qubit {|0>, |1>}.
using CorrectionUnitary = Eigen::Matrix2cd;

CorrectionUnitary pauli_x();
CorrectionUnitary pauli_z();

// P0 + e^{2 i delta} P1: phase shift of 2 delta on the late bin. Undoes the
// e^{2 i delta} carried by the rotated phi states.
CorrectionUnitary phase_correction(double delta);

// {phase_correction, sigma_z phase_correction, sigma_x, sigma_z sigma_x}
// in the order (PhiPlus, PhiMinus, PsiPlus, PsiMinus).
CorrectionUnitary correction_for_kind(BellKind kind, double delta);

// Throws std::invalid_argument for Inconclusive.
CorrectionUnitary correction_unitary(Classification c, double delta);

}  // namespace bellbin
