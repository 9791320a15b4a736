#pragma once

#include <optional>

#include "bellbin/mode_transform.hpp"

namespace bellbin {

// Beamsplitter convention used everywhere in the library:
//     in1^dagger -> sqrt(T) out1^dagger + i sqrt(R) out2^dagger
//     in2^dagger -> i sqrt(R) out1^dagger + sqrt(T) out2^dagger
// acting identically on every time bin below `domain_bins` (defaults to the
// whole window) and on both internal indices.
ModeTransform beamsplitter(Port in1, Port in2, Port out1, Port out2, double reflectivity, int window,
                           std::optional<int> domain_bins = std::nullopt);

// a^dagger_{p,t} -> e^{i phi} a^dagger_{p,t} for all bins of the window.
ModeTransform phase_shift(Port port, double phase, int window);

// a^dagger_{p,t} -> a^dagger_{p,t+k}; the domain is bins [0, window - k).
ModeTransform delay_line(Port port, int k, int window);

// Amplitude damping sqrt(transmission) on every mode of `port`. Not an
// isometry: the lost amplitude is post-selected away.
ModeTransform attenuator(Port port, double transmission, int window);

// Unbalanced Mach-Zehnder: beamsplitter, long arm with `delay` bins and
// `phase`, second beamsplitter. Inputs in bins [0, window - delay).
struct InterferometerSpec {
    Port in1;
    std::optional<Port> in2;  // used input; otherwise only in1 is in the domain
    Port vacuum_in;           // second beamsplitter input when in2 is not used
    Port short_arm;
    Port long_arm;
    Port out1;
    Port out2;
    double phase = 0.0;
    int delay = 1;
};

ModeTransform unbalanced_interferometer(const InterferometerSpec& spec, int window);

// The two-input time-bin interferometer of the Bell-state analyzer:
// a, b -> (c short, d long with phase delta) -> e (D1), f (D2).
ModeTransform bsa_interferometer(double delta, int window = 3);

struct AnalyzerPorts {
    Port in;
    Port vacuum_in;
    Port short_arm;
    Port long_arm;
    Port out1;
    Port out2;
};

AnalyzerPorts bob_analyzer_ports();
AnalyzerPorts alice_preparation_ports();

// Single-input unbalanced interferometer with `phase` in the long arm. Used
// for Alice's preparation (alpha), the pump interferometer (gamma) and Bob's
// analysis (beta).
ModeTransform qubit_analyzer(const AnalyzerPorts& ports, double phase, int window = 3);

double wrap_phase(double phase);  // into [0, 2 pi)

}  // namespace bellbin
