#include "bellbin/optics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace bellbin {

namespace {

constexpr Amplitude kI{0.0, 1.0};

void require_window(int window) {
    if (window < 1) throw std::invalid_argument("window must be at least one time bin");
}

}  // namespace

double wrap_phase(double phase) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(phase, two_pi);
    if (r < 0) r += two_pi;
    return r;
}

ModeTransform beamsplitter(Port in1, Port in2, Port out1, Port out2, double reflectivity, int window,
                           std::optional<int> domain_bins) {
    require_window(window);
    if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
        throw std::invalid_argument(fmt::format("reflectivity {} outside [0, 1]", reflectivity));
    }
    if (in1 == in2 || out1 == out2) throw std::invalid_argument("beamsplitter ports must be distinct");
    const int bins = domain_bins.value_or(window);
    if (bins < 0 || bins > window) throw std::out_of_range("beamsplitter domain exceeds the window");

    const double t = std::sqrt(1.0 - reflectivity);
    const double r = std::sqrt(reflectivity);
    std::map<Mode, ModeTransform::Column> cols;
    for (int bin = 0; bin < bins; ++bin) {
        for (int internal = 0; internal < 2; ++internal) {
            const Mode o1{out1, bin, internal};
            const Mode o2{out2, bin, internal};
            ModeTransform::Column c1, c2;
            if (t > 0) c1.push_back({o1, t});
            if (r > 0) c1.push_back({o2, kI * r});
            if (r > 0) c2.push_back({o1, kI * r});
            if (t > 0) c2.push_back({o2, t});
            cols.emplace(Mode{in1, bin, internal}, std::move(c1));
            cols.emplace(Mode{in2, bin, internal}, std::move(c2));
        }
    }
    return ModeTransform(std::move(cols), {in1, in2});
}

ModeTransform phase_shift(Port port, double phase, int window) {
    require_window(window);
    const Amplitude factor = std::polar(1.0, phase);
    std::map<Mode, ModeTransform::Column> cols;
    for (int bin = 0; bin < window; ++bin) {
        for (int internal = 0; internal < 2; ++internal) {
            const Mode m{port, bin, internal};
            cols.emplace(m, ModeTransform::Column{{m, factor}});
        }
    }
    return ModeTransform(std::move(cols), {port});
}

ModeTransform delay_line(Port port, int k, int window) {
    require_window(window);
    if (k < 0) throw std::invalid_argument("delay must be non-negative");
    if (k >= window) throw std::out_of_range(fmt::format("delay {} leaves no room in a {}-bin window", k, window));
    std::map<Mode, ModeTransform::Column> cols;
    for (int bin = 0; bin + k < window; ++bin) {
        for (int internal = 0; internal < 2; ++internal) {
            cols.emplace(Mode{port, bin, internal}, ModeTransform::Column{{Mode{port, bin + k, internal}, 1.0}});
        }
    }
    return ModeTransform(std::move(cols), {port});
}

ModeTransform attenuator(Port port, double transmission, int window) {
    require_window(window);
    if (!(transmission >= 0.0 && transmission <= 1.0)) throw std::invalid_argument("transmission outside [0, 1]");
    const double amp = std::sqrt(transmission);
    std::map<Mode, ModeTransform::Column> cols;
    for (int bin = 0; bin < window; ++bin) {
        for (int internal = 0; internal < 2; ++internal) {
            const Mode m{port, bin, internal};
            cols.emplace(m, ModeTransform::Column{{m, amp}});
        }
    }
    return ModeTransform(std::move(cols), {port});
}

ModeTransform unbalanced_interferometer(const InterferometerSpec& spec, int window) {
    if (spec.delay < 1) throw std::invalid_argument("interferometer delay must be at least one bin");
    if (window < spec.delay + 1) {
        throw std::out_of_range(
            fmt::format("window of {} bins is too small for an interferometer with delay {}", window, spec.delay));
    }
    const Port second_in = spec.in2.value_or(spec.vacuum_in);
    const int input_bins = window - spec.delay;
    auto first = beamsplitter(spec.in1, second_in, spec.short_arm, spec.long_arm, 0.5, window, input_bins);
    auto arm = compose(delay_line(spec.long_arm, spec.delay, window),
                       phase_shift(spec.long_arm, wrap_phase(spec.phase), window));
    auto second = beamsplitter(spec.short_arm, spec.long_arm, spec.out1, spec.out2, 0.5, window);
    auto full = compose(compose(first, arm), second);
    std::set<Port> inputs{spec.in1};
    if (spec.in2) inputs.insert(*spec.in2);
    return full.restricted_to(inputs);
}

ModeTransform bsa_interferometer(double delta, int window) {
    InterferometerSpec spec{
        .in1 = Port::a,
        .in2 = Port::b,
        .vacuum_in = Port::b,
        .short_arm = Port::c,
        .long_arm = Port::d,
        .out1 = Port::e,
        .out2 = Port::f,
        .phase = delta,
        .delay = 1,
    };
    return unbalanced_interferometer(spec, window);
}

AnalyzerPorts bob_analyzer_ports() {
    return {Port::bob, Port::bob_vac, Port::bob_s, Port::bob_l, Port::bob_out1, Port::bob_out2};
}

AnalyzerPorts alice_preparation_ports() {
    return {Port::alice_src, Port::alice_vac, Port::alice_s, Port::alice_l, Port::alice_dump, Port::a};
}

ModeTransform qubit_analyzer(const AnalyzerPorts& ports, double phase, int window) {
    InterferometerSpec spec{
        .in1 = ports.in,
        .in2 = std::nullopt,
        .vacuum_in = ports.vacuum_in,
        .short_arm = ports.short_arm,
        .long_arm = ports.long_arm,
        .out1 = ports.out1,
        .out2 = ports.out2,
        .phase = phase,
        .delay = 1,
    };
    return unbalanced_interferometer(spec, window);
}

}  // namespace bellbin
