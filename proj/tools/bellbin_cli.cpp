// bellbin: command-line experiments over the library.
//
// Exit status: 0 success, 1 comparison against reference values failed,
// 2 usage, configuration or I/O error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "bellbin/bell_analysis.hpp"
#include "bellbin/pair_sources.hpp"
#include "bellbin/teleportation.hpp"

using namespace bellbin;
using nlohmann::json;

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    template <typename... Cells>
    void add(const Cells&... cells) {
        rows.push_back({cell(cells)...});
    }

    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(std::string_view s) { return std::string(s); }
    static std::string cell(double x) { return fmt::format("{}", x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(std::uint64_t x) { return std::to_string(x); }
    static std::string cell(bool b) { return b ? "true" : "false"; }
};

struct Report {
    json summary;
    Table table;
    bool mismatch = false;
};

struct Common {
    std::string format = "json";
    std::string output = "-";
    std::string config;
};

// Fills options of `sub` that were not given on the command line. Keys owned
// by another subcommand are skipped so one file can serve every command.
void apply_config(CLI::App& app, CLI::App* sub, const std::string& path) {
    for (const auto& item : CLI::ConfigTOML().from_file(path)) {
        if (!item.parents.empty()) throw UsageError(fmt::format("config '{}': sections are not supported", path));
        const std::string flag = "--" + item.name;
        if (flag == "--config") throw UsageError("config files cannot include other config files");
        auto* opt = sub->get_option_no_throw(flag);
        if (opt == nullptr) {
            bool known = false;
            for (auto* other : app.get_subcommands([](CLI::App*) { return true; })) known = known || other->get_option_no_throw(flag) != nullptr;
            if (!known) throw UsageError(fmt::format("config '{}': unknown key '{}'", path, item.name));
            continue;
        }
        if (opt->count() > 0) continue;
        for (const auto& v : item.inputs) opt->add_result(v);
        opt->run_callback();
    }
}

struct Phases {
    double alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0;
    ExperimentPhases get() const { return {alpha, beta, gamma, delta}; }
};

AnalyzerMode parse_mode(const std::string& m) { return m == "deadtime" ? AnalyzerMode::DeadTimeLimited : AnalyzerMode::Ideal; }
std::string mode_name(AnalyzerMode m) { return m == AnalyzerMode::Ideal ? "ideal" : "deadtime"; }

void write_report(const Report& r, const Common& c) {
    std::ostringstream text;
    if (c.format == "json") {
        text << r.summary.dump(2) << '\n';
    } else {
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) text << (i ? "," : "") << cells[i];
            text << '\n';
        };
        line(r.table.header);
        for (const auto& row : r.table.rows) line(row);
    }
    if (c.output == "-") {
        std::cout << text.str();
        return;
    }
    std::ofstream out(c.output);
    if (!out) throw UsageError(fmt::format("cannot open output file '{}'", c.output));
    out << text.str();
    out.close();
    if (!out) throw UsageError(fmt::format("failed writing output file '{}'", c.output));
}

json phases_json(const ExperimentPhases& p) {
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"delta", p.delta}};
}

double wrap_pm_pi(double x) {
    x = std::fmod(x, 2 * std::numbers::pi);
    if (x <= -std::numbers::pi) x += 2 * std::numbers::pi;
    if (x > std::numbers::pi) x -= 2 * std::numbers::pi;
    return x;
}

// --- table1 -----------------------------------------------------------------

Report run_table1(double delta) {
    const auto table = bell_table(delta);
    const auto& ref = reference_table();
    const double dev = max_table_deviation(table);
    Report r;
    r.table.header = {"state", "outcome", "probability", "reference"};
    json rows = json::object();
    for (auto k : kAllBellKinds) {
        const auto ki = static_cast<std::size_t>(k);
        json row = json::object();
        for (std::size_t i = 0; i < kOutcomeCount; ++i) {
            const auto label = outcome_label(all_outcomes()[i]);
            row[label] = table[ki][i];
            r.table.add(kind_name(k), label, table[ki][i], ref[ki][i].value());
        }
        rows[std::string(kind_name(k))] = row;
    }
    r.mismatch = dev > 1e-12;
    r.summary = {{"experiment", "table1"}, {"delta", delta},      {"max_deviation", dev},
                 {"tolerance", 1e-12},     {"pass", !r.mismatch}, {"table", rows}};
    return r;
}

// --- success ----------------------------------------------------------------

Report run_success(AnalyzerMode mode, double delta) {
    Report r;
    r.table.header = {"state", "success_rate", "baseline_success_rate"};
    json per_state = json::object();
    json baseline = json::object();
    for (auto k : kAllBellKinds) {
        const double s = success_rate(k, delta, mode);
        const double b = baseline_success_rate(k, mode);
        per_state[std::string(kind_name(k))] = s;
        baseline[std::string(kind_name(k))] = b;
        r.table.add(kind_name(k), s, b);
    }
    const double avg = average_success_rate(delta, mode);
    const double base_avg = baseline_average_success_rate(mode);
    r.table.add("average", avg, base_avg);
    r.summary = {{"experiment", "success"},
                 {"mode", mode_name(mode)},
                 {"delta", delta},
                 {"success_rates", per_state},
                 {"average", avg},
                 {"baseline_success_rates", baseline},
                 {"baseline_average", base_avg}};
    return r;
}

// --- fringes ----------------------------------------------------------------

json class_fit_json(const VisibilityFit& f) {
    return {{"visibility", f.visibility}, {"phase_offset", f.phase_offset}, {"baseline", f.baseline},
            {"rms_residual", f.rms_residual}, {"flat", f.flat}, {"clamped", f.clamped}};
}

Report run_fringes(ScanAxis axis, const ExperimentPhases& fixed, int points, AnalyzerMode mode) {
    const auto grid = phase_grid(points);
    const auto scan = fringe_scan(axis, grid, fixed, mode);
    Report r;
    r.table.header = {axis == ScanAxis::Alpha ? "alpha" : "beta", "rate_psi_plus", "rate_psi_minus", "rate_phi_plus"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        r.table.add(grid[i], scan.classes[0].rates[i], scan.classes[1].rates[i], scan.classes[2].rates[i]);
    }
    json classes = json::object();
    double mean_v = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        const auto& cls = scan.classes[c];
        json j = class_fit_json(cls.fit);
        j["calibrated_offset"] = cls.offset;
        j["fidelity"] = visibility_to_fidelity(cls.fit.visibility);
        classes[std::string(classification_name(kConclusiveClasses[c]))] = j;
        mean_v += cls.fit.visibility / 3.0;
    }
    const double phi_shift = wrap_pm_pi(scan.classes[2].offset - scan.classes[0].offset);
    const double psi_shift = wrap_pm_pi(scan.classes[1].offset - scan.classes[0].offset);
    r.summary = {{"experiment", "fringes"},
                 {"scan", axis == ScanAxis::Alpha ? "alpha" : "beta"},
                 {"mode", mode_name(mode)},
                 {"phases", phases_json(fixed)},
                 {"points", points},
                 {"calibration_offset", scan.calibration},
                 {"classes", classes},
                 {"psi_minus_minus_psi_plus_offset", psi_shift},
                 {"phi_plus_minus_psi_plus_offset", phi_shift},
                 {"mean_visibility", mean_v},
                 {"mean_fidelity", visibility_to_fidelity(mean_v)},
                 {"cloning_limit", kCloningLimit}};
    return r;
}

// --- antidip ----------------------------------------------------------------

Report run_antidip(const AntidipConfig& config, const DelayModel& model, int points, double span) {
    if (points < 2) throw std::invalid_argument("antidip grid needs at least 2 points");
    if (!(span > 0.0)) throw std::invalid_argument("antidip span must be positive");
    std::vector<double> delays;
    for (int i = 0; i < points; ++i) delays.push_back(-span + 2 * span * i / (points - 1));
    const auto scan = antidip_scan(delays, config, model);
    Report r;
    r.table.header = {"delay", "overlap", "rate_00", "rate_22", "rate_total", "visibility"};
    for (std::size_t i = 0; i < delays.size(); ++i) {
        const auto& x = scan.rates[i];
        r.table.add(delays[i], scan.overlaps[i], x.early, x.late, x.total(), scan.point_visibility[i]);
    }
    r.summary = {{"experiment", "antidip"},
                 {"chi_alice", config.chi_alice},
                 {"chi_entangled", config.chi_entangled},
                 {"order", config.order},
                 {"coherence", model.coherence},
                 {"points", points},
                 {"span", span},
                 {"baseline", {{"rate_00", scan.baseline.early}, {"rate_22", scan.baseline.late}}},
                 {"peak", {{"rate_00", scan.peak.early}, {"rate_22", scan.peak.late}}},
                 {"visibility", scan.visibility},
                 {"visibility_00", scan.visibility_early},
                 {"visibility_22", scan.visibility_late}};
    return r;
}

// --- simulate ---------------------------------------------------------------

Report run_simulate(ScanAxis axis, const ExperimentPhases& fixed, const NoiseModel& noise, int points,
                    std::uint64_t shots, std::uint64_t seed, bool exact) {
    const auto grid = phase_grid(points);
    const auto sim = simulate_noisy_fringes(axis, grid, fixed, noise, shots, seed, exact);
    Report r;
    r.table.header = {axis == ScanAxis::Alpha ? "alpha" : "beta",
                      "counts_psi_plus",  "counts_psi_minus",  "counts_phi_plus",
                      "accidentals_psi_plus", "accidentals_psi_minus", "accidentals_phi_plus"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        r.table.add(grid[i], sim.counts[0][i], sim.counts[1][i], sim.counts[2][i], sim.accidentals[0][i],
                    sim.accidentals[1][i], sim.accidentals[2][i]);
    }
    json classes = json::object();
    for (std::size_t c = 0; c < 3; ++c) {
        const auto& f = sim.fits[c];
        classes[std::string(classification_name(kConclusiveClasses[c]))] = {
            {"raw", class_fit_json(f.raw)},
            {"net", class_fit_json(f.net)},
            {"clamped_points", f.clamped_points},
            {"fidelity_raw", visibility_to_fidelity(f.raw.visibility)},
            {"fidelity_net", visibility_to_fidelity(f.net.visibility)}};
    }
    const double f_raw = visibility_to_fidelity(sim.mean_raw);
    const double f_net = visibility_to_fidelity(sim.mean_net);
    r.summary = {{"experiment", "simulate"},
                 {"scan", axis == ScanAxis::Alpha ? "alpha" : "beta"},
                 {"mode", mode_name(noise.detectors.mode)},
                 {"phases", phases_json(fixed)},
                 {"points", points},
                 {"shots", shots},
                 {"seed", seed},
                 {"exact", exact},
                 {"noise",
                  {{"chi_alice", noise.chi_alice},
                   {"chi_entangled", noise.chi_entangled},
                   {"overlap", noise.overlap},
                   {"order", noise.order},
                   {"efficiency", noise.detectors.efficiency},
                   {"dark_count", noise.detectors.dark_count}}},
                 {"accidental_model", "model-based: expected counts with dark counts minus without"},
                 {"classes", classes},
                 {"mean_visibility_raw", sim.mean_raw},
                 {"mean_visibility_net", sim.mean_net},
                 {"fidelity_raw", f_raw},
                 {"fidelity_net", f_net},
                 {"beats_cloning_limit_net", beats_cloning_limit(f_net)}};
    return r;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "Flat key = value file; command-line flags win")->check(CLI::ExistingFile);
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--output", c.output, "Output file, '-' for stdout")->capture_default_str();
}

void add_phases(CLI::App* sub, Phases& p) {
    sub->add_option("--alpha", p.alpha, "Alice's preparation phase (rad)")->capture_default_str();
    sub->add_option("--beta", p.beta, "Bob's analyzer phase (rad)")->capture_default_str();
    sub->add_option("--gamma", p.gamma, "Pump interferometer phase (rad)")->capture_default_str();
    sub->add_option("--delta", p.delta, "Analyzer interferometer phase (rad)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-bin Bell-state analyzer and teleportation experiments"};
    app.require_subcommand(1);

    Common common;
    Phases phases;
    std::string mode = "ideal";
    std::string scan = "alpha";
    int points = 16;
    double chi = 0.05;
    std::optional<double> chi_alice, chi_entangled;
    int order = 2;
    double coherence = 1.0;
    double span = 4.0;
    std::uint64_t shots = 1'000'000;
    std::uint64_t seed = 1;
    double eta = 0.5;
    double dark = 1e-4;
    double overlap = 0.9;
    bool exact = false;

    auto mode_opt = [&](CLI::App* sub, const char* def) {
        mode = def;
        sub->add_option("--mode", mode, "Analyzer mode")->check(CLI::IsMember({"ideal", "deadtime"}))->capture_default_str();
    };

    auto* table1 = app.add_subcommand("table1", "Outcome probabilities of the four rotated Bell states");
    add_common(table1, common);
    table1->add_option("--delta", phases.delta, "Analyzer interferometer phase (rad)")->capture_default_str();

    auto* success = app.add_subcommand("success", "Success rates per Bell state and for the baseline analyzer");
    add_common(success, common);
    success->add_option("--delta", phases.delta, "Analyzer interferometer phase (rad)")->capture_default_str();
    mode_opt(success, "ideal");

    auto* fringes = app.add_subcommand("fringes", "Ideal teleportation fringes per conclusive class");
    add_common(fringes, common);
    add_phases(fringes, phases);
    fringes->add_option("--scan", scan, "Scanned phase")->check(CLI::IsMember({"alpha", "beta"}))->capture_default_str();
    fringes->add_option("--points", points, "Grid points over one period")->check(CLI::Range(5, 100000))->capture_default_str();
    mode_opt(fringes, "ideal");

    auto* antidip = app.add_subcommand("antidip", "Delay scan of the 00/22 triple coincidences");
    add_common(antidip, common);
    antidip->add_option("--chi", chi, "Pair amplitude of both crystals")->capture_default_str();
    antidip->add_option("--chi-alice", chi_alice, "Pair amplitude of Alice's crystal");
    antidip->add_option("--chi-entangled", chi_entangled, "Pair amplitude of the entangled crystal");
    antidip->add_option("--order", order, "1: single pairs, 2: up to double pairs")->check(CLI::IsMember({1, 2}))->capture_default_str();
    antidip->add_option("--coherence", coherence, "Coherence scale of the Gaussian overlap")->capture_default_str();
    antidip->add_option("--span", span, "Delays from -span to +span")->capture_default_str();
    antidip->add_option("--points", points, "Delay grid points")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Noisy teleportation fringes with raw and net visibilities");
    add_common(simulate, common);
    add_phases(simulate, phases);
    simulate->add_option("--scan", scan, "Scanned phase")->check(CLI::IsMember({"alpha", "beta"}))->capture_default_str();
    simulate->add_option("--points", points, "Grid points over one period")->check(CLI::Range(5, 100000))->capture_default_str();
    simulate->add_option("--shots", shots, "Heralded shots per grid point")->capture_default_str();
    simulate->add_option("--seed", seed, "Master seed")->capture_default_str();
    simulate->add_option("--chi", chi, "Pair amplitude of both crystals")->capture_default_str();
    simulate->add_option("--chi-alice", chi_alice, "Pair amplitude of Alice's crystal");
    simulate->add_option("--chi-entangled", chi_entangled, "Pair amplitude of the entangled crystal");
    simulate->add_option("--order", order, "1: single pairs, 2: up to double pairs")->check(CLI::IsMember({1, 2}))->capture_default_str();
    simulate->add_option("--overlap", overlap, "Wavepacket overlap of the two photons at the analyzer")->capture_default_str();
    simulate->add_option("--eta", eta, "Efficiency of every detector")->capture_default_str();
    simulate->add_option("--dark", dark, "Dark-count probability per detector gate")->capture_default_str();
    simulate->add_flag("--exact", exact, "Expected counts instead of sampling");
    mode_opt(simulate, "deadtime");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        CLI::App* chosen = app.get_subcommands().front();
        if (!common.config.empty()) apply_config(app, chosen, common.config);
        Report report;
        const auto axis = scan == "beta" ? ScanAxis::Beta : ScanAxis::Alpha;
        if (*table1) {
            report = run_table1(phases.delta);
        } else if (*success) {
            report = run_success(parse_mode(mode), phases.delta);
        } else if (*fringes) {
            report = run_fringes(axis, phases.get(), points, parse_mode(mode));
        } else if (*antidip) {
            AntidipConfig config{chi_alice.value_or(chi), chi_entangled.value_or(chi), order};
            report = run_antidip(config, DelayModel{coherence}, points, span);
        } else if (*simulate) {
            NoiseModel noise;
            noise.chi_alice = chi_alice.value_or(chi);
            noise.chi_entangled = chi_entangled.value_or(chi);
            noise.order = order;
            noise.overlap = overlap;
            noise.detectors = {{eta, eta, eta}, dark, parse_mode(mode)};
            report = run_simulate(axis, phases.get(), noise, points, shots, seed, exact);
        }
        write_report(report, common);
        if (report.mismatch) {
            std::cerr << "bellbin: computed values differ from the reference table\n";
            return kExitMismatch;
        }
    } catch (const CLI::Error& e) {
        std::cerr << "bellbin: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "bellbin: " << e.what() << '\n';
        return kExitUsage;
    }
    return 0;
}
