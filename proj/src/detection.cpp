#include "bellbin/detection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <omp.h>

#include "bellbin/rng.hpp"

namespace bellbin {

namespace {

struct Prepared {
    std::vector<double> cumulative;
    double total = 0.0;
};

Prepared prepare(const EventDistribution& dist, const DetectorModel& det) {
    det.validate();
    Prepared p;
    p.cumulative.reserve(dist.size());
    for (const auto& ev : dist) {
        if (!(ev.probability >= 0.0) || !std::isfinite(ev.probability)) {
            throw std::invalid_argument(fmt::format("invalid event probability {}", ev.probability));
        }
        for (const auto& h : ev.hits) {
            if (h.detector < 0 || h.detector >= det.detectors() || h.time < 0 || h.time >= det.time_bins) {
                throw std::invalid_argument(fmt::format("hit (detector {}, time {}) outside the detector model",
                                                        h.detector, h.time));
            }
        }
        p.total += ev.probability;
        p.cumulative.push_back(p.total);
    }
    if (p.total > 1.0 + 1e-9) throw std::invalid_argument(fmt::format("event probabilities sum to {}", p.total));
    return p;
}

void apply_dead_time(std::vector<PhotonHit>& clicks) {
    // clicks sorted by (detector, time): keep the first entry per detector.
    clicks.erase(std::unique(clicks.begin(), clicks.end(),
                             [](const PhotonHit& x, const PhotonHit& y) { return x.detector == y.detector; }),
                 clicks.end());
}

// Survivors plus dark clicks in otherwise empty gates.
void finish_clicks(std::vector<PhotonHit>& clicks, std::span<const PhotonHit> darks, AnalyzerMode mode) {
    for (const auto& d : darks) {
        if (std::find(clicks.begin(), clicks.end(), d) == clicks.end()) clicks.push_back(d);
    }
    std::sort(clicks.begin(), clicks.end());
    if (mode == AnalyzerMode::DeadTimeLimited) apply_dead_time(clicks);
}

template <typename Counts>
void run_shot(std::uint64_t shot, std::uint64_t seed, const EventDistribution& dist, const Prepared& prep,
              const DetectorModel& det, const ClickBinner& binner, std::vector<PhotonHit>& clicks,
              std::vector<PhotonHit>& darks, Counts& counts) {
    ShotRng rng(seed, shot);
    const double u = rng.uniform();
    clicks.clear();
    darks.clear();
    auto it = std::upper_bound(prep.cumulative.begin(), prep.cumulative.end(), u);
    if (it != prep.cumulative.end()) {
        const auto& ev = dist[static_cast<std::size_t>(it - prep.cumulative.begin())];
        for (const auto& h : ev.hits) {
            if (rng.uniform() < det.efficiency[static_cast<std::size_t>(h.detector)]) clicks.push_back(h);
        }
    }
    if (det.dark_count > 0.0) {
        for (int d = 0; d < det.detectors(); ++d) {
            for (int t = 0; t < det.time_bins; ++t) {
                if (rng.uniform() < det.dark_count) darks.push_back({d, t});
            }
        }
    }
    finish_clicks(clicks, darks, det.mode);
    const int bin = binner(clicks);
    if (bin >= 0) ++counts[static_cast<std::size_t>(bin)];
}

double wrap_pm_pi(double x) {
    constexpr double two_pi = 2 * std::numbers::pi;
    x = std::fmod(x, two_pi);
    if (x <= -std::numbers::pi) x += two_pi;
    if (x > std::numbers::pi) x -= two_pi;
    return x;
}

}  // namespace

bool DetectorModel::is_ideal() const {
    return dark_count == 0.0 && std::all_of(efficiency.begin(), efficiency.end(), [](double e) { return e == 1.0; });
}

void DetectorModel::validate() const {
    if (efficiency.empty()) throw std::invalid_argument("detector model needs at least one detector");
    for (double e : efficiency) {
        if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument(fmt::format("efficiency {} outside [0, 1]", e));
    }
    if (!(dark_count >= 0.0 && dark_count < 1.0)) {
        throw std::invalid_argument(fmt::format("dark-count probability {} outside [0, 1)", dark_count));
    }
    if (time_bins < 1) throw std::invalid_argument("detector model needs at least one time bin");
}

int coincidence_bin(std::span<const PhotonHit> clicks) {
    const PhotonHit* pair[2];
    int n = 0;
    for (const auto& c : clicks) {
        if (c.detector > 1) continue;
        if (n == 2) return -1;
        pair[n++] = &c;
    }
    if (n != 2) return -1;
    auto det = [](int d) { return d == 0 ? Detector::D1 : Detector::D2; };
    const auto o = CoincidenceOutcome::make({det(pair[0]->detector), pair[0]->time}, {det(pair[1]->detector), pair[1]->time});
    return static_cast<int>(outcome_index(o));
}

EventDistribution events_from_outcomes(const OutcomeDistribution& dist) {
    EventDistribution out;
    for (std::size_t i = 0; i < kOutcomeCount; ++i) {
        if (dist[i] <= 0.0) continue;
        const auto& o = all_outcomes()[i];
        auto hit = [](const Detection& d) { return PhotonHit{d.detector == Detector::D1 ? 0 : 1, d.time}; };
        std::vector<PhotonHit> hits{hit(o.first), hit(o.second)};
        std::sort(hits.begin(), hits.end());
        out.push_back({std::move(hits), dist[i]});
    }
    return out;
}

std::vector<std::uint64_t> sample_counts_serial(const EventDistribution& dist, const DetectorModel& det,
                                                std::uint64_t shots, std::uint64_t seed,
                                                const ClickBinner& binner, int bins) {
    if (shots == 0) throw std::invalid_argument("shots must be at least 1");
    const auto prep = prepare(dist, det);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
    std::vector<PhotonHit> clicks, darks;
    for (std::uint64_t s = 0; s < shots; ++s) run_shot(s, seed, dist, prep, det, binner, clicks, darks, counts);
    return counts;
}

std::vector<std::uint64_t> sample_counts(const EventDistribution& dist, const DetectorModel& det,
                                         std::uint64_t shots, std::uint64_t seed, const ClickBinner& binner,
                                         int bins, int workers) {
    if (shots == 0) throw std::invalid_argument("shots must be at least 1");
    const auto prep = prepare(dist, det);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
    const int threads = workers > 0 ? workers : omp_get_max_threads();
    const auto n = static_cast<std::int64_t>(shots);
#pragma omp parallel num_threads(threads)
    {
        std::vector<std::uint64_t> local(counts.size(), 0);
        std::vector<PhotonHit> clicks, darks;
#pragma omp for schedule(static)
        for (std::int64_t s = 0; s < n; ++s) {
            run_shot(static_cast<std::uint64_t>(s), seed, dist, prep, det, binner, clicks, darks, local);
        }
#pragma omp critical
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
    }
    return counts;
}

std::vector<double> observed_probabilities(const EventDistribution& dist, const DetectorModel& det,
                                           const ClickBinner& binner, int bins) {
    const auto prep = prepare(dist, det);
    std::vector<double> out(static_cast<std::size_t>(bins), 0.0);
    std::vector<PhotonHit> clicks, darks, empty_gates;

    auto accumulate = [&](std::span<const PhotonHit> survivors, double weight) {
        empty_gates.clear();
        for (int d = 0; d < det.detectors(); ++d) {
            for (int t = 0; t < det.time_bins; ++t) {
                const PhotonHit g{d, t};
                if (std::find(survivors.begin(), survivors.end(), g) == survivors.end()) empty_gates.push_back(g);
            }
        }
        const std::size_t g = det.dark_count > 0.0 ? empty_gates.size() : 0;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g); ++mask) {
            double w = weight;
            darks.clear();
            for (std::size_t k = 0; k < g; ++k) {
                if (mask >> k & 1U) {
                    w *= det.dark_count;
                    darks.push_back(empty_gates[k]);
                } else {
                    w *= 1.0 - det.dark_count;
                }
            }
            if (w == 0.0) continue;
            clicks.assign(survivors.begin(), survivors.end());
            finish_clicks(clicks, darks, det.mode);
            const int bin = binner(clicks);
            if (bin >= 0) out[static_cast<std::size_t>(bin)] += w;
        }
    };

    std::vector<PhotonHit> survivors;
    for (const auto& ev : dist) {
        const std::size_t n = ev.hits.size();
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            double w = ev.probability;
            survivors.clear();
            for (std::size_t k = 0; k < n; ++k) {
                const double eta = det.efficiency[static_cast<std::size_t>(ev.hits[k].detector)];
                if (mask >> k & 1U) {
                    w *= eta;
                    survivors.push_back(ev.hits[k]);
                } else {
                    w *= 1.0 - eta;
                }
            }
            if (w > 0.0) accumulate(survivors, w);
        }
    }
    const double nothing = std::max(0.0, 1.0 - prep.total);
    if (nothing > 0.0) accumulate({}, nothing);
    return out;
}

CountRecord sample_outcomes(const OutcomeDistribution& dist, const DetectorModel& det, std::uint64_t shots,
                            std::uint64_t seed, int workers) {
    if (det.detectors() != 2) throw std::invalid_argument("coincidence sampling needs a two-detector model");
    const auto counts = sample_counts(events_from_outcomes(dist), det, shots, seed, coincidence_bin,
                                      static_cast<int>(kOutcomeCount), workers);
    CountRecord rec;
    rec.shots = shots;
    rec.seed = seed;
    std::uint64_t seen = 0;
    for (std::size_t i = 0; i < kOutcomeCount; ++i) {
        rec.counts[i] = counts[i];
        seen += counts[i];
    }
    rec.no_coincidence = shots - seen;
    return rec;
}

VisibilityFit estimate_visibility(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("phase grid and rates differ in length");
    if (x.size() < 5) throw std::invalid_argument("visibility fit needs at least 5 grid points");
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double step = (*hi - *lo) / static_cast<double>(x.size() - 1);
    if (*hi - *lo + step < 2 * std::numbers::pi - 1e-9) {
        throw std::invalid_argument("visibility fit needs a grid spanning at least one period");
    }
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        design(i, 0) = 1.0;
        design(i, 1) = std::cos(xi);
        design(i, 2) = std::sin(xi);
        rhs(i) = y[static_cast<std::size_t>(i)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 3) throw std::runtime_error("visibility fit is singular for this grid");
    const Eigen::Vector3d coef = qr.solve(rhs);

    VisibilityFit fit;
    fit.rms_residual = std::sqrt((design * coef - rhs).squaredNorm() / static_cast<double>(n));
    fit.baseline = coef(0);
    const double amp = std::hypot(coef(1), coef(2));
    const double scale = std::max(std::abs(coef(0)), rhs.cwiseAbs().maxCoeff());
    if (coef(0) <= 0.0 || amp <= 1e-12 * scale) {
        fit.flat = true;
        return fit;
    }
    fit.visibility = amp / coef(0);
    if (fit.visibility > 1.0) {
        fit.visibility = 1.0;
        fit.clamped = true;
    }
    fit.phase_offset = wrap_pm_pi(std::atan2(-coef(2), coef(1)));
    return fit;
}

NetVisibility net_visibility(std::span<const double> x, std::span<const double> counts,
                             std::span<const double> accidentals) {
    if (accidentals.size() != counts.size()) throw std::invalid_argument("one accidental estimate per point needed");
    NetVisibility out;
    out.raw = estimate_visibility(x, counts);
    std::vector<double> net(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (accidentals[i] < 0.0) throw std::invalid_argument("accidental rate must be non-negative");
        net[i] = counts[i] - accidentals[i];
        if (net[i] < 0.0) {
            net[i] = 0.0;
            ++out.clamped_points;
        }
    }
    out.net = estimate_visibility(x, net);
    return out;
}

NetVisibility net_visibility(std::span<const double> x, std::span<const double> counts, double accidental) {
    std::vector<double> acc(counts.size(), accidental);
    return net_visibility(x, counts, acc);
}

}  // namespace bellbin
