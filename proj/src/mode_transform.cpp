#include "bellbin/mode_transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace bellbin {

namespace {

double factorial(int n) {
    double r = 1.0;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

// prod_m sqrt(n_m!) over the distinct modes of a sorted pattern.
double fock_factor(const Occupation& occ) {
    double r = 1.0;
    for (std::size_t i = 0; i < occ.size();) {
        std::size_t j = i;
        while (j < occ.size() && occ[j] == occ[i]) ++j;
        r *= std::sqrt(factorial(static_cast<int>(j - i)));
        i = j;
    }
    return r;
}

void expand(const std::vector<ModeTransform::Column>& images, std::size_t k, Amplitude coeff, Occupation& chosen,
            TermMap& out) {
    if (k == images.size()) {
        Occupation key = canonical(chosen);
        const double f = fock_factor(key);
        out[std::move(key)] += coeff * f;
        return;
    }
    for (const auto& [m, c] : images[k]) {
        chosen.push_back(m);
        expand(images, k + 1, coeff * c, chosen, out);
        chosen.pop_back();
    }
}

}  // namespace

ModeTransform::ModeTransform(std::map<Mode, Column> columns, std::set<Port> ports)
    : columns_(std::move(columns)), ports_(std::move(ports)) {
    for (const auto& [m, col] : columns_) {
        if (!ports_.contains(m.port)) {
            throw std::invalid_argument(fmt::format("domain mode {} is not on an acted port", to_string(m)));
        }
    }
}

std::vector<Mode> ModeTransform::domain() const {
    std::vector<Mode> out;
    out.reserve(columns_.size());
    for (const auto& [m, col] : columns_) out.push_back(m);
    return out;
}

std::vector<Mode> ModeTransform::codomain() const {
    std::set<Mode> s;
    for (const auto& [m, col] : columns_) {
        for (const auto& [o, c] : col) s.insert(o);
    }
    return {s.begin(), s.end()};
}

ModeTransform::Column ModeTransform::image(const Mode& m) const {
    if (!acts_on(m.port)) return {{m, Amplitude{1.0, 0.0}}};
    auto it = columns_.find(m);
    if (it == columns_.end()) {
        throw std::out_of_range(fmt::format("mode {} is outside the transform domain", to_string(m)));
    }
    return it->second;
}

double ModeTransform::isometry_defect() const {
    std::vector<std::map<Mode, Amplitude>> cols;
    cols.reserve(columns_.size());
    for (const auto& [m, col] : columns_) {
        std::map<Mode, Amplitude> dense;
        for (const auto& [o, c] : col) dense[o] += c;
        cols.push_back(std::move(dense));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        for (std::size_t j = i; j < cols.size(); ++j) {
            Amplitude ip{};
            for (const auto& [o, c] : cols[i]) {
                auto it = cols[j].find(o);
                if (it != cols[j].end()) ip += std::conj(c) * it->second;
            }
            const double target = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(ip - target));
        }
    }
    return worst;
}

bool ModeTransform::is_unitary(double tol) const {
    auto dom = domain();
    auto cod = codomain();
    return dom == cod && is_isometry(tol);
}

ModeTransform ModeTransform::restricted_to(const std::set<Port>& inputs) const {
    std::map<Mode, Column> kept;
    for (const auto& [m, col] : columns_) {
        if (inputs.contains(m.port)) kept.emplace(m, col);
    }
    return ModeTransform(std::move(kept), ports_);
}

ModeTransform compose(const ModeTransform& first, const ModeTransform& second) {
    std::map<Mode, ModeTransform::Column> columns;
    for (const auto& [m, col] : first.columns()) {
        std::map<Mode, Amplitude> acc;
        for (const auto& [mid, c1] : col) {
            for (const auto& [o, c2] : second.image(mid)) acc[o] += c1 * c2;
        }
        ModeTransform::Column out;
        for (const auto& [o, c] : acc) {
            if (std::norm(c) > 1e-30) out.push_back({o, c});
        }
        columns.emplace(m, std::move(out));
    }
    for (const auto& [m, col] : second.columns()) {
        if (!first.acts_on(m.port)) columns.emplace(m, col);
    }
    std::set<Port> ports = first.ports();
    ports.insert(second.ports().begin(), second.ports().end());
    return ModeTransform(std::move(columns), std::move(ports));
}

ModeTransform identity_transform() { return {}; }

PhotonicState apply_transform(const PhotonicState& state, const ModeTransform& t) {
    const FockLimits limits = state.limits();
    TermMap out;
    std::vector<ModeTransform::Column> images;
    Occupation chosen;
    for (const auto& [occ, amp] : state.terms()) {
        images.clear();
        for (const auto& m : occ) images.push_back(t.image(m));
        for (const auto& col : images) {
            for (const auto& [o, c] : col) {
                if (o.time_bin < 0 || o.time_bin >= limits.window) {
                    throw std::out_of_range(
                        fmt::format("transform maps into {} outside window [0, {})", to_string(o), limits.window));
                }
            }
        }
        chosen.clear();
        expand(images, 0, amp / fock_factor(occ), chosen, out);
    }
    auto result = PhotonicState::from_terms(std::move(out), limits, false);
    if (state.normalized() && std::abs(result.norm_squared() - 1.0) <= 1e-12) {
        return PhotonicState::from_terms(result.terms(), limits, true);
    }
    return result;
}

}  // namespace bellbin
