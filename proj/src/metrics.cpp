#include "minav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "minav/error.hpp"

namespace minav {

namespace {

// Mixed-radix cell ids overflow for large grids; fall back to hashing the
// index tuple, which is exact but slower.
struct TupleHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const {
        std::uint64_t h = 1469598103934665603ull;
        for (auto x : v) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return std::size_t(h);
    }
};

}  // namespace

EntropyResult normalized_entropy(std::span<const double> samples, std::size_t p,
                                 std::span<const double> lo, std::span<const double> hi) {
    if (p == 0) throw Error(ErrorCode::invalid_input, "entropy: dimension must be positive");
    if (samples.size() % p != 0) throw Error(ErrorCode::dimension_mismatch, "entropy: ragged samples");
    if (lo.size() != p || hi.size() != p) throw Error(ErrorCode::dimension_mismatch, "entropy: range size");
    const std::size_t n = samples.size() / p;
    if (n < 2) throw Error(ErrorCode::invalid_input, "entropy needs at least two samples");

    EntropyResult r;
    r.n = n;
    r.widths.resize(p);
    r.bins_per_dim.resize(p);
    const double scale = std::pow(double(n), -1.0 / double(p));
    r.bins = 1.0;
    for (std::size_t d = 0; d < p; ++d) {
        if (!(hi[d] >= lo[d])) throw Error(ErrorCode::invalid_range, "entropy: hi < lo");
        const double range = hi[d] - lo[d];
        r.widths[d] = range * scale;
        r.bins_per_dim[d] = range > 0.0 ? std::size_t(std::ceil(range / r.widths[d])) : 1;
        r.bins_per_dim[d] = std::max<std::size_t>(r.bins_per_dim[d], 1);
        r.bins *= double(r.bins_per_dim[d]);
    }

    auto bin_of = [&](std::size_t i, std::size_t d) -> std::uint32_t {
        if (r.bins_per_dim[d] == 1) return 0;
        const double x = samples[i * p + d];
        const double t = std::floor((x - lo[d]) / r.widths[d]);
        const double last = double(r.bins_per_dim[d] - 1);
        return std::uint32_t(std::clamp(std::isnan(t) ? 0.0 : t, 0.0, last));
    };

    std::vector<std::size_t> counts;
    if (r.bins < 9.0e18) {
        std::unordered_map<std::uint64_t, std::size_t> cells;
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t id = 0;
            for (std::size_t d = 0; d < p; ++d) id = id * r.bins_per_dim[d] + bin_of(i, d);
            ++cells[id];
        }
        for (const auto& [_, c] : cells) counts.push_back(c);
    } else {
        std::unordered_map<std::vector<std::uint32_t>, std::size_t, TupleHash> cells;
        std::vector<std::uint32_t> key(p);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < p; ++d) key[d] = bin_of(i, d);
            ++cells[key];
        }
        for (const auto& [_, c] : cells) counts.push_back(c);
    }
    // Summation order fixed so the result does not depend on hash layout.
    std::sort(counts.begin(), counts.end());
    double h = 0.0;
    for (auto c : counts) {
        const double q = double(c) / double(n);
        h -= q * std::log2(q);
    }
    const double denom = std::min(std::log2(r.bins), std::log2(double(n)));
    r.eta = denom > 0.0 ? h / denom : 0.0;
    return r;
}

namespace {

EntropyReport coverage_with_ranges(const OfflineDataset& ds, double x0, double x1, double y0, double y1) {
    const std::size_t pa = ds.action_dims();
    const std::size_t n = ds.total_steps();
    if (n == 0) throw Error(ErrorCode::empty_dataset, "coverage_report: empty dataset");
    std::vector<double> s, a, sa;
    s.reserve(2 * n);
    a.reserve(pa * n);
    sa.reserve((2 + pa) * n);
    for (const auto& ep : ds.episodes()) {
        for (std::size_t t = 0; t < ep.length(); ++t) {
            const auto pose = ep.pose(t);
            const auto act = ep.action(t);
            s.push_back(pose.x);
            s.push_back(pose.y);
            sa.push_back(pose.x);
            sa.push_back(pose.y);
            for (float v : act) {
                a.push_back(v);
                sa.push_back(v);
            }
        }
    }
    std::vector<double> lo_s{x0, y0}, hi_s{x1, y1};
    std::vector<double> lo_a(pa, -1.0), hi_a(pa, 1.0);
    std::vector<double> lo_sa = lo_s, hi_sa = hi_s;
    lo_sa.insert(lo_sa.end(), lo_a.begin(), lo_a.end());
    hi_sa.insert(hi_sa.end(), hi_a.begin(), hi_a.end());

    EntropyReport rep;
    rep.n = n;
    const auto es = normalized_entropy(s, 2, lo_s, hi_s);
    const auto ea = normalized_entropy(a, pa, lo_a, hi_a);
    const auto esa = normalized_entropy(sa, 2 + pa, lo_sa, hi_sa);
    rep.eta_s = es.eta;
    rep.eta_a = ea.eta;
    rep.eta_sa = esa.eta;
    rep.k_s = es.bins;
    rep.k_a = ea.bins;
    rep.k_sa = esa.bins;
    rep.delta_s = es.widths;
    rep.delta_a = ea.widths;
    rep.delta_sa = esa.widths;
    return rep;
}

}  // namespace

EntropyReport coverage_report(const OfflineDataset& dataset, const MazeWorld& world) {
    return coverage_with_ranges(dataset, 0.0, world.width_m(), 0.0, world.height_m());
}

EntropyReport coverage_report(const OfflineDataset& dataset) {
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    for (const auto& ep : dataset.episodes()) {
        for (std::size_t t = 0; t < ep.length(); ++t) {
            const auto p = ep.pose(t);
            x0 = std::min<double>(x0, p.x);
            x1 = std::max<double>(x1, p.x);
            y0 = std::min<double>(y0, p.y);
            y1 = std::max<double>(y1, p.y);
        }
    }
    if (dataset.total_steps() == 0) throw Error(ErrorCode::empty_dataset, "coverage_report: empty dataset");
    return coverage_with_ranges(dataset, x0, x1, y0, y1);
}

double stl(std::span<const int> successes, std::span<const double> times,
           std::span<const double> reference_times) {
    if (successes.size() != times.size() || times.size() != reference_times.size()) {
        throw Error(ErrorCode::dimension_mismatch, "stl: length mismatch");
    }
    if (successes.empty()) throw Error(ErrorCode::invalid_input, "stl: no episodes");
    double sum = 0.0;
    for (std::size_t i = 0; i < successes.size(); ++i) {
        if (!(reference_times[i] > 0.0)) throw Error(ErrorCode::invalid_input, "stl: reference time must be positive");
        if (successes[i]) sum += reference_times[i] / std::max(times[i], reference_times[i]);
    }
    return sum / double(successes.size());
}

}  // namespace minav
