#include "frugal/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frugal/clustering.hpp"
#include "frugal/error.hpp"
#include "frugal/random.hpp"

namespace frugal {

const char* to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::proposed: return "proposed";
        case SamplerKind::maxmin: return "maxmin";
        case SamplerKind::uncertainty: return "uncertainty";
        case SamplerKind::random: return "random";
    }
    return "unknown";
}

SamplerKind sampler_from_string(const std::string& s) {
    for (auto k : all_samplers())
        if (s == to_string(k)) return k;
    fail(ErrorKind::invalid_argument, "unknown strategy '" + s + "'");
}

std::vector<SamplerKind> all_samplers() {
    return {SamplerKind::proposed, SamplerKind::maxmin, SamplerKind::uncertainty, SamplerKind::random};
}

std::vector<std::size_t> maxmin_select(const Dataset& ds, std::span<const std::size_t> labeled_idx, std::size_t B) {
    require(!labeled_idx.empty(), ErrorKind::invalid_state, "maxmin needs a non-empty labeled set");
    std::vector<bool> taken(ds.n, false);
    for (std::size_t i : labeled_idx) {
        require(i < ds.n, ErrorKind::invalid_argument, "labeled index out of range");
        taken[i] = true;
    }
    std::vector<double> min_dist(ds.n, std::numeric_limits<double>::infinity());
    std::size_t unlabeled = 0;
    for (std::size_t i = 0; i < ds.n; ++i) {
        if (taken[i]) continue;
        ++unlabeled;
        for (std::size_t j : labeled_idx) min_dist[i] = std::min(min_dist[i], squared_distance(ds.row(i), ds.row(j)));
    }
    require(unlabeled > 0, ErrorKind::invalid_state, "every sample is already labeled");

    std::vector<std::size_t> picked;
    const std::size_t take = std::min(B, unlabeled);
    while (picked.size() < take) {
        std::size_t best = ds.n;
        double best_d = -1.0;
        for (std::size_t i = 0; i < ds.n; ++i) {
            if (!taken[i] && min_dist[i] > best_d) {
                best_d = min_dist[i];
                best = i;
            }
        }
        taken[best] = true;
        picked.push_back(best);
        for (std::size_t i = 0; i < ds.n; ++i)
            if (!taken[i]) min_dist[i] = std::min(min_dist[i], squared_distance(ds.row(i), ds.row(best)));
    }
    return picked;
}

std::vector<std::size_t> uncertainty_select(std::span<const double> raw_scores, const std::vector<bool>& labeled_mask,
                                            std::size_t B) {
    require(labeled_mask.size() == raw_scores.size(), ErrorKind::invalid_argument, "labeled mask length mismatch");
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < raw_scores.size(); ++i) {
        require(std::isfinite(raw_scores[i]), ErrorKind::invalid_argument, "non-finite score");
        if (!labeled_mask[i]) candidates.push_back(i);
    }
    require(!candidates.empty(), ErrorKind::invalid_state, "every sample is already labeled");
    const std::size_t take = std::min(B, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                      [&](std::size_t a, std::size_t b) {
                          const double sa = std::abs(raw_scores[a]);
                          const double sb = std::abs(raw_scores[b]);
                          return sa < sb || (sa == sb && a < b);
                      });
    candidates.resize(take);
    return candidates;
}

std::vector<std::size_t> random_select(const std::vector<bool>& labeled_mask, std::size_t B, std::uint64_t seed) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < labeled_mask.size(); ++i)
        if (!labeled_mask[i]) candidates.push_back(i);
    require(!candidates.empty(), ErrorKind::invalid_state, "every sample is already labeled");
    const std::size_t take = std::min(B, candidates.size());
    Rng rng(seed);
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.index(candidates.size() - i);
        std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(take);
    return candidates;
}

}  // namespace frugal
