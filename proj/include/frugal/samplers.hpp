#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "frugal/types.hpp"

namespace frugal {

enum class SamplerKind { proposed, maxmin, uncertainty, random };

const char* to_string(SamplerKind kind);
SamplerKind sampler_from_string(const std::string& s);
std::vector<SamplerKind> all_samplers();

// Greedy farthest-first: each pick maximizes the minimum euclidean distance
// to labeled + already picked samples; ties to the smallest index.
std::vector<std::size_t> maxmin_select(const Dataset& dataset, std::span<const std::size_t> labeled_idx,
                                       std::size_t B);

// Unlabeled samples with the smallest |score|, ties to the smallest index.
std::vector<std::size_t> uncertainty_select(std::span<const double> raw_scores, const std::vector<bool>& labeled_mask,
                                            std::size_t B);

// Uniform without replacement among unlabeled samples.
std::vector<std::size_t> random_select(const std::vector<bool>& labeled_mask, std::size_t B, std::uint64_t seed);

}  // namespace frugal
