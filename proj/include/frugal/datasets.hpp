#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>

#include "frugal/image_io.hpp"
#include "frugal/types.hpp"

namespace frugal {

// Number of full grid cells along an axis of the given extent.
std::size_t grid_cells(std::uint32_t extent, std::uint32_t patch_size, std::uint32_t stride);

// One feature row per full grid cell, row-major over the grid. Pixel values
// are scaled to [0, 1]; concat stacks ref then test (d = 2*P*P*3), absdiff
// keeps |ref - test| (d = P*P*3). Patch refs point at patches/<id>_{ref,test}.png.
Dataset extract_patch_pairs(const Image& ref_image, const Image& test_image, const PatchGrid& grid, FeatureMode mode);

// Writes the PNG crops named by dataset.patch_refs under dir.
void export_patch_images(const Image& ref_image, const Image& test_image, const Dataset& dataset,
                         const std::filesystem::path& dir);

struct SyntheticSpec {
    std::size_t n = 2200;
    std::size_t d = 20;
    double positive_rate = 39.0 / 2200.0;
    std::size_t n_modes = 8;         // total gaussian modes
    std::size_t positive_modes = 2;  // modes (the first ones) that hold every positive
    double separation = 1.0;         // typical distance between mode centers
    double noise = 0.12;             // per-coordinate std inside a mode
    std::uint64_t seed = 0;
};

// Parses "default" or comma-separated key=value pairs (n, d, rate, modes,
// positive_modes, separation, noise, seed) applied over the defaults.
SyntheticSpec parse_synthetic_spec(const std::string& text);

// Gaussian-mode pool with exactly round(n * positive_rate) positives, all
// drawn from the positive modes; features min-max scaled to [0, 1].
std::pair<Dataset, LabelVector> generate_synthetic(const SyntheticSpec& spec);

struct LoadedDataset {
    Dataset dataset;
    std::optional<LabelVector> labels;
};

// Directory layout: manifest.json, features.bin (f32 LE rows), labels.bin
// (one byte per sample), patches/ when patch refs exist.
void save_dataset(const Dataset& dataset, const LabelVector* labels, const std::filesystem::path& dir);
LoadedDataset load_dataset(const std::filesystem::path& dir);

// CSV with header id,y,f_1..f_d; y is 1/+1, -1, or 0/empty for unknown.
LoadedDataset import_csv(const std::filesystem::path& path);

}  // namespace frugal
