#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "frugal/types.hpp"

namespace fixture {

inline frugal::Dataset make_dataset(std::initializer_list<std::initializer_list<double>> rows) {
    frugal::Dataset ds;
    ds.n = rows.size();
    ds.d = rows.begin()->size();
    for (const auto& r : rows)
        for (double v : r) ds.features.push_back(static_cast<float>(v));
    for (std::size_t i = 0; i < ds.n; ++i) ds.ids.push_back("x" + std::to_string(i));
    return ds;
}

inline frugal::Dataset random_dataset(std::size_t n, std::size_t d, std::mt19937_64& gen, double scale = 1.0) {
    std::uniform_real_distribution<float> u(0.0f, static_cast<float>(scale));
    frugal::Dataset ds;
    ds.n = n;
    ds.d = d;
    ds.features.resize(n * d);
    for (auto& v : ds.features) v = u(gen);
    for (std::size_t i = 0; i < n; ++i) ds.ids.push_back("x" + std::to_string(i));
    return ds;
}

// Four well separated blobs in the plane, `per` points each.
inline frugal::Dataset four_blobs(std::size_t per, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<float> noise(0.0f, 0.3f);
    const float cx[4] = {0, 20, 0, 20}, cy[4] = {0, 0, 20, 20};
    frugal::Dataset ds;
    ds.d = 2;
    for (std::size_t b = 0; b < 4; ++b)
        for (std::size_t i = 0; i < per; ++i) {
            ds.features.push_back(cx[b] + noise(gen));
            ds.features.push_back(cy[b] + noise(gen));
        }
    ds.n = 4 * per;
    for (std::size_t i = 0; i < ds.n; ++i) ds.ids.push_back("b" + std::to_string(i));
    return ds;
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("frugal_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace fixture
