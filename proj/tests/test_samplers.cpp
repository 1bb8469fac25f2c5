#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "frugal/error.hpp"
#include "frugal/samplers.hpp"

using namespace frugal;

namespace {

void check_valid_selection(const std::vector<std::size_t>& sel, const std::vector<bool>& mask, std::size_t B) {
    const std::size_t unlabeled = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), false));
    CHECK(sel.size() == std::min(B, unlabeled));
    CHECK(std::set<std::size_t>(sel.begin(), sel.end()).size() == sel.size());
    for (auto i : sel) CHECK_FALSE(mask[i]);
}

}  // namespace

TEST_CASE("maxmin on the line") {
    auto ds = fixture::make_dataset({{0}, {1}, {2}, {10}});
    const std::vector<std::size_t> labeled{0};
    CHECK(maxmin_select(ds, labeled, 2) == std::vector<std::size_t>{3, 2});
    auto all = maxmin_select(ds, labeled, 10);
    std::sort(all.begin(), all.end());
    CHECK(all == std::vector<std::size_t>{1, 2, 3});
    CHECK_THROWS_AS(maxmin_select(ds, std::vector<std::size_t>{}, 2), Error);
}

TEST_CASE("maxmin matches the exhaustive greedy oracle") {
    std::mt19937_64 gen(40);
    for (int rep = 0; rep < 20; ++rep) {
        auto ds = fixture::random_dataset(40, 3, gen);
        std::vector<std::size_t> labeled{static_cast<std::size_t>(gen() % 40), static_cast<std::size_t>(gen() % 40)};
        if (labeled[0] == labeled[1]) labeled.pop_back();
        CHECK(maxmin_select(ds, labeled, 8) == oracle::greedy_maxmin(ds, labeled, 8));
    }
}

TEST_CASE("maxmin is covariant under relabeling") {
    std::mt19937_64 gen(41);
    for (int rep = 0; rep < 10; ++rep) {
        auto ds = fixture::random_dataset(30, 2, gen);
        std::vector<std::size_t> perm(30);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), gen);
        auto shuffled = ds.subset(perm);  // shuffled row r is original perm[r]
        std::vector<std::size_t> inverse(30);
        for (std::size_t r = 0; r < 30; ++r) inverse[perm[r]] = r;

        const std::vector<std::size_t> labeled{3, 17};
        const std::vector<std::size_t> labeled_shuffled{inverse[3], inverse[17]};
        auto a = maxmin_select(ds, labeled, 6);
        auto b = maxmin_select(shuffled, labeled_shuffled, 6);
        for (auto& i : b) i = perm[i];
        CHECK(std::set<std::size_t>(a.begin(), a.end()) == std::set<std::size_t>(b.begin(), b.end()));
    }
}

TEST_CASE("uncertainty") {
    const std::vector<double> scores{-3, 0.1, -0.05, 2};
    CHECK(uncertainty_select(scores, std::vector<bool>(4, false), 2) == std::vector<std::size_t>{2, 1});
    const std::vector<double> flat(5, 0.7);
    CHECK(uncertainty_select(flat, std::vector<bool>(5, false), 3) == std::vector<std::size_t>{0, 1, 2});
    CHECK(uncertainty_select(scores, {false, true, true, false}, 5) == std::vector<std::size_t>{3, 0});
}

TEST_CASE("uncertainty matches a full sort by magnitude") {
    std::mt19937_64 gen(42);
    std::normal_distribution<double> nrm;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 5 + gen() % 50;
        std::vector<double> scores(n);
        // Rounded scores force frequent ties.
        for (auto& s : scores) s = std::round(nrm(gen) * 4) / 4;
        std::vector<bool> mask(n);
        for (std::size_t i = 0; i < n; ++i) mask[i] = gen() % 3 == 0;
        const std::size_t B = 1 + gen() % 10;
        CHECK(uncertainty_select(scores, mask, B) == oracle::sorted_by_margin(scores, mask, B));
    }
}

TEST_CASE("random selection") {
    std::vector<bool> mask{true, false, true, true};
    CHECK(random_select(mask, 3, 5) == std::vector<std::size_t>{1});
    std::vector<bool> open(50, false);
    CHECK(random_select(open, 10, 9) == random_select(open, 10, 9));
    CHECK(random_select(open, 10, 9) != random_select(open, 10, 10));
}

TEST_CASE("random selection is uniform") {
    std::vector<bool> mask{false, true, false, false, true, false};
    std::vector<int> counts(6, 0);
    const int draws = 10000;
    for (int s = 0; s < draws; ++s) counts[random_select(mask, 1, static_cast<std::uint64_t>(s))[0]]++;
    const double sigma = std::sqrt(draws * 0.25 * 0.75);
    for (std::size_t i : {0u, 2u, 3u, 5u}) CHECK(std::abs(counts[i] - draws * 0.25) < 4 * sigma);
    CHECK(counts[1] == 0);
    CHECK(counts[4] == 0);
}

TEST_CASE("every sampler returns a disjoint duplicate-free set of the right size") {
    std::mt19937_64 gen(43);
    std::normal_distribution<double> nrm;
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 3 + gen() % 40;
        auto ds = fixture::random_dataset(n, 2, gen);
        std::vector<bool> mask(n, false);
        std::vector<std::size_t> labeled;
        for (std::size_t i = 0; i < n; ++i)
            if (gen() % 2 == 0 || i == 0) {
                mask[i] = true;
                labeled.push_back(i);
            }
        if (labeled.size() == n) {
            mask[n - 1] = false;
            labeled.pop_back();
        }
        std::vector<double> scores(n);
        for (auto& s : scores) s = nrm(gen);
        const std::size_t B = 1 + gen() % 12;
        check_valid_selection(maxmin_select(ds, labeled, B), mask, B);
        check_valid_selection(uncertainty_select(scores, mask, B), mask, B);
        check_valid_selection(random_select(mask, B, rep), mask, B);
    }
}

TEST_CASE("sampler names") {
    for (auto kind : all_samplers()) CHECK(sampler_from_string(to_string(kind)) == kind);
    CHECK_THROWS_AS(sampler_from_string("bogus"), Error);
}
