#pragma once

#include "estlab/estimators.hpp"
#include "estlab/population.hpp"
#include "estlab/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace estlab {

enum class DegeneratePolicy { Skip, Error };

struct SimConfig {
    std::uint64_t n = 2;
    std::uint64_t replicates = 1;
    std::uint64_t seed = 0;
    std::vector<Estimator> estimators;
    DegeneratePolicy degenerate_policy = DegeneratePolicy::Skip;
    /// Worker threads; 0 picks the hardware concurrency. Results do not
    /// depend on this value.
    unsigned threads = 0;
};

struct EstimatorSummary {
    std::string label;
    double empirical_mean = 0.0;
    /// empirical_mean - Ybar
    double empirical_bias = 0.0;
    /// Mean squared deviation from the true Ybar over the kept samples.
    double empirical_mse = 0.0;
    /// 100 * (sample-mean MSE over all samples) / empirical_mse
    double empirical_pre = 0.0;
    /// Monte Carlo standard error of empirical_mse; 0 under enumeration.
    double mse_standard_error = 0.0;
    std::uint64_t degenerate_count = 0;
    std::uint64_t effective_replicates = 0;
};

struct SimResult {
    std::vector<EstimatorSummary> rows;
    double true_mean = 0.0;
    std::uint64_t n = 0;
    /// Replicates drawn, or C(N,n) subsets visited under enumeration.
    std::uint64_t replicates = 0;
    /// MSE of the sample mean over every sample; the PRE baseline.
    double baseline_mse = 0.0;
    bool exhaustive = false;

    [[nodiscard]] const EstimatorSummary* find(std::string_view label) const noexcept;
};

inline constexpr std::uint64_t kEnumerationGuard = 2'000'000;

struct CombinationCount {
    std::uint64_t value = 0;
    bool saturated = false;  ///< true when C(N,n) > 2^64 - 1
};

[[nodiscard]] CombinationCount binomial(std::uint64_t N, std::uint64_t n) noexcept;

/// Uniform n-subset without replacement (0-based unit indices, draw order).
[[nodiscard]] std::vector<std::size_t> draw_srswor_indices(std::size_t N, std::size_t n, Xoshiro256StarStar& rng);
[[nodiscard]] SampleData draw_srswor(const FinitePopulation& pop, std::uint64_t n, Xoshiro256StarStar& rng);

/// Exact design expectations over every n-subset, each with weight 1/C(N,n).
[[nodiscard]] SimResult enumerate_all_samples(const FinitePopulation& pop, std::uint64_t n,
                                              const std::vector<Estimator>& estimators,
                                              DegeneratePolicy policy = DegeneratePolicy::Skip);

[[nodiscard]] SimResult monte_carlo(const FinitePopulation& pop, const SimConfig& config);

struct SyntheticSpec {
    std::uint64_t N = 100;
    double P_target = 0.5;
    double intercept = 10.0;
    double attribute_effect = 1.0;
    double noise_sd = 1.0;
};

/// Exactly round(N * P_target) units (placed at random) get phi = 1, and
/// y = intercept + attribute_effect * phi + N(0, noise_sd^2).
[[nodiscard]] FinitePopulation synthesize_population(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace estlab
