#include "estlab/simulation.hpp"

#include "estlab/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

namespace estlab {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    void merge(const CompensatedSum& other) noexcept
    {
        add(other.sum_);
        add(other.comp_);
    }

    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct Accumulator {
    CompensatedSum estimate;
    CompensatedSum sq_dev;
    CompensatedSum quad_dev;
    std::uint64_t kept = 0;
    std::uint64_t degenerate = 0;

    void add(double value, double truth) noexcept
    {
        const double d = value - truth;
        const double d2 = d * d;
        estimate.add(value);
        sq_dev.add(d2);
        quad_dev.add(d2 * d2);
        ++kept;
    }

    void merge(const Accumulator& other) noexcept
    {
        estimate.merge(other.estimate);
        sq_dev.merge(other.sq_dev);
        quad_dev.merge(other.quad_dev);
        kept += other.kept;
        degenerate += other.degenerate;
    }
};

// One accumulator per estimator plus the sample-mean baseline at the back.
using AccumulatorSet = std::vector<Accumulator>;

// Partial Fisher-Yates over a reusable permutation; the swaps are undone after
// each draw so a draw depends only on the generator state.
class SrsworDrawer {
public:
    explicit SrsworDrawer(std::size_t N) : perm_(N), swaps_()
    {
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    }

    std::span<const std::size_t> draw(std::size_t n, Xoshiro256StarStar& rng)
    {
        const std::size_t N = perm_.size();
        swaps_.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, N - i));
            std::swap(perm_[i], perm_[j]);
            swaps_.push_back(j);
        }
        sample_.assign(perm_.begin(), perm_.begin() + static_cast<std::ptrdiff_t>(n));
        for (std::size_t i = n; i-- > 0;) std::swap(perm_[i], perm_[swaps_[i]]);
        return sample_;
    }

private:
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> swaps_;
    std::vector<std::size_t> sample_;
};

void check_sample_size(std::uint64_t N, std::uint64_t n)
{
    if (n < 2 || n >= N) {
        throw Error(ErrorKind::InvalidSampleSize,
                    "sample size n = " + std::to_string(n) + " must satisfy 2 <= n < N = " + std::to_string(N));
    }
}

void check_estimators(const std::vector<Estimator>& estimators)
{
    for (const auto& est : estimators) {
        if (const auto* form = std::get_if<EstimatorForm>(&est.rule)) require_valid_m1(*form);
    }
}

// Returns false when the sample is degenerate for at least one estimator.
bool evaluate_sample(const SampleStats& stats, const PopulationParams& params,
                     const std::vector<Estimator>& estimators, AccumulatorSet& acc)
{
    const double truth = params.Ybar;
    const bool constant_attribute = !stats.b_phi.has_value();
    bool clean = true;
    for (std::size_t k = 0; k < estimators.size(); ++k) {
        const auto& est = estimators[k];
        if (est.uses_attribute() && constant_attribute) {
            ++acc[k].degenerate;
            clean = false;
            continue;
        }
        try {
            acc[k].add(est.evaluate(stats, params), truth);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::UndefinedEstimate && e.kind() != ErrorKind::DegenerateSample) throw;
            ++acc[k].degenerate;
            clean = false;
        }
    }
    acc.back().add(stats.ybar, truth);
    return clean;
}

SimResult summarize(const AccumulatorSet& acc, const std::vector<Estimator>& estimators,
                    const PopulationParams& params, std::uint64_t n, std::uint64_t replicates, bool exhaustive)
{
    SimResult out;
    out.true_mean = params.Ybar;
    out.n = n;
    out.replicates = replicates;
    out.exhaustive = exhaustive;
    const auto& base = acc.back();
    out.baseline_mse = base.sq_dev.value() / static_cast<double>(base.kept);

    for (std::size_t k = 0; k < estimators.size(); ++k) {
        const auto& a = acc[k];
        EstimatorSummary row;
        row.label = estimators[k].label;
        row.degenerate_count = a.degenerate;
        row.effective_replicates = a.kept;
        if (a.kept > 0) {
            const double m = static_cast<double>(a.kept);
            row.empirical_mean = a.estimate.value() / m;
            row.empirical_bias = row.empirical_mean - params.Ybar;
            row.empirical_mse = a.sq_dev.value() / m;
            row.empirical_pre = 100.0 * out.baseline_mse / row.empirical_mse;
            if (!exhaustive && a.kept > 1) {
                const double mean_d4 = a.quad_dev.value() / m;
                const double var_d2 = std::max(0.0, mean_d4 - row.empirical_mse * row.empirical_mse) * m / (m - 1.0);
                row.mse_standard_error = std::sqrt(var_d2 / m);
            }
        } else {
            row.empirical_mean = row.empirical_bias = row.empirical_mse = row.empirical_pre =
                std::numeric_limits<double>::quiet_NaN();
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace

const EstimatorSummary* SimResult::find(std::string_view label) const noexcept
{
    for (const auto& row : rows) {
        if (row.label == label) return &row;
    }
    return nullptr;
}

CombinationCount binomial(std::uint64_t N, std::uint64_t n) noexcept
{
    if (n > N) return {0, false};
    n = std::min(n, N - n);
    __extension__ typedef unsigned __int128 u128;
    u128 c = 1;
    constexpr u128 cap = std::numeric_limits<std::uint64_t>::max();
    for (std::uint64_t k = 0; k < n; ++k) {
        // c * (N - k) / (k + 1) is exact at every step; c <= cap and N - k < 2^64 keeps it in 128 bits.
        c = c * (N - k) / (k + 1);
        if (c > cap) return {std::numeric_limits<std::uint64_t>::max(), true};
    }
    return {static_cast<std::uint64_t>(c), false};
}

std::vector<std::size_t> draw_srswor_indices(std::size_t N, std::size_t n, Xoshiro256StarStar& rng)
{
    if (n < 1 || n > N) {
        throw Error(ErrorKind::InvalidSampleSize,
                    "sample size n = " + std::to_string(n) + " outside [1, N = " + std::to_string(N) + "]");
    }
    SrsworDrawer drawer(N);
    const auto sample = drawer.draw(n, rng);
    return {sample.begin(), sample.end()};
}

SampleData draw_srswor(const FinitePopulation& pop, std::uint64_t n, Xoshiro256StarStar& rng)
{
    if (n < 2 || n > pop.size()) {
        throw Error(ErrorKind::InvalidSampleSize, "sample size n = " + std::to_string(n) +
                                                      " must satisfy 2 <= n <= N = " + std::to_string(pop.size()));
    }
    const auto idx = draw_srswor_indices(pop.size(), static_cast<std::size_t>(n), rng);
    SampleData out;
    out.y.reserve(idx.size());
    out.phi.reserve(idx.size());
    for (const auto i : idx) {
        out.y.push_back(pop.y()[i]);
        out.phi.push_back(pop.phi()[i]);
    }
    return out;
}

SimResult enumerate_all_samples(const FinitePopulation& pop, std::uint64_t n,
                                const std::vector<Estimator>& estimators, DegeneratePolicy policy)
{
    const std::size_t N = pop.size();
    check_sample_size(N, n);
    const auto count = binomial(N, n);
    if (count.saturated || count.value > kEnumerationGuard) {
        throw TooManySamplesError(count.value, count.saturated, kEnumerationGuard);
    }
    const auto params = compute_params(pop);
    check_estimators(estimators);

    AccumulatorSet acc(estimators.size() + 1);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::uint64_t ordinal = 0;
    while (true) {
        const auto stats = compute_sample_stats(pop, idx);
        if (!evaluate_sample(stats, params, estimators, acc) && policy == DegeneratePolicy::Error) {
            throw DegenerateSampleError("degenerate sample at enumeration index " + std::to_string(ordinal) +
                                            " (sampled attribute constant or estimator undefined)",
                                        ordinal);
        }
        ++ordinal;

        // Next n-combination in lexicographic order.
        std::size_t i = n;
        while (i > 0 && idx[i - 1] == N - n + (i - 1)) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < n; ++j) idx[j] = idx[j - 1] + 1;
    }
    return summarize(acc, estimators, params, n, ordinal, true);
}

SimResult monte_carlo(const FinitePopulation& pop, const SimConfig& config)
{
    const std::size_t N = pop.size();
    check_sample_size(N, config.n);
    if (config.replicates < 1) {
        throw Error(ErrorKind::InvalidSampleSize, "replicates must be at least 1");
    }
    const auto params = compute_params(pop);
    check_estimators(config.estimators);

    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t chunks = (config.replicates + kChunk - 1) / kChunk;
    std::vector<AccumulatorSet> partial(chunks);

    constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();
    std::atomic<std::uint64_t> next_chunk{0};
    std::atomic<std::uint64_t> first_bad{kNone};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        SrsworDrawer drawer(N);
        try {
            for (std::uint64_t c = next_chunk++; c < chunks; c = next_chunk++) {
                const std::uint64_t begin = c * kChunk;
                if (begin > first_bad.load()) break;
                const std::uint64_t end = std::min(config.replicates, begin + kChunk);
                auto& acc = partial[c];
                acc.assign(config.estimators.size() + 1, Accumulator{});
                for (std::uint64_t r = begin; r < end; ++r) {
                    auto rng = make_stream(config.seed, StreamDomain::Replicate, r);
                    const auto stats = compute_sample_stats(pop, drawer.draw(config.n, rng));
                    if (!evaluate_sample(stats, params, config.estimators, acc) &&
                        config.degenerate_policy == DegeneratePolicy::Error) {
                        std::uint64_t seen = first_bad.load();
                        while (r < seen && !first_bad.compare_exchange_weak(seen, r)) {
                        }
                        break;
                    }
                }
            }
        } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next_chunk = chunks;
        }
    };

    unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    if (failure) std::rethrow_exception(failure);
    if (const auto bad = first_bad.load(); bad != kNone) {
        throw DegenerateSampleError("degenerate sample at replicate " + std::to_string(bad) +
                                        " (sampled attribute constant or estimator undefined)",
                                    bad);
    }

    AccumulatorSet total(config.estimators.size() + 1);
    for (const auto& acc : partial) {
        for (std::size_t k = 0; k < total.size(); ++k) total[k].merge(acc[k]);
    }
    return summarize(total, config.estimators, params, config.n, config.replicates, false);
}

FinitePopulation synthesize_population(const SyntheticSpec& spec, std::uint64_t seed)
{
    if (spec.N < 2) throw Error(ErrorKind::InvalidSpec, "synthetic N must be at least 2");
    if (!(spec.P_target > 0.0 && spec.P_target < 1.0)) {
        throw Error(ErrorKind::InvalidSpec, "synthetic P must lie in (0,1)");
    }
    if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd) || !std::isfinite(spec.intercept) ||
        !std::isfinite(spec.attribute_effect)) {
        throw Error(ErrorKind::InvalidSpec, "synthetic intercept/effect/noise must be finite, noise >= 0");
    }
    const auto ones = static_cast<std::uint64_t>(std::llround(static_cast<double>(spec.N) * spec.P_target));
    if (ones < 1 || ones > spec.N - 1) {
        throw Error(ErrorKind::InvalidSpec, "round(N * P) = " + std::to_string(ones) + " must lie in [1, N-1]");
    }

    auto rng = make_stream(seed, StreamDomain::Synthesis, 0);
    const auto N = static_cast<std::size_t>(spec.N);
    std::vector<std::uint8_t> phi(N, 0);
    for (const auto i : draw_srswor_indices(N, static_cast<std::size_t>(ones), rng)) phi[i] = 1;

    std::vector<double> y(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double noise = spec.noise_sd > 0.0 ? spec.noise_sd * standard_normal(rng) : 0.0;
        y[i] = spec.intercept + spec.attribute_effect * static_cast<double>(phi[i]) + noise;
    }
    return FinitePopulation(std::move(y), std::move(phi));
}

}  // namespace estlab
