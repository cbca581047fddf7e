#include "estlab/error.hpp"
#include "estlab/simulation.hpp"
#include "estlab/theory.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

using namespace estlab;
using estlab::testing::rel_diff;

namespace {

std::vector<Estimator> named(std::initializer_list<EstimatorId> ids)
{
    std::vector<Estimator> out;
    for (const auto id : ids) out.push_back(Estimator::named(id));
    return out;
}

std::vector<Estimator> all_named()
{
    std::vector<Estimator> out;
    for (const auto id : kAllEstimators) out.push_back(Estimator::named(id));
    return out;
}

// Brute force over bitmasks with the estimators written out directly; shares
// nothing with the library beyond compute_params.
struct Brute {
    double mean = 0.0;
    double mse = 0.0;
    std::uint64_t kept = 0;
    std::uint64_t skipped = 0;
};

Brute brute_force(const FinitePopulation& pop, unsigned n, const PopulationParams& params, EstimatorId id)
{
    const unsigned N = static_cast<unsigned>(pop.size());
    double sum = 0.0, sq = 0.0;
    Brute out;
    for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
        if (static_cast<unsigned>(std::popcount(mask)) != n) continue;
        double sy = 0.0, a = 0.0;
        for (unsigned i = 0; i < N; ++i) {
            if (mask >> i & 1u) {
                sy += pop.y()[i];
                a += pop.phi()[i];
            }
        }
        const double ybar = sy / n, p = a / n;
        double spp = 0.0, spy = 0.0;
        for (unsigned i = 0; i < N; ++i) {
            if (mask >> i & 1u) {
                spp += (pop.phi()[i] - p) * (pop.phi()[i] - p);
                spy += (pop.phi()[i] - p) * (pop.y()[i] - ybar);
            }
        }
        double t = ybar;
        if (id != EstimatorId::Mean) {
            if (a == 0.0 || a == n) {
                ++out.skipped;
                continue;
            }
            if (id == EstimatorId::NG) {
                t = ybar * params.P / p;
            } else {
                const auto f = form_of(id);
                const double m1 = f.m1.resolve(params), m2 = f.m2.resolve(params);
                t = (ybar + spy / spp * (params.P - p)) * (m1 * params.P + m2) / (m1 * p + m2);
            }
        }
        sum += t;
        sq += (t - params.Ybar) * (t - params.Ybar);
        ++out.kept;
    }
    out.mean = sum / out.kept;
    out.mse = sq / out.kept;
    return out;
}

}  // namespace

TEST_CASE("binomial")
{
    CHECK(binomial(4, 2).value == 6);
    CHECK(binomial(12, 4).value == 495);
    CHECK(binomial(30, 15).value == 155117520);
    CHECK(binomial(5, 7).value == 0);
    CHECK(binomial(67, 33).value == 14226520737620288370ULL);
    CHECK_FALSE(binomial(67, 33).saturated);
    CHECK(binomial(68, 34).saturated);
}

TEST_CASE("draw_srswor")
{
    auto rng = make_stream(5, 0);
    auto census = draw_srswor_indices(9, 9, rng);
    std::ranges::sort(census);
    for (std::size_t i = 0; i < 9; ++i) CHECK(census[i] == i);

    auto one = draw_srswor_indices(9, 4, rng);
    CHECK(std::set<std::size_t>(one.begin(), one.end()).size() == 4);

    CHECK_THROWS_AS((void)draw_srswor_indices(5, 6, rng), Error);
    CHECK_THROWS_AS((void)draw_srswor_indices(5, 0, rng), Error);

    const FinitePopulation pop({1, 2, 3, 4, 5}, {0, 1, 0, 1, 1});
    const auto s = draw_srswor(pop, 5, rng);
    CHECK(s.size() == 5);
    double total = 0.0;
    for (const double v : s.y) total += v;
    CHECK(total == 15.0);

    auto a = make_stream(11, 3);
    auto b = make_stream(11, 3);
    CHECK(draw_srswor_indices(100, 10, a) == draw_srswor_indices(100, 10, b));
}

TEST_CASE("draw_srswor inclusion frequencies")
{
    // N = 10, n = 3: every unit is included with probability 0.3, and every
    // pair with probability 3*2/(10*9) = 1/15.
    const int draws = 100000;
    std::vector<int> hits(10, 0);
    int pair01 = 0;
    for (int r = 0; r < draws; ++r) {
        auto rng = make_stream(77, r);
        const auto s = draw_srswor_indices(10, 3, rng);
        bool has0 = false, has1 = false;
        for (const auto i : s) {
            ++hits[i];
            has0 |= i == 0;
            has1 |= i == 1;
        }
        pair01 += has0 && has1;
    }
    const double se = std::sqrt(0.3 * 0.7 / draws);
    for (const int h : hits) CHECK(std::abs(static_cast<double>(h) / draws - 0.3) < 3.5 * se);
    const double pse = std::sqrt(1.0 / 15 * 14.0 / 15 / draws);
    CHECK(std::abs(static_cast<double>(pair01) / draws - 1.0 / 15) < 3.5 * pse);
}

TEST_CASE("enumeration on the four-unit population")
{
    // Subsets of {1,2,3,4} with phi = (0,0,1,1), n = 2:
    //   {1,2} and {3,4} have a constant attribute (skipped);
    //   the other four have p = P = 0.5, so every estimator equals ybar:
    //   2, 2.5, 2.5, 3.
    const FinitePopulation pop({1, 2, 3, 4}, {0, 0, 1, 1});
    const auto res = enumerate_all_samples(pop, 2, all_named());
    CHECK(res.exhaustive);
    CHECK(res.replicates == 6);
    CHECK(res.true_mean == 2.5);

    const auto* mean = res.find("mean");
    REQUIRE(mean != nullptr);
    CHECK(mean->effective_replicates == 6);
    CHECK(mean->degenerate_count == 0);
    CHECK(mean->empirical_bias == doctest::Approx(0.0).epsilon(1e-15));
    // (1 + .25 + 0 + 0 + .25 + 1) / 6, also ((1-f)/n) S_y^2 = (1/4)(5/3).
    CHECK(mean->empirical_mse == doctest::Approx(5.0 / 12.0).epsilon(1e-15));
    CHECK(res.baseline_mse == doctest::Approx(5.0 / 12.0).epsilon(1e-15));
    CHECK(mean->empirical_pre == doctest::Approx(100.0));

    for (const char* label : {"ng", "t1", "t2", "t5", "t10"}) {
        const auto* row = res.find(label);
        REQUIRE(row != nullptr);
        CHECK(row->effective_replicates == 4);
        CHECK(row->degenerate_count == 2);
        CHECK(row->empirical_mean == doctest::Approx(2.5));
        CHECK(row->empirical_mse == doctest::Approx(0.125));
        CHECK(row->empirical_pre == doctest::Approx(100.0 * (5.0 / 12.0) / 0.125));
        CHECK(row->mse_standard_error == 0.0);
    }
    CHECK(res.find("nope") == nullptr);
}

TEST_CASE("enumeration against an independent brute force")
{
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t N = 7 + trial % 5;
        const auto pop = estlab::testing::random_population(gen, N);
        const auto params = compute_params(pop);
        const unsigned n = 2 + static_cast<unsigned>(trial % 4);
        const auto res = enumerate_all_samples(pop, n, all_named());
        CHECK(res.replicates == binomial(N, n).value);

        // The skip count is C(N-A, n) + C(A, n).
        const auto A = pop.attribute_count();
        const auto expected_skips = binomial(N - A, n).value + binomial(A, n).value;

        for (const auto id : kAllEstimators) {
            const auto* row = res.find(to_string(id));
            REQUIRE(row != nullptr);
            const auto brute = brute_force(pop, n, params, id);
            CHECK(row->effective_replicates == brute.kept);
            CHECK(row->degenerate_count == brute.skipped);
            if (id != EstimatorId::Mean) CHECK(row->degenerate_count == expected_skips);
            CHECK(rel_diff(row->empirical_mean, brute.mean) < 1e-12);
            CHECK(rel_diff(row->empirical_mse, brute.mse) < 1e-10);
        }

        // The sample mean is exactly unbiased with variance ((1-f)/n) S_y^2.
        const auto* mean = res.find("mean");
        CHECK(std::abs(mean->empirical_bias) < 1e-12 * params.Ybar);
        CHECK(rel_diff(mean->empirical_mse, variance_sample_mean(params, n)) < 1e-10);
    }
}

TEST_CASE("enumeration policies and guards")
{
    const FinitePopulation pop({1, 2, 3, 4}, {0, 0, 1, 1});
    try {
        (void)enumerate_all_samples(pop, 2, named({EstimatorId::T2}), DegeneratePolicy::Error);
        FAIL("expected DegenerateSampleError");
    } catch (const DegenerateSampleError& e) {
        // {1,2} is the first subset in lexicographic order.
        REQUIRE(e.replicate().has_value());
        CHECK(*e.replicate() == 0);
    }
    // The sample mean alone never degenerates.
    CHECK_NOTHROW((void)enumerate_all_samples(pop, 2, named({EstimatorId::Mean}), DegeneratePolicy::Error));

    std::vector<double> y(30);
    std::vector<std::uint8_t> phi(30);
    for (std::size_t i = 0; i < 30; ++i) {
        y[i] = static_cast<double>(i);
        phi[i] = i % 2;
    }
    const FinitePopulation big(std::move(y), std::move(phi));
    try {
        (void)enumerate_all_samples(big, 15, all_named());
        FAIL("expected TooManySamplesError");
    } catch (const TooManySamplesError& e) {
        CHECK(e.count() == 155117520);
        CHECK(e.kind() == ErrorKind::TooManySamples);
        CHECK(std::string(e.what()).find("155117520") != std::string::npos);
    }

    CHECK_THROWS_AS((void)enumerate_all_samples(pop, 4, all_named()), Error);
    CHECK_THROWS_AS((void)enumerate_all_samples(pop, 1, all_named()), Error);

    const std::vector<Estimator> bad = {Estimator::custom("bad", {ParamValue::literal(0.0), ParamValue::Kind::Cp})};
    CHECK_THROWS_AS((void)enumerate_all_samples(pop, 2, bad), Error);
}

TEST_CASE("monte carlo is reproducible across runs and thread counts")
{
    const auto pop = synthesize_population({300, 0.2, 10.0, 2.0, 1.0}, 8);
    SimConfig cfg;
    cfg.n = 15;
    cfg.replicates = 20000;
    cfg.seed = 123;
    cfg.estimators = all_named();
    cfg.threads = 1;
    const auto a = monte_carlo(pop, cfg);
    const auto b = monte_carlo(pop, cfg);
    cfg.threads = 4;
    const auto c = monte_carlo(pop, cfg);
    REQUIRE(a.rows.size() == kAllEstimators.size());
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        for (const auto* other : {&b, &c}) {
            const auto& x = a.rows[k];
            const auto& y = other->rows[k];
            CHECK(x.empirical_mean == y.empirical_mean);
            CHECK(x.empirical_mse == y.empirical_mse);
            CHECK(x.mse_standard_error == y.mse_standard_error);
            CHECK(x.degenerate_count == y.degenerate_count);
        }
    }
    CHECK(a.baseline_mse == c.baseline_mse);

    cfg.seed = 124;
    const auto d = monte_carlo(pop, cfg);
    CHECK(d.rows[0].empirical_mse != a.rows[0].empirical_mse);

    // Skip accounting: mean rows see every replicate; the rest add up.
    for (const auto& row : a.rows) CHECK(row.effective_replicates + row.degenerate_count == cfg.replicates);
    CHECK(a.find("mean")->degenerate_count == 0);
}

TEST_CASE("monte carlo degenerate policy")
{
    // N = 6 with a single 1: about half of the n = 3 samples miss it.
    const FinitePopulation pop({1, 2, 3, 4, 5, 9}, {0, 0, 0, 0, 0, 1});
    SimConfig cfg;
    cfg.n = 3;
    cfg.replicates = 5000;
    cfg.seed = 4;
    cfg.estimators = named({EstimatorId::Mean, EstimatorId::T1});
    const auto skipped = monte_carlo(pop, cfg);
    const auto* t1 = skipped.find("t1");
    CHECK(t1->degenerate_count > 2000);
    CHECK(t1->degenerate_count < 3000);

    cfg.degenerate_policy = DegeneratePolicy::Error;
    std::uint64_t first = 0;
    for (std::uint64_t r = 0;; ++r) {
        auto rng = make_stream(cfg.seed, StreamDomain::Replicate, r);
        const auto idx = draw_srswor_indices(6, 3, rng);
        if (std::ranges::find(idx, std::size_t{5}) == idx.end()) {
            first = r;
            break;
        }
    }
    for (const unsigned threads : {1u, 3u}) {
        cfg.threads = threads;
        try {
            (void)monte_carlo(pop, cfg);
            FAIL("expected DegenerateSampleError");
        } catch (const DegenerateSampleError& e) {
            REQUIRE(e.replicate().has_value());
            CHECK(*e.replicate() == first);
        }
    }

    cfg.replicates = 0;
    CHECK_THROWS_AS((void)monte_carlo(pop, cfg), Error);
}

TEST_CASE("ratio form with a zero slope replays the Naik-Gupta estimator")
{
    const auto pop = synthesize_population({200, 0.3, 10.0, 3.0, 1.0}, 17);
    EstimatorForm ratio = form_of(EstimatorId::T1);
    ratio.slope = SlopeMode::Zero;
    SimConfig cfg;
    cfg.n = 20;
    cfg.replicates = 10000;
    cfg.seed = 9;
    cfg.estimators = {Estimator::named(EstimatorId::NG), Estimator::custom("ratio", ratio)};
    const auto res = monte_carlo(pop, cfg);
    const auto* ng = res.find("ng");
    const auto* r = res.find("ratio");
    CHECK(ng->empirical_mean == r->empirical_mean);
    CHECK(ng->empirical_mse == r->empirical_mse);
    CHECK(ng->degenerate_count == r->degenerate_count);
}

TEST_CASE("synthesize_population")
{
    const auto pop = synthesize_population({100, 0.5, 10.0, 2.0, 1.0}, 1);
    CHECK(pop.size() == 100);
    CHECK(pop.attribute_count() == 50);
    CHECK(synthesize_population({101, 0.3, 10.0, 2.0, 1.0}, 1).attribute_count() == 30);

    const auto again = synthesize_population({100, 0.5, 10.0, 2.0, 1.0}, 1);
    CHECK(std::ranges::equal(pop.y(), again.y()));
    CHECK(std::ranges::equal(pop.phi(), again.phi()));
    const auto other = synthesize_population({100, 0.5, 10.0, 2.0, 1.0}, 2);
    CHECK_FALSE(std::ranges::equal(pop.y(), other.y()));

    // No noise: y is an exact linear function of phi.
    const auto exact = compute_params(synthesize_population({50, 0.4, 5.0, 2.0, 0.0}, 3));
    CHECK(exact.rho_pb == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(exact.Ybar == doctest::Approx(5.0 + 2.0 * 0.4).epsilon(1e-14));

    // No noise and no effect: constant y, rejected when parameters are computed.
    const auto flat = synthesize_population({50, 0.4, 5.0, 0.0, 0.0}, 3);
    CHECK_THROWS_AS((void)compute_params(flat), Error);

    // Noise only: the sample correlation is near zero.
    const auto noise = compute_params(synthesize_population({20000, 0.5, 10.0, 0.0, 1.0}, 4));
    CHECK(std::abs(noise.rho_pb) < 0.03);
    CHECK(noise.S_y2 == doctest::Approx(1.0).epsilon(0.03));

    CHECK_THROWS_AS((void)synthesize_population({1, 0.5, 10.0, 1.0, 1.0}, 0), Error);
    CHECK_THROWS_AS((void)synthesize_population({10, 1.0, 10.0, 1.0, 1.0}, 0), Error);
    CHECK_THROWS_AS((void)synthesize_population({10, 0.01, 10.0, 1.0, 1.0}, 0), Error);
    CHECK_THROWS_AS((void)synthesize_population({10, 0.5, 10.0, 1.0, -1.0}, 0), Error);
}

TEST_CASE("monte carlo converges to the first-order MSE")
{
    for (const std::uint64_t N : {100u, 400u}) {
        // y close to proportional to phi keeps the ratio estimator's higher-order terms small.
        const auto pop = synthesize_population({N, 0.7, 0.0, 2.0, 0.5}, N);
        const auto params = compute_params(pop);
        for (const std::uint64_t n : {10u, 40u}) {
            SimConfig cfg;
            cfg.n = n;
            cfg.replicates = 40000;
            cfg.seed = 1000 + n;
            cfg.estimators = named({EstimatorId::Mean, EstimatorId::NG, EstimatorId::T2, EstimatorId::T10});
            const auto res = monte_carlo(pop, cfg);
            const auto* mean = res.find("mean");
            // The mean has no approximation error; only Monte Carlo noise.
            CHECK(std::abs(mean->empirical_mse - variance_sample_mean(params, n)) < 4.0 * mean->mse_standard_error);
            CHECK(std::abs(mean->empirical_bias) < 4.0 * std::sqrt(variance_sample_mean(params, n) / 40000.0));

            // Second-order terms shrink with n; allow 20% at n = 10 and 10% at n = 40.
            const double tol = n == 10 ? 0.20 : 0.10;
            for (const auto id : {EstimatorId::T2, EstimatorId::T10}) {
                const auto* row = res.find(to_string(id));
                CHECK(rel_diff(row->empirical_mse, mse_proposed(params, n, id)) < tol);
            }
            CHECK(rel_diff(res.find("ng")->empirical_mse, mse_naik_gupta(params, n)) < tol);
        }
    }
}
