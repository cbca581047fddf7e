#pragma once

// Test-only helpers: random generators for property tests (std::mt19937_64,
// independent of the library's own streams) and the published study moments.

#include "estlab/population.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace estlab::testing {

inline Moments published_moments()
{
    Moments m;
    m.Ybar = 3.36;
    m.P = 0.1236;
    m.rho_pb = 0.766;
    m.C_y = 0.604;
    m.C_p = 2.19;
    m.beta2_phi = 6.23181;
    m.N = 89;
    return m;
}

inline double rel_diff(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Random binary attribute with at least one 0 and one 1.
inline std::vector<std::uint8_t> random_attribute(std::mt19937_64& gen, std::size_t N)
{
    std::bernoulli_distribution coin(std::uniform_real_distribution<double>(0.1, 0.9)(gen));
    std::vector<std::uint8_t> phi(N);
    for (auto& v : phi) v = coin(gen) ? 1 : 0;
    phi[0] = 0;
    phi[1] = 1;
    std::shuffle(phi.begin(), phi.end(), gen);
    return phi;
}

inline FinitePopulation random_population(std::mt19937_64& gen, std::size_t N)
{
    auto phi = random_attribute(gen, N);
    std::normal_distribution<double> noise(0.0, std::uniform_real_distribution<double>(0.2, 3.0)(gen));
    const double base = std::uniform_real_distribution<double>(2.0, 50.0)(gen);
    const double effect = std::uniform_real_distribution<double>(-5.0, 10.0)(gen);
    std::vector<double> y(N);
    for (std::size_t i = 0; i < N; ++i) y[i] = base + effect * phi[i] + noise(gen);
    return FinitePopulation(std::move(y), std::move(phi));
}

/// Valid summary moments spread over the region where every named form is defined.
inline Moments random_moments(std::mt19937_64& gen)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Moments m;
    m.Ybar = 0.5 + 50.0 * u(gen);
    m.P = 0.05 + 0.9 * u(gen);
    m.rho_pb = 0.1 + 0.85 * u(gen);
    m.C_y = 0.05 + 1.5 * u(gen);
    m.C_p = std::sqrt((1.0 - m.P) / m.P) * (0.8 + 0.4 * u(gen));
    m.N = 20 + static_cast<std::uint64_t>(400 * u(gen));
    return m;
}

}  // namespace estlab::testing
