#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace estlab {

/// Paired study variable y and binary attribute phi for every unit of a
/// finite population. Immutable once constructed.
class FinitePopulation {
public:
    /// Throws Error(InvalidPopulation) on length mismatch, N < 2 or a phi
    /// value other than 0/1.
    FinitePopulation(std::vector<double> y, std::vector<std::uint8_t> phi);

    [[nodiscard]] std::span<const double> y() const noexcept { return y_; }
    [[nodiscard]] std::span<const std::uint8_t> phi() const noexcept { return phi_; }
    [[nodiscard]] std::size_t size() const noexcept { return y_.size(); }
    /// Number of units possessing the attribute (A).
    [[nodiscard]] std::size_t attribute_count() const noexcept { return attribute_count_; }

private:
    std::vector<double> y_;
    std::vector<std::uint8_t> phi_;
    std::size_t attribute_count_ = 0;
};

enum class Beta2Source { ClosedForm, Given };

/// Population moments and the derived constants the estimators and their
/// MSE theory depend on. All variances use divisor N-1.
struct PopulationParams {
    double Ybar = 0.0;
    double P = 0.0;
    double Q = 0.0;
    double S_y2 = 0.0;
    double S_phi2 = 0.0;
    double S_yphi = 0.0;
    double rho_pb = 0.0;
    double C_y = 0.0;
    double C_p = 0.0;
    double beta2_phi = 0.0;
    Beta2Source beta2_source = Beta2Source::ClosedForm;
    /// Absent when the parameters were built from summary moments without N.
    std::optional<std::uint64_t> N;

    /// Population regression coefficient of y on phi, S_yphi / S_phi2.
    [[nodiscard]] double B_phi() const noexcept { return S_yphi / S_phi2; }
};

/// Kurtosis of a Bernoulli(P) indicator, (1 - 3PQ)/(PQ).
[[nodiscard]] double bernoulli_kurtosis(double P) noexcept;

/// Reads the `y,phi` CSV format. Errors are ParseError naming the line.
[[nodiscard]] FinitePopulation load_population(std::istream& source);

/// Throws Error(DegeneratePopulation) when phi or y is constant.
[[nodiscard]] PopulationParams compute_params(const FinitePopulation& pop);

struct Moments {
    double Ybar = 0.0;
    double P = 0.0;
    double rho_pb = 0.0;
    double C_y = 0.0;
    double C_p = 0.0;
    std::optional<double> beta2_phi;
    std::optional<std::uint64_t> N;
};

/// Rebuilds the full parameter set from published summary moments:
/// S_y = C_y*Ybar, S_phi = C_p*P, S_yphi = rho*S_y*S_phi.
[[nodiscard]] PopulationParams params_from_moments(const Moments& m);

/// The summary moments that params_from_moments would need to rebuild `params`.
[[nodiscard]] Moments extract_moments(const PopulationParams& params);

/// ((1-f)/n) with f = n/N. Requires N; throws InvalidSampleSize unless 1 <= n <= N.
[[nodiscard]] double design_factor(const PopulationParams& params, std::uint64_t n);

/// V(ybar) = ((1-f)/n) S_y^2 under SRSWOR.
[[nodiscard]] double variance_sample_mean(const PopulationParams& params, std::uint64_t n);

}  // namespace estlab
