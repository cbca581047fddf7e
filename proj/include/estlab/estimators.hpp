#pragma once

#include "estlab/population.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace estlab {

/// Units drawn into one sample.
struct SampleData {
    std::vector<double> y;
    std::vector<std::uint8_t> phi;

    [[nodiscard]] std::size_t size() const noexcept { return y.size(); }
};

/// Per-sample statistics feeding every estimator. Variances use divisor n-1
/// and the covariance is centred at the sample mean of y.
struct SampleStats {
    double ybar = 0.0;
    double p = 0.0;
    double s_phi2 = 0.0;
    double s_yphi = 0.0;
    /// s_yphi / s_phi2; empty when the sampled attribute is constant.
    std::optional<double> b_phi;
    std::size_t n = 0;
};

[[nodiscard]] SampleStats compute_sample_stats(const SampleData& s);
/// Same statistics for the units at `indices` (0-based) of `pop`.
[[nodiscard]] SampleStats compute_sample_stats(const FinitePopulation& pop,
                                               std::span<const std::size_t> indices);

/// A constant of the generalized form: either a known attribute parameter
/// or a literal real.
class ParamValue {
public:
    enum class Kind { One, Beta2Phi, Cp, RhoPb, Literal };

    constexpr ParamValue() = default;
    constexpr ParamValue(Kind kind) : kind_(kind) {}  // NOLINT(google-explicit-constructor)
    static constexpr ParamValue literal(double v)
    {
        ParamValue out(Kind::Literal);
        out.value_ = v;
        return out;
    }

    [[nodiscard]] constexpr Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double resolve(const PopulationParams& params) const noexcept;
    [[nodiscard]] std::string describe() const;

    friend constexpr bool operator==(const ParamValue&, const ParamValue&) = default;

private:
    Kind kind_ = Kind::One;
    double value_ = 0.0;
};

enum class SlopeMode {
    Sample,  ///< b_phi from the sample (the difference-cum-ratio correction)
    Zero,    ///< b_phi forced to 0: the pure ratio form
};

/// t = (ybar + b_phi (P - p)) / (m1 p + m2) * (m1 P + m2)
struct EstimatorForm {
    ParamValue m1 = ParamValue::Kind::One;
    ParamValue m2 = ParamValue::literal(0.0);
    SlopeMode slope = SlopeMode::Sample;

    friend constexpr bool operator==(const EstimatorForm&, const EstimatorForm&) = default;
};

/// Named estimators. `Mean` is the plain sample mean, carried as the
/// benchmark every efficiency is measured against.
enum class EstimatorId { Mean, NG, T1, T2, T3, T4, T5, T6, T7, T8, T9, T10 };

inline constexpr std::array<EstimatorId, 12> kAllEstimators = {
    EstimatorId::Mean, EstimatorId::NG, EstimatorId::T1, EstimatorId::T2,
    EstimatorId::T3,   EstimatorId::T4, EstimatorId::T5, EstimatorId::T6,
    EstimatorId::T7,   EstimatorId::T8, EstimatorId::T9, EstimatorId::T10,
};

inline constexpr std::array<EstimatorId, 10> kProposedEstimators = {
    EstimatorId::T1, EstimatorId::T2, EstimatorId::T3, EstimatorId::T4, EstimatorId::T5,
    EstimatorId::T6, EstimatorId::T7, EstimatorId::T8, EstimatorId::T9, EstimatorId::T10,
};

[[nodiscard]] std::string_view to_string(EstimatorId id) noexcept;
/// Accepts "mean", "ng", "t1".."t10" (case-insensitive).
[[nodiscard]] std::optional<EstimatorId> parse_estimator_id(std::string_view text);
[[nodiscard]] constexpr std::size_t index_of(EstimatorId id) noexcept { return static_cast<std::size_t>(id); }
[[nodiscard]] constexpr bool is_proposed(EstimatorId id) noexcept { return index_of(id) >= index_of(EstimatorId::T1); }

/// (m1, m2) of t1..t10. T1 is (1, 0): the formula ybar-corrected over p alone.
/// Throws Error(InvalidForm) for Mean and NG, which are not members of the family.
[[nodiscard]] EstimatorForm form_of(EstimatorId id);

/// ybar * P / p. Throws UndefinedEstimate when p == 0.
[[nodiscard]] double estimate_naik_gupta(const SampleStats& stats, double P);

/// (ybar + b_phi (P - p)) / p, the ratio R* behind t1.
[[nodiscard]] double ratio_r_star(const SampleStats& stats, double P);

/// Throws InvalidForm when m1 is a literal zero. A symbolic m1 may resolve to
/// zero (e.g. rho = 0), which leaves the regression estimator ybar + b (P - p).
void require_valid_m1(const EstimatorForm& form);

/// Evaluates the generalized form with m1, m2 resolved from `params`.
/// Throws InvalidForm (literal m1 == 0), UndefinedEstimate (m1 p + m2 == 0) or
/// DegenerateSample (b_phi undefined while p != P).
[[nodiscard]] double estimate_general(const SampleStats& stats, const PopulationParams& params,
                                      const EstimatorForm& form);

[[nodiscard]] double estimate_named(const SampleStats& stats, const PopulationParams& params,
                                    EstimatorId id);

/// A named estimator or an ad-hoc member of the family, as used by the
/// simulation engine and the cli.
struct Estimator {
    std::string label;
    std::variant<EstimatorId, EstimatorForm> rule;

    static Estimator named(EstimatorId id);
    static Estimator custom(std::string label, EstimatorForm form);

    [[nodiscard]] double evaluate(const SampleStats& stats, const PopulationParams& params) const;
    /// True for everything but the sample mean, which is defined on any sample.
    [[nodiscard]] bool uses_attribute() const noexcept;
};

}  // namespace estlab
