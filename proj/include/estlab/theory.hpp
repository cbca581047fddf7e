#pragma once

#include "estlab/estimators.hpp"
#include "estlab/population.hpp"

#include <cstdint>
#include <vector>

namespace estlab {

/// Which closed form backs the MSE of t1..t10.
enum class MseConvention {
    /// First-order Taylor MSE: ((1-f)/n)[R_i^2 S_phi^2 + S_y^2 (1 - rho^2)].
    FirstOrder,
    /// The forms the published efficiency table was computed with:
    /// R_1^2 for t1, R_i unsquared for t2..t10. Dimensionally inconsistent;
    /// kept only to reproduce the published numbers.
    Published,
};

struct RatioConstant {
    EstimatorId estimator = EstimatorId::T1;
    double value = 0.0;
};

/// Ybar * m1 / (m1 P + m2). NG uses R_1 = Ybar / P.
/// Throws UndefinedConstant on a zero denominator, InvalidForm for Mean.
[[nodiscard]] double ratio_constant(EstimatorId id, const PopulationParams& params);
[[nodiscard]] double ratio_constant(const EstimatorForm& form, const PopulationParams& params);

/// ((1-f)/n)[S_y^2 + R_1^2 S_phi^2 - 2 R_1 S_yphi]
[[nodiscard]] double mse_naik_gupta(const PopulationParams& params, std::uint64_t n);

[[nodiscard]] double mse_proposed(const PopulationParams& params, std::uint64_t n, EstimatorId id,
                                  MseConvention convention = MseConvention::FirstOrder);
/// First-order MSE of a sample-slope member of the family.
[[nodiscard]] double mse_proposed(const PopulationParams& params, std::uint64_t n, const EstimatorForm& form);

/// MSE assembled from the linearization t - Ybar ~ (ybar - Ybar) - (R + B)(p - P):
/// ((1-f)/n)[S_y^2 + (R+B)^2 S_phi^2 - 2(R+B) S_yphi]. B is zero for SlopeMode::Zero.
[[nodiscard]] double mse_from_linearization(const PopulationParams& params, std::uint64_t n,
                                            const EstimatorForm& form);

struct LinearizationCoefficients {
    double coef_p = 0.0;
    double coef_ybar = 1.0;
};

[[nodiscard]] LinearizationCoefficients linearization_coefficients(const PopulationParams& params,
                                                                   const EstimatorForm& form);

/// First-order MSE of any named or custom estimator (Mean -> V(ybar)).
[[nodiscard]] double theoretical_mse(const PopulationParams& params, std::uint64_t n, const Estimator& est);

/// 100 V(ybar) / MSE. The (1-f)/n factor cancels, so no N is needed.
/// Throws UndefinedPre when the MSE is not positive.
[[nodiscard]] double pre_vs_mean(const PopulationParams& params, EstimatorId id,
                                 MseConvention convention = MseConvention::FirstOrder);
/// Same value; validates n against N first.
[[nodiscard]] double pre_vs_mean(const PopulationParams& params, std::uint64_t n, EstimatorId id,
                                 MseConvention convention = MseConvention::FirstOrder);

struct MseReport {
    EstimatorId estimator = EstimatorId::Mean;
    double mse = 0.0;
    std::uint64_t n = 0;
    double pre_vs_mean = 0.0;
};

[[nodiscard]] MseReport mse_report(const PopulationParams& params, std::uint64_t n, EstimatorId id,
                                   MseConvention convention = MseConvention::FirstOrder);

struct EfficiencyReport {
    EstimatorId estimator = EstimatorId::T1;
    bool beats_mean = false;
    bool beats_ng = false;
    /// V(ybar) - MSE(t_i) at the n = 1, f = 0 normalization.
    double margin_vs_mean = 0.0;
    /// MSE(t_NG) - MSE(t_i) at the same normalization.
    double margin_vs_ng = 0.0;
    double k_yp = 0.0;
    /// rho^2 > (S_phi^2 / S_y^2) R_i^2
    bool printed_vs_mean = false;
    /// rho^2 >= (S_phi^2 / S_y^2)[R_i^2 - R_1^2 + 2 R_1 K_yp], the bracket as
    /// usually printed. Diagnostic only: the K_yp term is short a factor R_1.
    bool printed_vs_ng = false;
    [[nodiscard]] bool printed_vs_mean_agrees() const noexcept { return printed_vs_mean == beats_mean; }
    [[nodiscard]] bool printed_vs_ng_agrees() const noexcept { return printed_vs_ng == beats_ng; }
};

struct EfficiencyCheck {
    bool holds = false;     ///< direct MSE difference > 0 (vs mean) or >= 0 (vs NG)
    double margin = 0.0;    ///< the direct difference, n = 1 and f = 0
    bool printed_holds = false;
};

/// V(ybar) - MSE(t_i) > 0, also evaluated as rho^2 > (S_phi^2/S_y^2) R_i^2.
[[nodiscard]] EfficiencyCheck efficiency_vs_mean(const PopulationParams& params, EstimatorId id);
/// MSE(t_NG) - MSE(t_i) >= 0. printed_holds carries the diagnostic bracket form.
[[nodiscard]] EfficiencyCheck efficiency_vs_ng(const PopulationParams& params, EstimatorId id);

[[nodiscard]] EfficiencyReport efficiency_report(const PopulationParams& params, EstimatorId id);

struct PreRow {
    EstimatorId estimator = EstimatorId::Mean;
    double pre = 0.0;
};

struct PreTable {
    /// Mean, NG, t1..t10 in that fixed order.
    std::vector<PreRow> rows;

    /// Rows sorted by PRE descending, ties broken by estimator order.
    [[nodiscard]] std::vector<PreRow> ranked() const;
};

[[nodiscard]] PreTable pre_table(const PopulationParams& params,
                                 MseConvention convention = MseConvention::FirstOrder);

}  // namespace estlab
