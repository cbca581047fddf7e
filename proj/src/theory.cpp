#include "estlab/theory.hpp"

#include "estlab/error.hpp"

#include <algorithm>
#include <string>

namespace estlab {

namespace {

// Every MSE below is (1-f)/n times a bracket; the brackets are what PRE and
// the efficiency margins compare.

double bracket_mean(const PopulationParams& p) { return p.S_y2; }

double bracket_ng(const PopulationParams& p)
{
    const double R1 = p.Ybar / p.P;
    return p.S_y2 + R1 * R1 * p.S_phi2 - 2.0 * R1 * p.S_yphi;
}

double bracket_first_order(const PopulationParams& p, double R)
{
    return R * R * p.S_phi2 + p.S_y2 * (1.0 - p.rho_pb * p.rho_pb);
}

double bracket_proposed(const PopulationParams& p, EstimatorId id, MseConvention convention)
{
    const double R = ratio_constant(id, p);
    if (convention == MseConvention::Published && id != EstimatorId::T1) {
        return R * p.S_phi2 + p.S_y2 * (1.0 - p.rho_pb * p.rho_pb);
    }
    return bracket_first_order(p, R);
}

double bracket_linearized(const PopulationParams& p, const EstimatorForm& form)
{
    if (!(p.S_phi2 > 0.0)) {
        throw Error(ErrorKind::DegeneratePopulation, "S_phi^2 = 0: attribute carries no variation");
    }
    const double R = ratio_constant(form, p);
    const double B = form.slope == SlopeMode::Sample ? p.B_phi() : 0.0;
    const double c = R + B;
    return p.S_y2 + c * c * p.S_phi2 - 2.0 * c * p.S_yphi;
}

double bracket_of(const PopulationParams& p, EstimatorId id, MseConvention convention)
{
    switch (id) {
    case EstimatorId::Mean: return bracket_mean(p);
    case EstimatorId::NG: return bracket_ng(p);
    default: return bracket_proposed(p, id, convention);
    }
}

void require_proposed(EstimatorId id, const char* op)
{
    if (!is_proposed(id)) {
        throw Error(ErrorKind::InvalidForm, std::string(op) + " is defined for t1..t10, got " +
                                                std::string(to_string(id)));
    }
}

}  // namespace

double ratio_constant(const EstimatorForm& form, const PopulationParams& params)
{
    require_valid_m1(form);
    const double m1 = form.m1.resolve(params);
    const double m2 = form.m2.resolve(params);
    const double denom = m1 * params.P + m2;
    if (denom == 0.0) throw Error(ErrorKind::UndefinedConstant, "m1 P + m2 = 0");
    return params.Ybar * m1 / denom;
}

double ratio_constant(EstimatorId id, const PopulationParams& params)
{
    if (id == EstimatorId::NG) return params.Ybar / params.P;
    return ratio_constant(form_of(id), params);
}

double mse_naik_gupta(const PopulationParams& params, std::uint64_t n)
{
    return design_factor(params, n) * bracket_ng(params);
}

double mse_proposed(const PopulationParams& params, std::uint64_t n, EstimatorId id, MseConvention convention)
{
    require_proposed(id, "mse_proposed");
    const double factor = design_factor(params, n);
    return factor * bracket_proposed(params, id, convention);
}

double mse_proposed(const PopulationParams& params, std::uint64_t n, const EstimatorForm& form)
{
    if (form.slope != SlopeMode::Sample) {
        throw Error(ErrorKind::InvalidForm, "mse_proposed assumes the sample regression slope");
    }
    const double factor = design_factor(params, n);
    return factor * bracket_first_order(params, ratio_constant(form, params));
}

double mse_from_linearization(const PopulationParams& params, std::uint64_t n, const EstimatorForm& form)
{
    const double factor = design_factor(params, n);
    return factor * bracket_linearized(params, form);
}

LinearizationCoefficients linearization_coefficients(const PopulationParams& params, const EstimatorForm& form)
{
    const double R = ratio_constant(form, params);
    const double B = form.slope == SlopeMode::Sample ? params.B_phi() : 0.0;
    return {-(B + R), 1.0};
}

double theoretical_mse(const PopulationParams& params, std::uint64_t n, const Estimator& est)
{
    if (const auto* id = std::get_if<EstimatorId>(&est.rule)) {
        switch (*id) {
        case EstimatorId::Mean: return variance_sample_mean(params, n);
        case EstimatorId::NG: return mse_naik_gupta(params, n);
        default: return mse_proposed(params, n, *id);
        }
    }
    const auto& form = std::get<EstimatorForm>(est.rule);
    if (form.slope == SlopeMode::Sample) return mse_proposed(params, n, form);
    return mse_from_linearization(params, n, form);
}

double pre_vs_mean(const PopulationParams& params, EstimatorId id, MseConvention convention)
{
    if (id == EstimatorId::Mean) return 100.0;
    const double bracket = bracket_of(params, id, convention);
    if (!(bracket > 0.0)) {
        throw Error(ErrorKind::UndefinedPre,
                    "non-positive MSE for " + std::string(to_string(id)) + "; PRE undefined");
    }
    return 100.0 * bracket_mean(params) / bracket;
}

double pre_vs_mean(const PopulationParams& params, std::uint64_t n, EstimatorId id, MseConvention convention)
{
    (void)design_factor(params, n);
    return pre_vs_mean(params, id, convention);
}

MseReport mse_report(const PopulationParams& params, std::uint64_t n, EstimatorId id, MseConvention convention)
{
    MseReport out;
    out.estimator = id;
    out.n = n;
    out.mse = design_factor(params, n) * bracket_of(params, id, convention);
    out.pre_vs_mean = pre_vs_mean(params, id, convention);
    return out;
}

EfficiencyCheck efficiency_vs_mean(const PopulationParams& params, EstimatorId id)
{
    require_proposed(id, "efficiency_vs_mean");
    const double R = ratio_constant(id, params);
    EfficiencyCheck out;
    out.margin = bracket_mean(params) - bracket_first_order(params, R);
    // Strict, as in rho^2 > (S_phi^2/S_y^2) R^2: a tie is not an improvement.
    out.holds = out.margin > 0.0;
    out.printed_holds = params.rho_pb * params.rho_pb > params.S_phi2 / params.S_y2 * R * R;
    return out;
}

EfficiencyCheck efficiency_vs_ng(const PopulationParams& params, EstimatorId id)
{
    require_proposed(id, "efficiency_vs_ng");
    const double R = ratio_constant(id, params);
    const double R1 = params.Ybar / params.P;
    const double k_yp = params.rho_pb * params.C_y / params.C_p;
    EfficiencyCheck out;
    out.margin = bracket_ng(params) - bracket_first_order(params, R);
    out.holds = out.margin >= 0.0;
    out.printed_holds =
        params.rho_pb * params.rho_pb >= params.S_phi2 / params.S_y2 * (R * R - R1 * R1 + 2.0 * R1 * k_yp);
    return out;
}

EfficiencyReport efficiency_report(const PopulationParams& params, EstimatorId id)
{
    const auto vs_mean = efficiency_vs_mean(params, id);
    const auto vs_ng = efficiency_vs_ng(params, id);
    EfficiencyReport out;
    out.estimator = id;
    out.beats_mean = vs_mean.holds;
    out.margin_vs_mean = vs_mean.margin;
    out.printed_vs_mean = vs_mean.printed_holds;
    out.beats_ng = vs_ng.holds;
    out.margin_vs_ng = vs_ng.margin;
    out.printed_vs_ng = vs_ng.printed_holds;
    out.k_yp = params.rho_pb * params.C_y / params.C_p;
    return out;
}

std::vector<PreRow> PreTable::ranked() const
{
    std::vector<PreRow> out = rows;
    std::ranges::stable_sort(out, [](const PreRow& a, const PreRow& b) {
        if (a.pre != b.pre) return a.pre > b.pre;
        return index_of(a.estimator) < index_of(b.estimator);
    });
    return out;
}

PreTable pre_table(const PopulationParams& params, MseConvention convention)
{
    PreTable table;
    table.rows.reserve(kAllEstimators.size());
    for (const auto id : kAllEstimators) {
        table.rows.push_back({id, pre_vs_mean(params, id, convention)});
    }
    return table;
}

}  // namespace estlab
