#include "estlab/estimators.hpp"

#include "estlab/error.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace estlab {

namespace {

template <typename YAt, typename PhiAt>
SampleStats sample_stats_impl(std::size_t n, YAt y_at, PhiAt phi_at)
{
    if (n < 2) {
        throw Error(ErrorKind::SampleTooSmall, "sample needs n >= 2 units, got " + std::to_string(n));
    }
    const double nd = static_cast<double>(n);
    double sum_y = 0.0;
    unsigned long long a = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sum_y += y_at(i);
        a += phi_at(i);
    }

    SampleStats out;
    out.n = n;
    out.ybar = sum_y / nd;
    out.p = static_cast<double>(a) / nd;

    double ss_phi = 0.0;
    double sp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dphi = static_cast<double>(phi_at(i)) - out.p;
        ss_phi += dphi * dphi;
        sp += dphi * (y_at(i) - out.ybar);
    }
    out.s_phi2 = ss_phi / (nd - 1.0);
    out.s_yphi = sp / (nd - 1.0);
    if (a != 0 && a != n) out.b_phi = out.s_yphi / out.s_phi2;
    return out;
}

}  // namespace

SampleStats compute_sample_stats(const SampleData& s)
{
    if (s.y.size() != s.phi.size()) {
        throw Error(ErrorKind::InvalidPopulation, "sample y and phi lengths differ");
    }
    for (const auto v : s.phi) {
        if (v > 1) throw Error(ErrorKind::InvalidPopulation, "sample attribute must be 0 or 1");
    }
    return sample_stats_impl(
        s.size(), [&](std::size_t i) { return s.y[i]; }, [&](std::size_t i) { return s.phi[i]; });
}

SampleStats compute_sample_stats(const FinitePopulation& pop, std::span<const std::size_t> indices)
{
    const auto y = pop.y();
    const auto phi = pop.phi();
    for (const auto idx : indices) {
        if (idx >= pop.size()) {
            throw Error(ErrorKind::InvalidSampleSize, "sample index " + std::to_string(idx) + " out of range");
        }
    }
    return sample_stats_impl(
        indices.size(), [&](std::size_t i) { return y[indices[i]]; },
        [&](std::size_t i) { return phi[indices[i]]; });
}

double ParamValue::resolve(const PopulationParams& params) const noexcept
{
    switch (kind_) {
    case Kind::One: return 1.0;
    case Kind::Beta2Phi: return params.beta2_phi;
    case Kind::Cp: return params.C_p;
    case Kind::RhoPb: return params.rho_pb;
    case Kind::Literal: return value_;
    }
    return 0.0;
}

std::string ParamValue::describe() const
{
    switch (kind_) {
    case Kind::One: return "1";
    case Kind::Beta2Phi: return "beta2";
    case Kind::Cp: return "Cp";
    case Kind::RhoPb: return "rho";
    case Kind::Literal: {
        std::ostringstream os;
        os.precision(17);
        os << value_;
        return os.str();
    }
    }
    return "?";
}

void require_valid_m1(const EstimatorForm& form)
{
    if (form.m1.kind() == ParamValue::Kind::Literal && form.m1.resolve(PopulationParams{}) == 0.0) {
        throw Error(ErrorKind::InvalidForm, "literal m1 must be nonzero");
    }
}

std::string_view to_string(EstimatorId id) noexcept
{
    static constexpr std::array<std::string_view, 12> names = {
        "mean", "ng", "t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "t9", "t10",
    };
    return names[index_of(id)];
}

std::optional<EstimatorId> parse_estimator_id(std::string_view text)
{
    std::string lower(text);
    std::ranges::transform(lower, lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const auto id : kAllEstimators) {
        if (to_string(id) == lower) return id;
    }
    return std::nullopt;
}

EstimatorForm form_of(EstimatorId id)
{
    using K = ParamValue::Kind;
    switch (id) {
    case EstimatorId::T1: return {K::One, ParamValue::literal(0.0)};
    case EstimatorId::T2: return {K::One, K::Beta2Phi};
    case EstimatorId::T3: return {K::One, K::Cp};
    case EstimatorId::T4: return {K::One, K::RhoPb};
    case EstimatorId::T5: return {K::Beta2Phi, K::Cp};
    case EstimatorId::T6: return {K::Cp, K::Beta2Phi};
    case EstimatorId::T7: return {K::Cp, K::RhoPb};
    case EstimatorId::T8: return {K::RhoPb, K::Cp};
    case EstimatorId::T9: return {K::Beta2Phi, K::RhoPb};
    case EstimatorId::T10: return {K::RhoPb, K::Beta2Phi};
    case EstimatorId::Mean:
    case EstimatorId::NG: break;
    }
    throw Error(ErrorKind::InvalidForm, std::string(to_string(id)) + " is not a member of the (m1, m2) family");
}

double estimate_naik_gupta(const SampleStats& stats, double P)
{
    if (stats.p == P) return stats.ybar;
    if (stats.p == 0.0) throw Error(ErrorKind::UndefinedEstimate, "zero sample proportion");
    // Same operation order as the general form with m1 = 1, m2 = 0, b_phi = 0.
    return stats.ybar / stats.p * P;
}

double ratio_r_star(const SampleStats& stats, double P)
{
    if (stats.p == 0.0) throw Error(ErrorKind::UndefinedEstimate, "zero sample proportion");
    if (stats.p == P) return stats.ybar / stats.p;
    if (!stats.b_phi) {
        throw Error(ErrorKind::DegenerateSample, "b_phi undefined: sampled attribute is constant");
    }
    return (stats.ybar + *stats.b_phi * (P - stats.p)) / stats.p;
}

double estimate_general(const SampleStats& stats, const PopulationParams& params, const EstimatorForm& form)
{
    require_valid_m1(form);
    const double m1 = form.m1.resolve(params);
    const double m2 = form.m2.resolve(params);

    const double P = params.P;
    if (stats.p == P) return stats.ybar;

    double b = 0.0;
    if (form.slope == SlopeMode::Sample) {
        if (!stats.b_phi) {
            throw Error(ErrorKind::DegenerateSample, "b_phi undefined: sampled attribute is constant");
        }
        b = *stats.b_phi;
    }
    const double denom = m1 * stats.p + m2;
    if (denom == 0.0) {
        throw Error(ErrorKind::UndefinedEstimate,
                    stats.p == 0.0 ? "zero sample proportion" : "zero denominator m1*p + m2");
    }
    return (stats.ybar + b * (P - stats.p)) / denom * (m1 * P + m2);
}

double estimate_named(const SampleStats& stats, const PopulationParams& params, EstimatorId id)
{
    switch (id) {
    case EstimatorId::Mean: return stats.ybar;
    case EstimatorId::NG: return estimate_naik_gupta(stats, params.P);
    default: return estimate_general(stats, params, form_of(id));
    }
}

Estimator Estimator::named(EstimatorId id)
{
    return Estimator{std::string(to_string(id)), id};
}

Estimator Estimator::custom(std::string label, EstimatorForm form)
{
    return Estimator{std::move(label), form};
}

double Estimator::evaluate(const SampleStats& stats, const PopulationParams& params) const
{
    if (const auto* id = std::get_if<EstimatorId>(&rule)) return estimate_named(stats, params, *id);
    return estimate_general(stats, params, std::get<EstimatorForm>(rule));
}

bool Estimator::uses_attribute() const noexcept
{
    const auto* id = std::get_if<EstimatorId>(&rule);
    return id == nullptr || *id != EstimatorId::Mean;
}

}  // namespace estlab
