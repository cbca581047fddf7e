#include "estlab/population.hpp"

#include "estlab/error.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <string>
#include <string_view>

namespace estlab {

FinitePopulation::FinitePopulation(std::vector<double> y, std::vector<std::uint8_t> phi)
    : y_(std::move(y)), phi_(std::move(phi))
{
    if (y_.size() != phi_.size()) {
        throw Error(ErrorKind::InvalidPopulation,
                    "length mismatch: " + std::to_string(y_.size()) + " y values vs " +
                        std::to_string(phi_.size()) + " phi values");
    }
    if (y_.size() < 2) {
        throw Error(ErrorKind::InvalidPopulation, "population needs N >= 2 units");
    }
    for (std::size_t i = 0; i < phi_.size(); ++i) {
        if (phi_[i] > 1) {
            throw Error(ErrorKind::InvalidPopulation,
                        "non-binary attribute at unit " + std::to_string(i + 1));
        }
        attribute_count_ += phi_[i];
    }
}

double bernoulli_kurtosis(double P) noexcept
{
    const double pq = P * (1.0 - P);
    return (1.0 - 3.0 * pq) / pq;
}

namespace {

std::string_view trim_cr(std::string_view s)
{
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

}  // namespace

FinitePopulation load_population(std::istream& source)
{
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(source, line)) {
        throw ParseError(ParseIssue::BadHeader, 1, "empty input");
    }
    ++line_no;
    std::string_view header = trim_cr(line);
    if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
    if (header != "y,phi") {
        throw ParseError(ParseIssue::BadHeader, line_no, "expected `y,phi`");
    }

    std::vector<double> y;
    std::vector<std::uint8_t> phi;
    bool saw_blank = false;
    while (std::getline(source, line)) {
        ++line_no;
        const std::string_view row = trim_cr(line);
        if (row.empty()) {
            saw_blank = true;
            continue;
        }
        if (saw_blank) {
            throw ParseError(ParseIssue::MalformedRow, line_no - 1, "blank line inside data");
        }

        const auto comma = row.find(',');
        if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
            throw ParseError(ParseIssue::MalformedRow, line_no, "expected two comma-separated fields");
        }
        const std::string_view y_text = row.substr(0, comma);
        const std::string_view phi_text = row.substr(comma + 1);

        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(y_text.data(), y_text.data() + y_text.size(), value);
        if (y_text.empty() || ec != std::errc{} || ptr != y_text.data() + y_text.size() ||
            !std::isfinite(value)) {
            throw ParseError(ParseIssue::MalformedRow, line_no,
                             "y is not a decimal literal: `" + std::string(y_text) + "`");
        }

        if (phi_text == "0" || phi_text == "1") {
            phi.push_back(phi_text == "1" ? 1 : 0);
        } else {
            throw ParseError(ParseIssue::NonBinaryAttribute, line_no,
                             "phi must be 0 or 1, got `" + std::string(phi_text) + "`");
        }
        y.push_back(value);
    }

    if (y.size() < 2) {
        throw ParseError(ParseIssue::TooFewUnits, line_no,
                         "population has " + std::to_string(y.size()) + " unit(s)");
    }
    return FinitePopulation(std::move(y), std::move(phi));
}

PopulationParams compute_params(const FinitePopulation& pop)
{
    const auto y = pop.y();
    const auto phi = pop.phi();
    const auto N = pop.size();
    const auto A = pop.attribute_count();
    if (A == 0 || A == N) {
        throw Error(ErrorKind::DegeneratePopulation,
                    "attribute is constant over the population (P = " + std::string(A == 0 ? "0" : "1") +
                        ")");
    }

    const double Nd = static_cast<double>(N);
    double sum_y = 0.0;
    for (const double v : y) sum_y += v;

    PopulationParams out;
    out.Ybar = sum_y / Nd;
    out.P = static_cast<double>(A) / Nd;
    out.Q = 1.0 - out.P;

    double ss_y = 0.0;
    double ss_phi = 0.0;
    double sp = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double dy = y[i] - out.Ybar;
        const double dphi = static_cast<double>(phi[i]) - out.P;
        ss_y += dy * dy;
        ss_phi += dphi * dphi;
        sp += dy * dphi;
    }
    out.S_y2 = ss_y / (Nd - 1.0);
    out.S_phi2 = ss_phi / (Nd - 1.0);
    out.S_yphi = sp / (Nd - 1.0);
    if (!(out.S_y2 > 0.0)) {
        throw Error(ErrorKind::DegeneratePopulation, "study variable y is constant over the population");
    }

    const double S_y = std::sqrt(out.S_y2);
    const double S_phi = std::sqrt(out.S_phi2);
    out.rho_pb = out.S_yphi / (S_y * S_phi);
    out.C_y = S_y / out.Ybar;
    out.C_p = S_phi / out.P;
    out.beta2_phi = bernoulli_kurtosis(out.P);
    out.beta2_source = Beta2Source::ClosedForm;
    out.N = N;
    return out;
}

PopulationParams params_from_moments(const Moments& m)
{
    auto reject = [](const std::string& what) { throw Error(ErrorKind::InvalidMoments, what); };
    if (!(m.P > 0.0 && m.P < 1.0)) reject("P must lie strictly inside (0,1)");
    if (!(m.Ybar > 0.0) || !std::isfinite(m.Ybar)) reject("Ybar must be positive");
    if (!(m.C_y > 0.0) || !std::isfinite(m.C_y)) reject("Cy must be positive");
    if (!(m.C_p > 0.0) || !std::isfinite(m.C_p)) reject("Cp must be positive");
    if (!(std::abs(m.rho_pb) <= 1.0)) reject("rho must satisfy |rho| <= 1");
    if (m.beta2_phi && !std::isfinite(*m.beta2_phi)) reject("beta2 must be finite");
    if (m.N && *m.N < 2) reject("N must be at least 2");

    PopulationParams out;
    out.Ybar = m.Ybar;
    out.P = m.P;
    out.Q = 1.0 - m.P;
    out.rho_pb = m.rho_pb;
    out.C_y = m.C_y;
    out.C_p = m.C_p;
    const double S_y = m.C_y * m.Ybar;
    const double S_phi = m.C_p * m.P;
    out.S_y2 = S_y * S_y;
    out.S_phi2 = S_phi * S_phi;
    out.S_yphi = m.rho_pb * S_y * S_phi;
    if (m.beta2_phi) {
        out.beta2_phi = *m.beta2_phi;
        out.beta2_source = Beta2Source::Given;
    } else {
        out.beta2_phi = bernoulli_kurtosis(m.P);
        out.beta2_source = Beta2Source::ClosedForm;
    }
    out.N = m.N;
    return out;
}

Moments extract_moments(const PopulationParams& params)
{
    Moments m;
    m.Ybar = params.Ybar;
    m.P = params.P;
    m.rho_pb = params.rho_pb;
    m.C_y = params.C_y;
    m.C_p = params.C_p;
    m.beta2_phi = params.beta2_phi;
    m.N = params.N;
    return m;
}

double design_factor(const PopulationParams& params, std::uint64_t n)
{
    if (!params.N) {
        throw Error(ErrorKind::MissingPopulationSize, "population size N is required for MSE values");
    }
    const auto N = *params.N;
    if (n < 1 || n > N) {
        throw Error(ErrorKind::InvalidSampleSize,
                    "sample size n = " + std::to_string(n) + " outside [1, N = " + std::to_string(N) + "]");
    }
    const double f = static_cast<double>(n) / static_cast<double>(N);
    return (1.0 - f) / static_cast<double>(n);
}

double variance_sample_mean(const PopulationParams& params, std::uint64_t n)
{
    return design_factor(params, n) * params.S_y2;
}

}  // namespace estlab
