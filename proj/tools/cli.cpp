#include "cli.hpp"

#include "estlab/error.hpp"
#include "estlab/estimators.hpp"
#include "estlab/theory.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace estlab::cli {

using nlohmann::ordered_json;

namespace {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> to_double(std::string_view s)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> to_uint(std::string_view s)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// key=value list -> map, rejecting duplicates and malformed items.
std::map<std::string, std::string, std::less<>> parse_kv(std::string_view list, ErrorKind kind, std::string_view what)
{
    std::map<std::string, std::string, std::less<>> out;
    for (const auto item : split(list, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw Error(kind, std::string(what) + ": expected key=value, got `" + std::string(item) + "`");
        }
        const std::string key(item.substr(0, eq));
        if (!out.emplace(key, std::string(item.substr(eq + 1))).second) {
            throw Error(kind, std::string(what) + ": duplicate field `" + key + "`");
        }
    }
    return out;
}

std::string fmt_full(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string fmt_fixed2(double v)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

// JSON cannot carry NaN/inf; they serialize as null.
ordered_json num(double v)
{
    return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

std::string csv_num(double v)
{
    return std::isfinite(v) ? fmt_full(v) : std::string();
}

struct Output {
    std::string command;
    ordered_json inputs = ordered_json::object();
    ordered_json results = ordered_json::object();
    std::vector<std::string> warnings;
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
};

struct Common {
    std::string format = "json";
    std::string output;
};

void emit(const Output& o, const Common& common, std::ostream& out, std::ostream& err)
{
    std::ofstream file;
    std::ostream* sink = &out;
    if (!common.output.empty()) {
        file.open(common.output, std::ios::binary);
        if (!file) throw UsageError("cannot open --output path `" + common.output + "`");
        sink = &file;
    }
    if (common.format == "csv") {
        auto write_row = [&](const std::vector<std::string>& row) {
            for (std::size_t i = 0; i < row.size(); ++i) *sink << (i ? "," : "") << row[i];
            *sink << '\n';
        };
        write_row(o.csv_header);
        for (const auto& row : o.csv_rows) write_row(row);
        for (const auto& w : o.warnings) err << "warning: " << w << '\n';
    } else {
        ordered_json doc;
        doc["command"] = o.command;
        doc["inputs"] = o.inputs;
        doc["results"] = o.results;
        doc["warnings"] = o.warnings;
        *sink << doc.dump(2) << '\n';
    }
    sink->flush();
}

FinitePopulation read_population(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open --input file `" + path + "`");
    return load_population(in);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag)
{
    if (flag) return *flag;
    if (const char* env = std::getenv("ESTLAB_SEED"); env != nullptr && *env != '\0') {
        const auto v = to_uint(env);
        if (!v) throw UsageError(std::string("ESTLAB_SEED is not an unsigned 64-bit integer: `") + env + "`");
        return *v;
    }
    return 0;
}

DegeneratePolicy parse_policy(const std::string& text)
{
    if (text == "skip") return DegeneratePolicy::Skip;
    if (text == "error") return DegeneratePolicy::Error;
    throw UsageError("--policy must be skip or error");
}

ordered_json params_json(const PopulationParams& p)
{
    ordered_json j;
    j["Ybar"] = num(p.Ybar);
    j["P"] = num(p.P);
    j["Q"] = num(p.Q);
    j["S_y2"] = num(p.S_y2);
    j["S_phi2"] = num(p.S_phi2);
    j["S_yphi"] = num(p.S_yphi);
    j["rho_pb"] = num(p.rho_pb);
    j["C_y"] = num(p.C_y);
    j["C_p"] = num(p.C_p);
    j["beta2_phi"] = num(p.beta2_phi);
    j["beta2_source"] = p.beta2_source == Beta2Source::Given ? "given" : "closed-form";
    j["N"] = p.N ? ordered_json(*p.N) : ordered_json(nullptr);
    return j;
}

// --- commands -------------------------------------------------------------

struct ParamsSource {
    std::string input;
    std::string moments;
};

PopulationParams load_params(const ParamsSource& src, Output& o)
{
    if (!src.input.empty() && !src.moments.empty()) throw UsageError("give exactly one of --input and --moments");
    if (src.input.empty() && src.moments.empty()) throw UsageError("one of --input or --moments is required");
    if (!src.input.empty()) {
        o.inputs["input"] = src.input;
        return compute_params(read_population(src.input));
    }
    o.inputs["moments"] = src.moments;
    return params_from_moments(parse_moments(src.moments));
}

Output cmd_params(const ParamsSource& src)
{
    Output o;
    o.command = "params";
    const auto p = load_params(src, o);
    o.results = params_json(p);
    o.results["moments"] = format_moments(p);
    o.csv_header = {"Ybar", "P", "Q", "S_y2", "S_phi2", "S_yphi", "rho_pb", "C_y", "C_p", "beta2_phi", "beta2_source", "N"};
    o.csv_rows.push_back({fmt_full(p.Ybar), fmt_full(p.P), fmt_full(p.Q), fmt_full(p.S_y2), fmt_full(p.S_phi2),
                          fmt_full(p.S_yphi), fmt_full(p.rho_pb), csv_num(p.C_y), fmt_full(p.C_p),
                          fmt_full(p.beta2_phi), p.beta2_source == Beta2Source::Given ? "given" : "closed-form",
                          p.N ? std::to_string(*p.N) : std::string()});
    return o;
}

Output cmd_pre(const ParamsSource& src, std::optional<std::uint64_t> n, const std::string& convention_text)
{
    Output o;
    o.command = "pre";
    MseConvention convention = MseConvention::FirstOrder;
    if (convention_text == "published") {
        convention = MseConvention::Published;
    } else if (convention_text != "first-order") {
        throw UsageError("--convention must be first-order or published");
    }
    const auto p = load_params(src, o);
    o.inputs["n"] = n ? ordered_json(*n) : ordered_json(nullptr);
    o.inputs["convention"] = convention_text;

    bool with_mse = false;
    if (n) {
        if (p.N) {
            (void)design_factor(p, *n);
            with_mse = true;
        } else {
            o.warnings.push_back("N unknown: MSE values unavailable; PRE does not depend on n");
        }
    } else {
        o.warnings.push_back("n not given: MSE values unavailable; PRE does not depend on n");
    }
    if (convention == MseConvention::Published) {
        o.warnings.push_back(
            "published convention: t2..t10 use R_i unsquared; these values reproduce the published table, "
            "not the first-order MSE");
    }

    const auto table = pre_table(p, convention);
    std::vector<EfficiencyReport> eff;
    for (const auto id : kProposedEstimators) eff.push_back(efficiency_report(p, id));

    ordered_json rows = ordered_json::array();
    o.csv_header = {"view", "rank", "estimator", "pre", "mse"};
    for (const auto& row : table.rows) {
        ordered_json r;
        r["estimator"] = to_string(row.estimator);
        r["pre"] = num(row.pre);
        r["pre_display"] = fmt_fixed2(row.pre);
        std::string mse_text;
        if (with_mse) {
            const double mse = mse_report(p, *n, row.estimator, convention).mse;
            r["mse"] = num(mse);
            mse_text = csv_num(mse);
        } else {
            r["mse"] = nullptr;
        }
        rows.push_back(r);
        o.csv_rows.push_back({"table", "", std::string(to_string(row.estimator)), fmt_fixed2(row.pre), mse_text});
    }
    ordered_json ranked = ordered_json::array();
    std::size_t rank = 0;
    for (const auto& row : table.ranked()) {
        ++rank;
        ranked.push_back({{"rank", rank}, {"estimator", to_string(row.estimator)}, {"pre", num(row.pre)}});
        o.csv_rows.push_back({"ranked", std::to_string(rank), std::string(to_string(row.estimator)),
                              fmt_fixed2(row.pre), ""});
    }

    ordered_json efficiency = ordered_json::array();
    bool any_beats_mean = false;
    for (const auto& e : eff) {
        any_beats_mean = any_beats_mean || e.beats_mean;
        efficiency.push_back({{"estimator", to_string(e.estimator)},
                              {"beats_mean", e.beats_mean},
                              {"beats_ng", e.beats_ng},
                              {"margin_vs_mean", num(e.margin_vs_mean)},
                              {"margin_vs_ng", num(e.margin_vs_ng)},
                              {"k_yp", num(e.k_yp)}});
        if (!e.printed_vs_mean_agrees()) {
            o.warnings.push_back(std::string(to_string(e.estimator)) +
                                 ": printed rho^2 > (S_phi^2/S_y^2) R_i^2 test disagrees with the direct MSE difference");
        }
        if (!e.printed_vs_ng_agrees()) {
            o.warnings.push_back(std::string(to_string(e.estimator)) +
                                 ": printed efficiency-vs-NG bracket disagrees with the direct MSE difference (direct: " +
                                 (e.beats_ng ? "beats" : "does not beat") + " t_NG)");
        }
    }
    if (!any_beats_mean) {
        o.warnings.push_back("no proposed estimator is more efficient than the sample mean for these parameters");
    }

    o.results["convention"] = convention_text;
    o.results["rows"] = rows;
    o.results["ranked"] = ranked;
    o.results["efficiency"] = efficiency;
    return o;
}

std::vector<std::size_t> parse_sample_indices(std::string_view text, std::size_t N)
{
    std::vector<std::size_t> out;
    std::set<std::size_t> seen;
    for (const auto item : split(text, ',')) {
        const auto v = to_uint(item);
        if (!v || *v < 1 || *v > N) {
            throw UsageError("--sample index `" + std::string(item) + "` is not a unit number in 1.." + std::to_string(N));
        }
        if (!seen.insert(*v).second) throw UsageError("--sample index " + std::to_string(*v) + " repeated");
        out.push_back(static_cast<std::size_t>(*v - 1));
    }
    if (out.size() < 2) throw UsageError("--sample needs at least 2 distinct units");
    return out;
}

Output cmd_estimate(const std::string& input, const std::string& sample, std::optional<std::uint64_t> n,
                    std::uint64_t seed, const std::vector<Estimator>& estimators)
{
    Output o;
    o.command = "estimate";
    if (input.empty()) throw UsageError("--input is required");
    if (sample.empty() == !n) throw UsageError("give exactly one of --sample and --n");
    o.inputs["input"] = input;
    const auto pop = read_population(input);
    const auto params = compute_params(pop);

    std::vector<std::size_t> idx;
    if (!sample.empty()) {
        o.inputs["sample"] = sample;
        idx = parse_sample_indices(sample, pop.size());
    } else {
        if (*n < 2 || *n > pop.size()) {
            throw UsageError("--n must satisfy 2 <= n <= N = " + std::to_string(pop.size()));
        }
        o.inputs["n"] = *n;
        o.inputs["seed"] = seed;
        auto rng = make_stream(seed, StreamDomain::SingleDraw, 0);
        idx = draw_srswor_indices(pop.size(), static_cast<std::size_t>(*n), rng);
    }
    const auto stats = compute_sample_stats(pop, idx);

    ordered_json units = ordered_json::array();
    for (const auto i : idx) units.push_back(i + 1);
    o.results["sample"] = {{"units", units},
                           {"n", stats.n},
                           {"ybar", num(stats.ybar)},
                           {"p", num(stats.p)},
                           {"s_phi2", num(stats.s_phi2)},
                           {"s_yphi", num(stats.s_yphi)},
                           {"b_phi", stats.b_phi ? num(*stats.b_phi) : ordered_json(nullptr)}};

    ordered_json rows = ordered_json::array();
    o.csv_header = {"estimator", "value", "reason"};
    for (const auto& est : estimators) {
        ordered_json r;
        r["estimator"] = est.label;
        try {
            const double v = est.evaluate(stats, params);
            r["value"] = num(v);
            r["reason"] = nullptr;
            o.csv_rows.push_back({est.label, csv_num(v), ""});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::UndefinedEstimate && e.kind() != ErrorKind::DegenerateSample) throw;
            r["value"] = nullptr;
            r["reason"] = e.what();
            o.csv_rows.push_back({est.label, "", e.what()});
        }
        rows.push_back(r);
    }
    o.results["estimates"] = rows;
    return o;
}

struct PopulationSource {
    std::string input;
    std::string synth;
};

FinitePopulation load_population_source(const PopulationSource& src, std::uint64_t seed, Output& o)
{
    if (!src.input.empty() && !src.synth.empty()) throw UsageError("give exactly one of --input and --synth");
    if (src.input.empty() && src.synth.empty()) throw UsageError("one of --input or --synth is required");
    if (!src.input.empty()) {
        o.inputs["input"] = src.input;
        return read_population(src.input);
    }
    o.inputs["synth"] = src.synth;
    return synthesize_population(parse_synth(src.synth), seed);
}

void fill_sim_output(Output& o, const SimResult& result, const PopulationParams& params,
                     const std::vector<Estimator>& estimators)
{
    o.results["population"] = {{"N", params.N ? *params.N : 0},
                               {"Ybar", num(params.Ybar)},
                               {"P", num(params.P)},
                               {"rho_pb", num(params.rho_pb)}};
    o.results["samples"] = result.replicates;
    o.results["baseline_mse"] = num(result.baseline_mse);

    o.csv_header = {"estimator",       "empirical_mean", "empirical_bias",   "empirical_mse",
                    "mse_std_error",   "empirical_pre",  "theoretical_mse",  "relative_error",
                    "degenerate_count", "effective_samples"};
    ordered_json rows = ordered_json::array();
    for (std::size_t k = 0; k < result.rows.size(); ++k) {
        const auto& row = result.rows[k];
        const double theory = theoretical_mse(params, result.n, estimators[k]);
        const double rel = (row.empirical_mse - theory) / theory;
        rows.push_back({{"estimator", row.label},
                        {"empirical_mean", num(row.empirical_mean)},
                        {"empirical_bias", num(row.empirical_bias)},
                        {"empirical_mse", num(row.empirical_mse)},
                        {"mse_std_error", num(row.mse_standard_error)},
                        {"empirical_pre", num(row.empirical_pre)},
                        {"theoretical_mse", num(theory)},
                        {"relative_error", num(rel)},
                        {"degenerate_count", row.degenerate_count},
                        {"effective_samples", row.effective_replicates}});
        o.csv_rows.push_back({row.label, csv_num(row.empirical_mean), csv_num(row.empirical_bias),
                              csv_num(row.empirical_mse), csv_num(row.mse_standard_error), csv_num(row.empirical_pre),
                              csv_num(theory), csv_num(rel), std::to_string(row.degenerate_count),
                              std::to_string(row.effective_replicates)});
        if (row.degenerate_count > 0) {
            o.warnings.push_back(row.label + ": " + std::to_string(row.degenerate_count) +
                                 " degenerate samples skipped; MSE is conditional on the remaining " +
                                 std::to_string(row.effective_replicates));
        }
    }
    o.results["rows"] = rows;
}

Output cmd_simulate(const PopulationSource& src, std::uint64_t n, std::uint64_t replicates, std::uint64_t seed,
                    const std::vector<Estimator>& estimators, DegeneratePolicy policy, unsigned threads)
{
    Output o;
    o.command = "simulate";
    if (replicates < 1) throw UsageError("--replicates must be at least 1");
    const auto pop = load_population_source(src, seed, o);
    o.inputs["n"] = n;
    o.inputs["replicates"] = replicates;
    o.inputs["seed"] = seed;
    o.inputs["policy"] = policy == DegeneratePolicy::Skip ? "skip" : "error";

    SimConfig config;
    config.n = n;
    config.replicates = replicates;
    config.seed = seed;
    config.estimators = estimators;
    config.degenerate_policy = policy;
    config.threads = threads;
    const auto result = monte_carlo(pop, config);
    o.results["rng"] = "xoshiro256** per replicate, keyed by SplitMix64(seed, replicate)";
    fill_sim_output(o, result, compute_params(pop), estimators);
    return o;
}

Output cmd_enumerate(const PopulationSource& src, std::uint64_t n, std::uint64_t seed,
                     const std::vector<Estimator>& estimators, DegeneratePolicy policy)
{
    Output o;
    o.command = "enumerate";
    const auto pop = load_population_source(src, seed, o);
    o.inputs["n"] = n;
    o.inputs["policy"] = policy == DegeneratePolicy::Skip ? "skip" : "error";
    const auto result = enumerate_all_samples(pop, n, estimators, policy);
    fill_sim_output(o, result, compute_params(pop), estimators);
    return o;
}

}  // namespace

Moments parse_moments(std::string_view list)
{
    const auto kv = parse_kv(list, ErrorKind::InvalidMoments, "--moments");
    static const std::set<std::string, std::less<>> known = {"Ybar", "P", "rho", "Cy", "Cp", "beta2", "N"};
    for (const auto& [key, _] : kv) {
        if (!known.contains(key)) throw Error(ErrorKind::InvalidMoments, "--moments: unknown field `" + key + "`");
    }
    auto real = [&](const char* key) -> std::optional<double> {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        const auto v = to_double(it->second);
        if (!v) throw Error(ErrorKind::InvalidMoments, std::string("--moments: field `") + key + "` is not a number");
        return v;
    };
    auto required = [&](const char* key) {
        const auto v = real(key);
        if (!v) throw Error(ErrorKind::InvalidMoments, std::string("--moments: missing field `") + key + "`");
        return *v;
    };
    Moments m;
    m.Ybar = required("Ybar");
    m.P = required("P");
    m.rho_pb = required("rho");
    m.C_y = required("Cy");
    m.C_p = required("Cp");
    m.beta2_phi = real("beta2");
    if (const auto it = kv.find("N"); it != kv.end()) {
        const auto v = to_uint(it->second);
        if (!v) throw Error(ErrorKind::InvalidMoments, "--moments: field `N` is not a positive integer");
        m.N = *v;
    }
    return m;
}

SyntheticSpec parse_synth(std::string_view list)
{
    const auto kv = parse_kv(list, ErrorKind::InvalidSpec, "--synth");
    static const std::set<std::string, std::less<>> known = {"N", "P", "effect", "noise", "intercept"};
    for (const auto& [key, _] : kv) {
        if (!known.contains(key)) throw Error(ErrorKind::InvalidSpec, "--synth: unknown field `" + key + "`");
    }
    auto real = [&](const char* key, std::optional<double> fallback) {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            if (!fallback) throw Error(ErrorKind::InvalidSpec, std::string("--synth: missing field `") + key + "`");
            return *fallback;
        }
        const auto v = to_double(it->second);
        if (!v) throw Error(ErrorKind::InvalidSpec, std::string("--synth: field `") + key + "` is not a number");
        return *v;
    };
    SyntheticSpec spec;
    const auto n_it = kv.find("N");
    if (n_it == kv.end()) throw Error(ErrorKind::InvalidSpec, "--synth: missing field `N`");
    const auto N = to_uint(n_it->second);
    if (!N) throw Error(ErrorKind::InvalidSpec, "--synth: field `N` is not a positive integer");
    spec.N = *N;
    spec.P_target = real("P", std::nullopt);
    spec.attribute_effect = real("effect", std::nullopt);
    spec.noise_sd = real("noise", std::nullopt);
    spec.intercept = real("intercept", 10.0);
    return spec;
}

std::vector<Estimator> parse_estimators(std::string_view list)
{
    std::vector<Estimator> out;
    std::set<EstimatorId> seen;
    for (const auto item : split(list, ',')) {
        if (item == "all") {
            for (const auto id : kAllEstimators) {
                if (seen.insert(id).second) out.push_back(Estimator::named(id));
            }
            continue;
        }
        const auto id = parse_estimator_id(item);
        if (!id) throw UsageError("--estimators: unknown estimator `" + std::string(item) + "`");
        if (seen.insert(*id).second) out.push_back(Estimator::named(*id));
    }
    if (out.empty()) throw UsageError("--estimators: empty list");
    return out;
}

std::string format_moments(const PopulationParams& p)
{
    std::string out = "Ybar=" + fmt_full(p.Ybar) + ",P=" + fmt_full(p.P) + ",rho=" + fmt_full(p.rho_pb) +
                      ",Cy=" + fmt_full(p.C_y) + ",Cp=" + fmt_full(p.C_p) + ",beta2=" + fmt_full(p.beta2_phi);
    if (p.N) out += ",N=" + std::to_string(*p.N);
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Ratio estimators of a finite-population mean using an auxiliary attribute"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--output", common.output, "Write to PATH instead of stdout");
    };

    ParamsSource params_src;
    PopulationSource pop_src;
    std::optional<std::uint64_t> n_opt;
    std::uint64_t n = 0;
    std::uint64_t replicates = 0;
    std::optional<std::uint64_t> seed_opt;
    std::string estimators_text = "all";
    std::string policy_text = "skip";
    std::string convention_text = "first-order";
    std::string sample_text;
    unsigned threads = 0;

    auto* params_cmd = app.add_subcommand("params", "Population parameters from a CSV or summary moments");
    params_cmd->add_option("--input", params_src.input, "Population CSV (y,phi)");
    params_cmd->add_option("--moments", params_src.moments, "Ybar=..,P=..,rho=..,Cy=..,Cp=..[,beta2=..][,N=..]");
    add_common(params_cmd);

    auto* pre_cmd = app.add_subcommand("pre", "Percent relative efficiency table");
    pre_cmd->add_option("--input", params_src.input, "Population CSV (y,phi)");
    pre_cmd->add_option("--moments", params_src.moments, "Summary moments list");
    pre_cmd->add_option("--n", n_opt, "Sample size (needed for MSE values only)");
    pre_cmd->add_option("--convention", convention_text, "first-order or published");
    add_common(pre_cmd);

    auto* est_cmd = app.add_subcommand("estimate", "Point estimates on one sample");
    est_cmd->add_option("--input", params_src.input, "Population CSV (y,phi)");
    est_cmd->add_option("--sample", sample_text, "Comma-separated 1-based unit numbers");
    est_cmd->add_option("--n", n_opt, "Draw an SRSWOR sample of this size instead");
    est_cmd->add_option("--seed", seed_opt, "Seed for --n (default $ESTLAB_SEED, else 0)");
    est_cmd->add_option("--estimators", estimators_text, "Comma-separated: mean,ng,t1..t10 or all");
    add_common(est_cmd);

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo SRSWOR replication");
    sim_cmd->add_option("--input", pop_src.input, "Population CSV (y,phi)");
    sim_cmd->add_option("--synth", pop_src.synth, "N=..,P=..,effect=..,noise=..[,intercept=..]");
    sim_cmd->add_option("--n", n, "Sample size")->required();
    sim_cmd->add_option("--replicates", replicates, "Number of replicates")->required();
    sim_cmd->add_option("--seed", seed_opt, "Master seed (default $ESTLAB_SEED, else 0)");
    sim_cmd->add_option("--estimators", estimators_text, "Comma-separated: mean,ng,t1..t10 or all");
    sim_cmd->add_option("--policy", policy_text, "Degenerate samples: skip or error");
    sim_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
    add_common(sim_cmd);

    auto* enum_cmd = app.add_subcommand("enumerate", "Exact expectations over every n-subset");
    enum_cmd->add_option("--input", pop_src.input, "Population CSV (y,phi)");
    enum_cmd->add_option("--synth", pop_src.synth, "Synthetic population spec");
    enum_cmd->add_option("--seed", seed_opt, "Seed for --synth");
    enum_cmd->add_option("--n", n, "Sample size")->required();
    enum_cmd->add_option("--estimators", estimators_text, "Comma-separated: mean,ng,t1..t10 or all");
    enum_cmd->add_option("--policy", policy_text, "Degenerate samples: skip or error");
    add_common(enum_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        Output o;
        if (params_cmd->parsed()) {
            o = cmd_params(params_src);
        } else if (pre_cmd->parsed()) {
            o = cmd_pre(params_src, n_opt, convention_text);
        } else if (est_cmd->parsed()) {
            o = cmd_estimate(params_src.input, sample_text, n_opt, resolve_seed(seed_opt),
                             parse_estimators(estimators_text));
        } else if (sim_cmd->parsed()) {
            o = cmd_simulate(pop_src, n, replicates, resolve_seed(seed_opt), parse_estimators(estimators_text),
                             parse_policy(policy_text), threads);
        } else {
            o = cmd_enumerate(pop_src, n, resolve_seed(seed_opt), parse_estimators(estimators_text),
                              parse_policy(policy_text));
        }
        emit(o, common, out, err);
        return kOk;
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        switch (e.kind()) {
        case ErrorKind::DegenerateSample: return kDegenerate;
        case ErrorKind::TooManySamples: return kResourceGuard;
        default: return kUsage;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

}  // namespace estlab::cli
