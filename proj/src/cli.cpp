#include "gammasum/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "gammasum/gfun.hpp"
#include "gammasum/mvgamma.hpp"
#include "gammasum/oracles.hpp"
#include "gammasum/qform.hpp"

namespace gammasum::cli {

using nlohmann::json;

namespace {

// --- logging ----------------------------------------------------------------

int log_level()
{
    const char* env = std::getenv("GAMMASUM_LOG");
    if (env == nullptr) return 0;
    const std::string v(env);
    if (v == "debug" || v == "2") return 2;
    if (v == "info" || v == "1") return 1;
    return 0;
}

// --- value helpers ----------------------------------------------------------

// 15 significant digits; the shortest round-trip form of the rounded double
// is what the JSON writer emits.
json prob_value(double v)
{
    if (!std::isfinite(v)) return nullptr;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return std::strtod(buf, nullptr);
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double require_number(const json& params, const char* key)
{
    if (!params.contains(key)) throw ValidationError(std::string("missing parameter '") + key + "'");
    const json& v = params.at(key);
    if (!v.is_number()) throw ValidationError(std::string("parameter '") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(std::string("parameter '") + key + "' must be finite");
    return d;
}

std::vector<double> require_numbers(const json& params, const char* key)
{
    if (!params.contains(key)) throw ValidationError(std::string("missing parameter '") + key + "'");
    const json& v = params.at(key);
    if (!v.is_array() || v.empty()) {
        throw ValidationError(std::string("parameter '") + key + "' must be a non-empty array");
    }
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) throw ValidationError(std::string("parameter '") + key + "' must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::optional<std::size_t> optional_count(const json& obj, const char* key)
{
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ValidationError(std::string("parameter '") + key + "' must be a non-negative integer");
    }
    return static_cast<std::size_t>(v.get<long long>());
}

std::uint64_t seed_of(const json& params)
{
    if (!params.contains("seed")) return kDefaultSeed;
    const json& v = params.at("seed");
    if (!v.is_number_integer()) throw ValidationError("parameter 'seed' must be an integer");
    return v.get<std::uint64_t>();
}

/// Dense JSON rows, or the shorthands "I<k>" and "diag:a,b,...", or a string
/// holding JSON rows.
SymMatrix parse_matrix(const json& v, const char* key)
{
    const std::string name(key);
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.size() > 1 && s[0] == 'I') {
            std::size_t pos = 0;
            long long k = 0;
            try {
                k = std::stoll(s.substr(1), &pos);
            } catch (const std::exception&) {
                throw ValidationError("matrix '" + name + "': bad identity shorthand");
            }
            if (pos != s.size() - 1 || k < 1) throw ValidationError("matrix '" + name + "': bad identity shorthand");
            return SymMatrix::identity(static_cast<std::size_t>(k));
        }
        if (s.rfind("diag:", 0) == 0) {
            std::vector<double> values;
            std::stringstream ss(s.substr(5));
            std::string item;
            while (std::getline(ss, item, ',')) {
                try {
                    std::size_t pos = 0;
                    values.push_back(std::stod(item, &pos));
                    if (pos != item.size()) throw std::invalid_argument(item);
                } catch (const std::exception&) {
                    throw ValidationError("matrix '" + name + "': bad diagonal entry '" + item + "'");
                }
            }
            if (values.empty()) throw ValidationError("matrix '" + name + "': empty diagonal");
            return SymMatrix::diagonal(values);
        }
        json parsed = json::parse(s, nullptr, false);
        if (parsed.is_discarded()) throw ValidationError("matrix '" + name + "': cannot parse '" + s + "'");
        return parse_matrix(parsed, key);
    }
    if (!v.is_array() || v.empty()) throw ValidationError("matrix '" + name + "' must be an array of rows");
    const std::size_t n = v.size();
    std::vector<double> entries;
    entries.reserve(n * n);
    for (const json& row : v) {
        if (!row.is_array() || row.size() != n) throw ValidationError("matrix '" + name + "' must be square");
        for (const json& e : row) {
            if (!e.is_number()) throw ValidationError("matrix '" + name + "' must hold numbers");
            entries.push_back(e.get<double>());
        }
    }
    return SymMatrix(n, std::move(entries));
}

SymMatrix require_matrix(const json& params, const char* key)
{
    if (!params.contains(key)) throw ValidationError(std::string("missing parameter '") + key + "'");
    return parse_matrix(params.at(key), key);
}

Command parse_command(const std::string& s)
{
    if (s == "gamma-sum") return Command::gamma_sum;
    if (s == "qform") return Command::qform;
    if (s == "mvgamma") return Command::mvgamma;
    if (s == "quantile") return Command::quantile;
    if (s == "selfcheck") return Command::selfcheck;
    throw ValidationError("unknown command '" + s + "'");
}

std::string command_name(Command c)
{
    switch (c) {
    case Command::gamma_sum: return "gamma-sum";
    case Command::qform: return "qform";
    case Command::mvgamma: return "mvgamma";
    case Command::quantile: return "quantile";
    case Command::selfcheck: return "selfcheck";
    }
    return "?";
}

OutputFormat parse_format(const std::string& s)
{
    if (s == "json") return OutputFormat::json;
    if (s == "csv") return OutputFormat::csv;
    if (s == "plain") return OutputFormat::plain;
    throw ValidationError("unknown output format '" + s + "'");
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where)
{
    for (const auto& [k, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw ValidationError(std::string("unknown key '") + k + "' in " + where);
    }
}

GammaSumParams gamma_sum_params(const json& params)
{
    GammaSumParams p{require_numbers(params, "alphas"), require_numbers(params, "lambdas")};
    p.validate();
    return p;
}

// --- results ----------------------------------------------------------------

json base_result(const JobSpec& job)
{
    json r;
    r["command"] = command_name(job.command);
    json echo = job.params;
    if (!job.quadrature_echo.is_null()) echo["quadrature"] = job.quadrature_echo;
    r["input_echo"] = echo;
    return r;
}

void put_estimate(json& r, const CdfEstimate& e)
{
    r["cdf"] = prob_value(e.value);
    if (e.raw_value != e.value) r["raw_cdf"] = prob_value(e.raw_value);
    r["err_estimate"] = prob_value(e.err_estimate);
    r["converged"] = e.converged;
    r["r_used"] = prob_value(e.r_used);
    r["nodes_used"] = e.nodes_used;
    r["warnings"] = e.warnings;
}

json mc_json(const McResult& m)
{
    return {{"estimate", prob_value(m.estimate)},
            {"std_error", prob_value(m.std_error)},
            {"n_samples", m.n_samples},
            {"seed", m.seed}};
}

// Runs f; a CdfNonConvergence becomes an unconverged estimate.
CdfEstimate estimate_or_unconverged(const std::function<CdfEstimate()>& f)
{
    try {
        return f();
    } catch (const CdfNonConvergence& e) {
        CdfEstimate est = e.estimate();
        est.converged = false;
        est.warnings.emplace_back(e.what());
        return est;
    }
}

json run_gamma_sum(const JobSpec& job)
{
    const json& params = job.params;
    const GammaSumParams p = gamma_sum_params(params);
    const double x = require_number(params, "x");
    json r = base_result(job);
    put_estimate(r, estimate_or_unconverged([&] { return cdf(p, x, job.quadrature); }));
    if (params.value("series", false)) {
        const SeriesResult s = series_cdf(p, x, std::max(job.quadrature.tol * 1e-2, 1e-15));
        r["series"] = {{"value", prob_value(s.value)},
                       {"terms_used", s.terms_used},
                       {"tail_bound", prob_value(s.tail_bound)}};
    }
    if (const auto n = optional_count(params, "mc_samples"); n && *n > 0) {
        r["mc"] = mc_json(mc_cdf(p, x, *n, seed_of(params)));
    }
    return r;
}

json run_qform(const JobSpec& job)
{
    const json& params = job.params;
    const SymMatrix sigma = require_matrix(params, "sigma");
    const SymMatrix c = require_matrix(params, "c");
    const double x = require_number(params, "x");
    json r = base_result(job);
    put_estimate(r, estimate_or_unconverged([&] { return qform_cdf(sigma, c, x, job.quadrature); }));
    r["eigenvalues"] = json::array();
    for (double l : qform_eigenvalues(sigma, c)) r["eigenvalues"].push_back(prob_value(l));
    if (const auto n = optional_count(params, "mc_samples"); n && *n > 0) {
        r["mc"] = mc_json(mc_qform(sigma, c, x, *n, seed_of(params)));
    }
    return r;
}

json run_mvgamma(const JobSpec& job)
{
    const json& params = job.params;
    MvGammaParams p;
    p.alpha = require_number(params, "alpha");
    p.sigma = require_matrix(params, "sigma");
    const std::vector<double> xs = require_numbers(params, "xs");
    json r = base_result(job);
    put_estimate(r, estimate_or_unconverged([&] { return mv_cdf(p, xs, job.quadrature); }));
    if (const auto n = optional_count(params, "mc_samples"); n && *n > 0) {
        r["mc"] = mc_json(mc_mvgamma(p.sigma, p.alpha, xs, *n, seed_of(params)));
    }
    return r;
}

json run_quantile(const JobSpec& job)
{
    const json& params = job.params;
    const GammaSumParams p = gamma_sum_params(params);
    const double prob = require_number(params, "prob");
    if (!(prob > 0.0 && prob < 1.0)) throw ValidationError("parameter 'prob' must lie in (0, 1)");
    json r = base_result(job);
    try {
        const double q = quantile(p, prob, job.quadrature);
        const CdfEstimate at = cdf(p, q, job.quadrature);
        r["quantile"] = prob_value(q);
        r["err_estimate"] = prob_value(std::abs(at.value - prob));
        r["converged"] = true;
        r["r_used"] = prob_value(at.r_used);
        r["nodes_used"] = at.nodes_used;
        r["warnings"] = at.warnings;
    } catch (const NonConvergence& e) {
        r["quantile"] = prob_value(e.last_estimate());
        r["err_estimate"] = prob_value(e.err_estimate());
        r["converged"] = false;
        r["r_used"] = 0.0;
        r["nodes_used"] = 0;
        r["warnings"] = json::array({e.what()});
    }
    return r;
}

// --- selfcheck --------------------------------------------------------------

struct Check {
    std::string name;
    std::function<std::string()> body;  // returns a detail string, throws or "FAIL:" on failure
};

json run_selfcheck(const JobSpec& job)
{
    auto close = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };
    std::vector<Check> checks;

    checks.push_back({"closed_form_integer_and_half_shapes", [&] {
        double worst = 0.0;
        for (int n = 0; n <= 5; ++n) {
            for (double y : {0.3, 1.0, 4.7}) {
                double s = 0.0;
                double term = 1.0;
                for (int k = 0; k <= n; ++k) {
                    s += term;
                    term *= y / (k + 1);
                }
                worst = std::max(worst, std::abs(reg_lower_gamma(1.0 + n, y) - (1.0 - std::exp(-y) * s)));
                double h = 0.0;
                for (int k = 1; k <= n; ++k) h += std::exp((k - 0.5) * std::log(y) - std::lgamma(k + 0.5));
                worst = std::max(worst, std::abs(reg_lower_gamma(0.5 + n, y) - (erf(std::sqrt(y)) - std::exp(-y) * h)));
            }
        }
        if (worst > 1e-12) return "FAIL: max deviation " + sci(worst);
        return "max deviation " + sci(worst);
    }});
    checks.push_back({"g_series_matches_closed_form", [&] {
        const Complex y = std::polar(0.6, std::numbers::pi / 3.0);
        const double diff = std::abs(g_series(0.5, 1.2, y, 1e-14).value - g_closed(0.5, 1.2, y));
        return diff <= 1e-10 ? "diff " + sci(diff) : "FAIL: diff " + sci(diff);
    }});
    checks.push_back({"hypoexponential_closed_form", [&] {
        const CdfEstimate e = cdf({{1.0, 1.0}, {1.0, 2.0}}, 2.0, job.quadrature);
        const double exact = 1.0 - 2.0 * std::exp(-1.0) + std::exp(-2.0);
        return close(e.value, exact, 1e-10) ? std::string("ok") : "FAIL: " + sci(e.value);
    }});
    const GammaSumParams mixed{{0.7, 1.3, 2.0}, {0.5, 1.0, 4.0}};
    checks.push_back({"radius_invariance", [&] {
        const DerivedParams d = derive_params(mixed);
        double lo = 1.0, hi = 0.0;
        for (double f : {0.1, 0.5, 0.9}) {
            QuadratureConfig cfg = job.quadrature;
            cfg.r = d.c_max_abs + f * (1.0 - d.c_max_abs);
            const double v = cdf(mixed, 6.0, cfg).raw_value;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return hi - lo <= 1e-8 ? "spread " + sci(hi - lo) : "FAIL: spread " + sci(hi - lo);
    }});
    checks.push_back({"series_oracle", [&] {
        const double a = cdf(mixed, 6.0, job.quadrature).value;
        const double b = series_cdf(mixed, 6.0, 1e-12).value;
        return close(a, b, 1e-8) ? std::string("ok") : "FAIL: " + sci(a) + " vs " + sci(b);
    }});
    checks.push_back({"monte_carlo_oracle", [&] {
        const double a = cdf(mixed, 6.0, job.quadrature).value;
        const McResult m = mc_cdf(mixed, 6.0, 100000, kDefaultSeed);
        return std::abs(a - m.estimate) <= 4.0 * m.std_error ? std::string("ok")
                                                             : "FAIL: mc " + sci(m.estimate);
    }});
    checks.push_back({"chi_square_two_median", [&] {
        const CdfEstimate e = qform_cdf(SymMatrix::identity(2), SymMatrix::identity(2), 2.0 * std::log(2.0));
        return close(e.value, 0.5, 1e-12) ? std::string("ok") : "FAIL: " + sci(e.value);
    }});
    checks.push_back({"mvgamma_independence", [&] {
        MvGammaParams p;
        p.alpha = 1.5;
        p.sigma = SymMatrix::diagonal({2.0, 2.0});
        const double v = mv_cdf(p, {3.0, 1.0}).value;
        const double exact = reg_lower_gamma(1.5, 1.5) * reg_lower_gamma(1.5, 0.5);
        return close(v, exact, 1e-8) ? std::string("ok") : "FAIL: " + sci(v);
    }});

    json r = base_result(job);
    r["checks"] = json::array();
    bool all = true;
    for (const Check& c : checks) {
        bool passed = false;
        std::string detail;
        try {
            detail = c.body();
            passed = detail.rfind("FAIL", 0) != 0;
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        all = all && passed;
        r["checks"].push_back({{"name", c.name}, {"passed", passed}, {"detail", detail}});
    }
    r["passed"] = all;
    r["converged"] = true;
    r["warnings"] = json::array();
    return r;
}

// --- output -----------------------------------------------------------------

std::string scalar_text(const json& v)
{
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array() && !v.empty() && v.front().is_string()) {
        std::string s;
        for (const json& e : v) s += (s.empty() ? "" : ";") + e.get<std::string>();
        return s;
    }
    return v.dump();
}

void emit(const json& result, OutputFormat fmt, std::ostream& out)
{
    switch (fmt) {
    case OutputFormat::json:
        out << result.dump() << '\n';
        return;
    case OutputFormat::csv: {
        std::vector<std::string> keys;
        for (const char* k : {"command", "cdf", "quantile", "err_estimate", "converged", "r_used",
                              "nodes_used", "passed", "warnings"}) {
            if (result.contains(k)) keys.emplace_back(k);
        }
        std::string header, row;
        for (const std::string& k : keys) {
            header += (header.empty() ? "" : ",") + k;
            std::string cell = scalar_text(result.at(k));
            if (cell.find_first_of(",\"") != std::string::npos) cell = '"' + cell + '"';
            row += (row.empty() && &k == &keys.front() ? "" : ",") + cell;
        }
        out << header << '\n' << row << '\n';
        return;
    }
    case OutputFormat::plain:
        for (const auto& [k, v] : result.items()) {
            if (k == "input_echo") continue;
            out << k << ": " << scalar_text(v) << '\n';
        }
        return;
    }
}

ExitCode exit_for(const json& result)
{
    if (result.contains("passed") && !result.at("passed").get<bool>()) return ExitCode::internal;
    if (result.contains("converged") && !result.at("converged").get<bool>()) {
        return ExitCode::non_convergence;
    }
    return ExitCode::ok;
}

bool is_validation_error(const std::exception& e)
{
    return dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
           dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DefinitenessError*>(&e) ||
           dynamic_cast<const json::exception*>(&e);
}

json error_object(const std::exception& e, bool validation)
{
    return {{"type", validation ? "validation" : "internal"}, {"message", e.what()}};
}

int run_batch(const std::string& path, std::ostream& out, std::ostream& err, int verbosity)
{
    std::ifstream file;
    std::istream* in = &std::cin;
    if (path != "-") {
        file.open(path);
        if (!file) {
            err << "gammasum: cannot open '" << path << "'\n";
            return static_cast<int>(ExitCode::validation);
        }
        in = &file;
    }
    bool any_internal = false, any_validation = false, any_unconverged = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(*in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json record;
        try {
            const JobSpec job = parse_job(json::parse(line));
            record = execute_job(job);
            if (exit_for(record) == ExitCode::non_convergence) any_unconverged = true;
            if (exit_for(record) == ExitCode::internal) any_internal = true;
        } catch (const std::exception& e) {
            const bool validation = is_validation_error(e);
            record = {{"error", error_object(e, validation)}};
            (validation ? any_validation : any_internal) = true;
        }
        record["line"] = line_no;
        if (verbosity > 0) err << "gammasum: batch line " << line_no << " done\n";
        out << record.dump() << '\n';
    }
    if (any_internal) return static_cast<int>(ExitCode::internal);
    if (any_validation) return static_cast<int>(ExitCode::validation);
    if (any_unconverged) return static_cast<int>(ExitCode::non_convergence);
    return static_cast<int>(ExitCode::ok);
}

}  // namespace

JobSpec parse_job(const json& record)
{
    if (!record.is_object()) throw ValidationError("job record must be a JSON object");
    check_keys(record, {"command", "params", "quadrature", "output_format"}, "job record");
    if (!record.contains("command") || !record.at("command").is_string()) {
        throw ValidationError("job record needs a string 'command'");
    }
    JobSpec job;
    job.command = parse_command(record.at("command").get<std::string>());
    if (record.contains("params")) {
        if (!record.at("params").is_object()) throw ValidationError("'params' must be an object");
        job.params = record.at("params");
    }
    if (record.contains("output_format")) {
        if (!record.at("output_format").is_string()) throw ValidationError("'output_format' must be a string");
        job.output_format = parse_format(record.at("output_format").get<std::string>());
    }
    if (record.contains("quadrature")) {
        const json& q = record.at("quadrature");
        if (!q.is_object()) throw ValidationError("'quadrature' must be an object");
        check_keys(q, {"r", "tol", "n_start", "n_max"}, "quadrature");
        if (q.contains("r")) job.quadrature.r = require_number(q, "r");
        if (q.contains("tol")) job.quadrature.tol = require_number(q, "tol");
        if (const auto n = optional_count(q, "n_start")) job.quadrature.n_start = *n;
        if (const auto n = optional_count(q, "n_max")) job.quadrature.n_max = *n;
        job.quadrature_echo = q;
    }
    try {
        job.quadrature.validate();
    } catch (const ConfigError& e) {
        throw ValidationError(e.what());
    }

    const json& p = job.params;
    switch (job.command) {
    case Command::gamma_sum:
        check_keys(p, {"alphas", "lambdas", "x", "series", "mc_samples", "seed"}, "gamma-sum params");
        gamma_sum_params(p);
        require_number(p, "x");
        if (p.contains("series") && !p.at("series").is_boolean()) throw ValidationError("'series' must be a boolean");
        optional_count(p, "mc_samples");
        seed_of(p);
        break;
    case Command::quantile:
        check_keys(p, {"alphas", "lambdas", "prob"}, "quantile params");
        gamma_sum_params(p);
        if (const double prob = require_number(p, "prob"); !(prob > 0.0 && prob < 1.0)) {
            throw ValidationError("parameter 'prob' must lie in (0, 1)");
        }
        break;
    case Command::qform: {
        check_keys(p, {"sigma", "c", "x", "mc_samples", "seed"}, "qform params");
        const SymMatrix s = require_matrix(p, "sigma");
        const SymMatrix c = require_matrix(p, "c");
        if (s.dim() != c.dim()) throw ValidationError("'sigma' and 'c' differ in dimension");
        require_number(p, "x");
        optional_count(p, "mc_samples");
        seed_of(p);
        break;
    }
    case Command::mvgamma: {
        check_keys(p, {"alpha", "sigma", "xs", "mc_samples", "seed"}, "mvgamma params");
        MvGammaParams mp;
        mp.alpha = require_number(p, "alpha");
        mp.sigma = require_matrix(p, "sigma");
        mp.validate();
        if (require_numbers(p, "xs").size() != mp.sigma.dim()) {
            throw ValidationError("'xs' length differs from the dimension of 'sigma'");
        }
        optional_count(p, "mc_samples");
        seed_of(p);
        break;
    }
    case Command::selfcheck:
        check_keys(p, {}, "selfcheck params");
        break;
    }
    return job;
}

json execute_job(const JobSpec& job)
{
    switch (job.command) {
    case Command::gamma_sum: return run_gamma_sum(job);
    case Command::qform: return run_qform(job);
    case Command::mvgamma: return run_mvgamma(job);
    case Command::quantile: return run_quantile(job);
    case Command::selfcheck: return run_selfcheck(job);
    }
    throw Error("unreachable command");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    const int verbosity = log_level();

    CLI::App app{"Distribution functions of gamma sums, Gaussian quadratic forms and "
                 "multivariate gamma laws", "gammasum"};
    app.require_subcommand(1);

    std::optional<double> r;
    double tol = QuadratureConfig{}.tol;
    std::size_t n_max = QuadratureConfig{}.n_max;
    std::size_t n_start = QuadratureConfig{}.n_start;
    std::uint64_t seed = kDefaultSeed;
    std::string format = "json";
    std::size_t mc_samples = 0;

    std::vector<double> alphas, lambdas, xs;
    double x = 0.0, prob = 0.0, alpha = 0.0;
    std::string sigma, cmat;
    bool with_series = false;
    std::string batch_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--r", r, "contour radius in (c_max, 1); default (1 + c_max) / 2");
        sub->add_option("--tol", tol, "refinement tolerance")->capture_default_str();
        sub->add_option("--n-max", n_max, "node cap")->capture_default_str();
        sub->add_option("--n-start", n_start, "initial node count")->capture_default_str();
        sub->add_option("--seed", seed, "Monte Carlo seed")->capture_default_str();
        sub->add_option("--format", format, "json, csv or plain")
            ->check(CLI::IsMember({"json", "csv", "plain"}))
            ->capture_default_str();
    };

    CLI::App* gs = app.add_subcommand("gamma-sum", "CDF of a sum of independent gamma variables");
    gs->add_option("--alphas", alphas, "shape parameters")->required();
    gs->add_option("--lambdas", lambdas, "scale parameters")->required();
    gs->add_option("--x", x, "evaluation point")->required();
    gs->add_flag("--series", with_series, "also report the series reference");
    gs->add_option("--mc", mc_samples, "also report a Monte Carlo estimate with this many draws");
    add_common(gs);

    CLI::App* qf = app.add_subcommand("qform", "CDF of X'CX for X ~ N(0, Sigma)");
    qf->add_option("--sigma", sigma, "covariance: JSON rows, I<k> or diag:a,b,...")->required();
    qf->add_option("--c", cmat, "form matrix: JSON rows, I<k> or diag:a,b,...")->required();
    qf->add_option("--x", x, "evaluation point")->required();
    qf->add_option("--mc", mc_samples, "also report a Monte Carlo estimate with this many draws");
    add_common(qf);

    CLI::App* mv = app.add_subcommand("mvgamma", "CDF of a p-variate gamma distribution, p <= 3");
    mv->add_option("--alpha", alpha, "shape")->required();
    mv->add_option("--sigma", sigma, "positive definite p x p matrix")->required();
    mv->add_option("--xs", xs, "evaluation point, one value per coordinate")->required();
    mv->add_option("--mc", mc_samples, "also report a Wishart-diagonal Monte Carlo estimate");
    add_common(mv);

    CLI::App* qt = app.add_subcommand("quantile", "inverse CDF of a gamma sum");
    qt->add_option("--alphas", alphas, "shape parameters")->required();
    qt->add_option("--lambdas", lambdas, "scale parameters")->required();
    qt->add_option("--prob", prob, "probability in (0, 1)")->required();
    add_common(qt);

    CLI::App* sc = app.add_subcommand("selfcheck", "closed-form and oracle cross-checks");
    add_common(sc);

    CLI::App* bt = app.add_subcommand("batch", "one JSON job per line; '-' reads stdin");
    bt->add_option("file", batch_path, "input file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "gammasum: " << e.what() << '\n';
        return static_cast<int>(ExitCode::validation);
    }

    if (bt->parsed()) return run_batch(batch_path, out, err, verbosity);

    json record;
    json params = json::object();
    if (gs->parsed()) {
        record["command"] = "gamma-sum";
        params = {{"alphas", alphas}, {"lambdas", lambdas}, {"x", x}};
        if (with_series) params["series"] = true;
    } else if (qf->parsed()) {
        record["command"] = "qform";
        params = {{"sigma", sigma}, {"c", cmat}, {"x", x}};
    } else if (mv->parsed()) {
        record["command"] = "mvgamma";
        params = {{"alpha", alpha}, {"sigma", sigma}, {"xs", xs}};
    } else if (qt->parsed()) {
        record["command"] = "quantile";
        params = {{"alphas", alphas}, {"lambdas", lambdas}, {"prob", prob}};
    } else {
        record["command"] = "selfcheck";
    }
    if (mc_samples > 0) {
        params["mc_samples"] = mc_samples;
        params["seed"] = seed;
    }
    record["params"] = params;
    record["output_format"] = format;
    json quad = json::object();
    if (r) quad["r"] = *r;
    if (tol != QuadratureConfig{}.tol) quad["tol"] = tol;
    if (n_max != QuadratureConfig{}.n_max) quad["n_max"] = n_max;
    if (n_start != QuadratureConfig{}.n_start) quad["n_start"] = n_start;
    if (!quad.empty()) record["quadrature"] = quad;

    const auto started = std::chrono::steady_clock::now();
    try {
        const JobSpec job = parse_job(record);
        const json result = execute_job(job);
        emit(result, job.output_format, out);
        if (verbosity > 0) {
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            err << "gammasum: " << record["command"].get<std::string>() << " finished in " << secs
                << " s\n";
            if (verbosity > 1) err << "gammasum: record " << record.dump() << '\n';
        }
        return static_cast<int>(exit_for(result));
    } catch (const std::exception& e) {
        const bool validation = is_validation_error(e);
        err << "gammasum: " << (validation ? "invalid input: " : "internal error: ") << e.what()
            << '\n';
        return static_cast<int>(validation ? ExitCode::validation : ExitCode::internal);
    }
}

}  // namespace gammasum::cli
