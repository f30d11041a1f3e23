#include "curveshift/io.hpp"

#include "curveshift/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace curveshift {

Orientation orientation_from_string(const std::string& name) {
    if (name == "convex") return Orientation::Convex;
    if (name == "concave") return Orientation::Concave;
    throw Error(ErrorCode::InvalidArgument, "orientation must be convex|concave");
}

const char* orientation_name(Orientation o) {
    return o == Orientation::Convex ? "convex" : "concave";
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool parse_number(const std::string& token, double& out) {
    const char* begin = token.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + token.size() && end != begin;
}

} // namespace

Sample ingest_csv(const std::string& path, Orientation orientation) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        std::string token = trim(line);
        if (!token.empty() && token.back() == ',') token.pop_back();
        token = trim(token);
        if (token.empty()) continue;
        double v = 0.0;
        if (!parse_number(token, v)) {
            const bool has_alpha = std::any_of(token.begin(), token.end(), [](char c) {
                return std::isalpha(static_cast<unsigned char>(c));
            });
            if (first_content && has_alpha) { // header
                first_content = false;
                continue;
            }
            throw Error(ErrorCode::ParseError,
                        path + ":" + std::to_string(line_no) + ": cannot parse '" +
                            token + "'");
        }
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::ParseError,
                        path + ":" + std::to_string(line_no) + ": non-finite value");
        }
        first_content = false;
        values.push_back(v);
    }
    if (values.size() < 10) {
        throw Error(ErrorCode::TooFewRows,
                    path + ": need at least 10 rows, got " +
                        std::to_string(values.size()));
    }
    return make_sample(std::move(values), orientation);
}

void apply_config_file(const std::string& path, PipelineConfig& config) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open config '" + path + "'");
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        if (key == "kernel") config.kernel = kernel_choice_from_string(value.get<std::string>());
        else if (key == "bandwidth1") config.bandwidth1 = value.get<double>();
        else if (key == "bandwidth2") config.bandwidth2 = value.get<double>();
        else if (key == "gcv_grid") config.gcv_grid = value.get<std::vector<double>>();
        else if (key == "N") config.N = value.get<std::size_t>();
        else if (key == "hd1") config.hd1 = value.get<double>();
        else if (key == "hd2") config.hd2 = value.get<double>();
        else if (key == "hd_scale") config.hd_scale = value.get<double>();
        else if (key == "hd_exponent") config.hd_exponent = value.get<double>();
        else if (key == "eta") config.eta = value.get<double>();
        else if (key == "L") config.L = value.get<std::size_t>();
        else if (key == "M") config.M = value.get<std::size_t>();
        else if (key == "shift_grid") config.shift_grid = value.get<std::size_t>();
        else if (key == "cache_nodes") config.cache_nodes = value.get<std::size_t>();
        else if (key == "lrv_m") config.lrv_m = value.get<std::size_t>();
        else if (key == "lrv_tau") config.lrv_tau = value.get<double>();
        else if (key == "lrv_detrend") config.lrv_detrend = value.get<bool>();
        else if (key == "B") config.B = value.get<std::size_t>();
        else if (key == "alpha") config.alpha = value.get<double>();
        else if (key == "seed") config.seed = value.get<std::uint64_t>();
        else if (key == "threads") config.threads = value.get<unsigned>();
        else if (key == "kernel_quad") config.kernel_quad = value.get<std::size_t>();
        else throw Error(ErrorCode::ParseError, path + ": unknown key '" + key + "'");
    }
}

ordered_json config_json(const PipelineConfig& config) {
    ordered_json j;
    j["kernel"] = kernel_choice_name(config.kernel);
    if (config.bandwidth1) j["bandwidth1"] = *config.bandwidth1;
    if (config.bandwidth2) j["bandwidth2"] = *config.bandwidth2;
    if (!config.gcv_grid.empty()) j["gcv_grid"] = config.gcv_grid;
    if (config.N) j["N"] = *config.N;
    if (config.hd1) j["hd1"] = *config.hd1;
    if (config.hd2) j["hd2"] = *config.hd2;
    j["hd_scale"] = config.hd_scale;
    j["hd_exponent"] = config.hd_exponent;
    j["eta"] = config.eta;
    j["L"] = config.L;
    j["M"] = config.M;
    j["shift_grid"] = config.shift_grid;
    j["cache_nodes"] = config.cache_nodes;
    if (config.lrv_m) j["lrv_m"] = *config.lrv_m;
    if (config.lrv_tau) j["lrv_tau"] = *config.lrv_tau;
    j["lrv_detrend"] = config.lrv_detrend;
    j["B"] = config.B;
    j["alpha"] = config.alpha;
    j["seed"] = config.seed;
    return j;
}

ordered_json report_json(const PipelineResult& result, const PipelineConfig& config) {
    ordered_json j;
    j["config"] = config_json(config);
    j["effective"] = {
        {"n1", result.n1},     {"n2", result.n2},   {"b1", result.b1},
        {"b2", result.b2},     {"hd1", result.hd1}, {"hd2", result.hd2},
        {"N", result.N},       {"lrv_m", result.lrv_m},
        {"lrv_tau", result.lrv_tau},
    };
    j["shift"] = {
        {"c_prelim", result.shift.c_prelim},
        {"c_hat", result.shift.c_hat},
        {"d_hat", result.shift.d_hat},
        {"a_hat", result.shift.a_hat},
        {"b_hat", result.shift.b_hat},
        {"swapped", result.shift.swapped},
        {"eta", result.shift.eta},
        {"c_hat_input_order", result.c_hat_input_order()},
        {"d_hat_input_order", result.d_hat_input_order()},
        {"sign_note", "c_hat/d_hat relate the internal (possibly swapped, possibly "
                      "negated) curves; *_input_order map back to the supplied order "
                      "and original response sign"},
    };
    j["window"] = {result.window.lo, result.window.hi};
    j["statistic"] = {{"T", result.stat.value}, {"M", result.stat.grid_size}};
    const auto& d = result.boot.draws;
    auto q = [&d](double p) {
        const std::size_t idx = static_cast<std::size_t>(
            p * static_cast<double>(d.size() - 1) + 0.5);
        return d[std::min(idx, d.size() - 1)];
    };
    j["bootstrap"] = {
        {"B", result.boot.B},
        {"alpha", result.boot.alpha},
        {"seed", result.boot.seed},
        {"p_value", result.boot.p_value},
        {"reject", result.boot.reject},
        {"draws", {{"min", d.front()}, {"q25", q(0.25)}, {"median", q(0.5)},
                   {"q75", q(0.75)}, {"max", d.back()}}},
    };
    j["device"] = {{"L", result.device_points},
                   {"max_abs_diff", result.device_max_abs_diff}};
    return j;
}

ordered_json scenario_json(const ScenarioSpec& spec, const ScenarioResult& result,
                           std::uint64_t seed) {
    ordered_json j;
    j["scenario"] = regression_pair_name(spec.pair);
    j["n"] = spec.n;
    j["runs"] = spec.runs;
    j["B"] = spec.B;
    j["seed"] = seed;
    j["alphas"] = result.alphas;
    j["rejection_rates"] = result.rejection_rates;
    j["mc_std_errors"] = result.mc_std_errors;
    j["successes"] = result.successes;
    j["failures"] = result.failures;
    ordered_json runs = ordered_json::array();
    for (const auto& diag : result.diagnostics) {
        ordered_json r;
        r["run"] = diag.run;
        if (!diag.error.empty()) {
            r["error"] = diag.error;
        } else {
            r["T"] = diag.T;
            r["p_value"] = diag.p_value;
            r["c_hat"] = diag.c_hat;
            r["d_hat"] = diag.d_hat;
            r["swapped"] = diag.swapped;
            r["rejections"] = diag.rejections;
        }
        runs.push_back(std::move(r));
    }
    j["per_run"] = std::move(runs);
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write '" + path + "'");
    out << text;
}

} // namespace curveshift
