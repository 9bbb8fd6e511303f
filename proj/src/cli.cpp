#include "qhsub/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "qhsub/decay.hpp"
#include "qhsub/errors.hpp"
#include "qhsub/json_io.hpp"

namespace qhsub {

namespace {

namespace fs = std::filesystem;

RunDirection parse_direction(const std::string& s) {
    if (s == "pos") return RunDirection::Pos;
    if (s == "neg") return RunDirection::Neg;
    if (s == "both") return RunDirection::Both;
    throw MalformedInput("direction must be one of pos|neg|both");
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw MalformedInput("cannot open output file " + path.string());
    out << text;
}

void write_json(const fs::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

/// Wall-clock metadata goes into a sidecar so the primary outputs stay
/// byte-identical for identical config + seed.
void write_sidecar(const RunConfig& config, const std::string& command) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    ordered_json j{{"command", command},
                   {"seed", config.seed},
                   {"unix_millis", std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
    write_json(fs::path(config.output_dir) / "run_meta.json", j);
}

ordered_json config_echo(const RunConfig& config) {
    return ordered_json{{"direction", config.direction == RunDirection::Pos   ? "pos"
                                      : config.direction == RunDirection::Neg ? "neg"
                                                                              : "both"},
                        {"grid", to_json(config.grid)},
                        {"sweep", ordered_json{{"xi_min", config.sweep.xi_min},
                                               {"xi_max", config.sweep.xi_max},
                                               {"n_points", config.sweep.n_points}}},
                        {"seed", config.seed},
                        {"n_samples", config.n_samples}};
}

std::vector<Certificate::Direction> requested_directions(const RunConfig& config) {
    switch (config.direction) {
        case RunDirection::Pos:
            return {Certificate::Direction::XiPositive};
        case RunDirection::Neg:
            return {Certificate::Direction::XiNegative};
        default:
            return {Certificate::Direction::XiPositive, Certificate::Direction::XiNegative};
    }
}

const char* direction_key(Certificate::Direction d) {
    return d == Certificate::Direction::XiPositive ? "xi_positive" : "xi_negative";
}

std::string verdict_summary(const H2Verdict& v) {
    std::string s = v.pass ? "PASS" : "FAIL";
    for (int i = 0; i < 5; ++i) {
        s += "\n  item " + std::to_string(i + 1) + ": " + (v.items[i].pass ? "pass" : "FAIL") + "  " +
             v.items[i].detail;
    }
    s += "\n  p_global = " + v.p_global.str() + ", components = " + std::to_string(v.components.size()) +
         ", zeros = " + std::to_string(v.zeros.size()) + ", resolution = " + std::to_string(v.resolution);
    return s;
}

}  // namespace

RunConfig load_config(const std::optional<std::string>& config_path, const std::optional<std::string>& builtin,
                      const std::optional<std::string>& direction, const std::optional<std::string>& out_dir,
                      const std::optional<std::uint64_t>& seed) {
    RunConfig config;
    if (config_path) {
        std::ifstream in(*config_path);
        if (!in) throw MalformedInput("cannot read config file " + *config_path);
        ordered_json j;
        try {
            j = ordered_json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedInput(std::string("config is not valid JSON: ") + e.what());
        }
        if (j.contains("symbol")) config.symbol_text = j["symbol"].dump();
        if (j.contains("direction")) config.direction = parse_direction(j["direction"].get<std::string>());
        if (j.contains("grid")) config.grid = grid_from_json(j["grid"]);
        if (j.contains("sweep")) {
            config.sweep.xi_min = j["sweep"].value("xi_min", config.sweep.xi_min);
            config.sweep.xi_max = j["sweep"].value("xi_max", config.sweep.xi_max);
            config.sweep.n_points = j["sweep"].value("n_points", config.sweep.n_points);
        }
        if (j.contains("out")) config.output_dir = j["out"].get<std::string>();
        if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("n_samples")) config.n_samples = j["n_samples"].get<int>();
        if (j.contains("operator_ratio")) config.operator_ratio = j["operator_ratio"].get<bool>();
    }
    if (builtin) config.symbol_text = "{\"builtin\":\"" + *builtin + "\"}";
    if (direction) config.direction = parse_direction(*direction);
    if (out_dir) config.output_dir = *out_dir;
    if (seed) config.seed = *seed;
    if (config.symbol_text.empty())
        throw MalformedInput("no symbol given: pass --builtin <name> or a config file with a \"symbol\" entry");
    if (!(config.sweep.xi_min > 0) || !(config.sweep.xi_max > config.sweep.xi_min))
        throw MalformedInput("sweep bounds must satisfy 0 < xi_min < xi_max");
    return config;
}

int cmd_check(const RunConfig& config) {
    QhSymbol sym = parse_symbol(config.symbol_text);
    ordered_json out{{"symbol", sym.digest()}, {"config", config_echo(config)}};
    bool all_pass = true;
    for (Certificate::Direction dir : requested_directions(config)) {
        const QhSymbol working = dir == Certificate::Direction::XiNegative ? negate(sym) : sym;
        const H2Verdict verdict = check_H2(working, config.n_samples);
        all_pass = all_pass && verdict.pass;
        out[direction_key(dir)] = to_json(verdict);
        std::cout << "check " << direction_key(dir) << " [" << sym.describe() << "]: " << verdict_summary(verdict)
                  << "\n";
    }
    write_json(fs::path(config.output_dir) / "verdict.json", out);
    write_sidecar(config, "check");
    return all_pass ? 0 : 2;
}

int cmd_certify(const RunConfig& config) {
    QhSymbol sym = parse_symbol(config.symbol_text);
    ordered_json out{{"symbol", sym.digest()}, {"config", config_echo(config)}};
    bool all_pass = true;
    for (Certificate::Direction dir : requested_directions(config)) {
        const PipelineResult result = run_pipeline(sym, dir, config.grid, config.n_samples, config.seed);
        ordered_json entry;
        if (!result.certificate) {
            entry["refused"] = true;
            entry["verdict"] = to_json(result.verdict);
            all_pass = false;
            std::cout << "certify " << direction_key(dir) << ": refused (profile check failed)\n"
                      << verdict_summary(result.verdict) << "\n";
        } else {
            const Certificate& cert = *result.certificate;
            entry = to_json(cert);
            entry["verdict"] = to_json(result.verdict);
            all_pass = all_pass && cert.pass;
            std::cout << "certify " << direction_key(dir) << ": " << (cert.pass ? "PASS" : "FAIL")
                      << "  a = " << cert.a.str() << ", order = " << cert.s_order.str() << ", C1 = " << cert.C1
                      << ", C2 = " << cert.C2 << ", C3 = " << cert.C3 << ", omega = " << cert.omega_radius << "\n";
            if (!cert.pass) {
                for (const auto* c : {&cert.escape, &cert.dtau_bound, &cert.jacobian_bound, &cert.growth_bound})
                    if (!c->pass) std::cout << "  witness: " << c->witness << "\n";
            }
        }
        out[direction_key(dir)] = entry;
    }
    write_json(fs::path(config.output_dir) / "certificate.json", out);
    write_sidecar(config, "certify");
    return all_pass ? 0 : 2;
}

namespace {

/// Reuse a cached certificate when its digest, grid and seed match the
/// current configuration.
std::optional<Certificate> load_cached_certificate(const RunConfig& config, const QhSymbol& sym,
                                                   Certificate::Direction dir) {
    const fs::path path = fs::path(config.output_dir) / "certificate.json";
    std::ifstream in(path);
    if (!in) return std::nullopt;
    ordered_json j;
    try {
        j = ordered_json::parse(in);
        const char* key = direction_key(dir);
        if (!j.contains(key) || j[key].value("refused", false)) return std::nullopt;
        Certificate cert = certificate_from_json(j[key]);
        if (cert.symbol_digest != sym.digest() || cert.seed != config.seed) return std::nullopt;
        if (cert.grid.radial_points != config.grid.radial_points ||
            cert.grid.angular_points != config.grid.angular_points ||
            cert.grid.tau_points != config.grid.tau_points)
            return std::nullopt;
        if (!cert.pass) return std::nullopt;
        return cert;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

int cmd_estimate(const RunConfig& config) {
    QhSymbol sym = parse_symbol(config.symbol_text);
    ordered_json out{{"symbol", sym.digest()}, {"config", config_echo(config)}};
    std::string csv = "xi,M,operator_ratio\n";
    bool fit_failed = false;
    bool refused = false;
    for (Certificate::Direction dir : requested_directions(config)) {
        std::optional<Certificate> cert = load_cached_certificate(config, sym, dir);
        if (!cert) {
            PipelineResult result = run_pipeline(sym, dir, config.grid, config.n_samples, config.seed);
            if (!result.certificate || !result.certificate->pass) {
                std::cout << "estimate " << direction_key(dir) << ": refused (no passing certificate)\n";
                out[direction_key(dir)] = ordered_json{{"refused", true}};
                refused = true;
                continue;
            }
            cert = std::move(result.certificate);
        }
        const QhSymbol working = dir == Certificate::Direction::XiNegative ? negate(sym) : sym;
        DecayReport report;
        try {
            report = sweep_and_fit(working, *cert, config.sweep.xi_min, config.sweep.xi_max, config.sweep.n_points,
                                   config.operator_ratio);
        } catch (const FitUnstable& e) {
            std::cout << "estimate " << direction_key(dir) << ": unstable fit (" << e.what() << ")\n";
            out[direction_key(dir)] = ordered_json{{"fit_unstable", true}, {"detail", e.what()}};
            fit_failed = true;
            continue;
        }
        out[direction_key(dir)] = to_json(report);
        for (std::size_t i = 0; i < report.xi_grid.size(); ++i) {
            csv += std::to_string(report.xi_grid[i]) + "," + std::to_string(report.kernel_norm[i]) + ",";
            if (!report.operator_ratio.empty()) csv += std::to_string(report.operator_ratio[i]);
            csv += "\n";
        }
        std::cout << "estimate " << direction_key(dir) << ": fitted slope = " << report.fitted_slope
                  << ", predicted = " << report.predicted_slope << ", residual = " << report.fit_residual << "\n";
    }
    write_text(fs::path(config.output_dir) / "decay.csv", csv);
    write_json(fs::path(config.output_dir) / "report.json", out);
    write_sidecar(config, "estimate");
    if (fit_failed) return 3;
    return refused ? 2 : 0;
}

int cmd_examples_list() {
    for (const std::string& name : builtin_names())
        std::cout << name << "  -  " << builtin_description(name) << "\n";
    return 0;
}

}  // namespace qhsub
