#include "reflev/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "reflev/errors.hpp"

namespace reflev {

std::string version_string() {
    return std::string(REFLEV_VERSION) + "+g" + REFLEV_GIT_REV;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

const char* method_name(EstimateMethod method) {
    return method == EstimateMethod::ClosedForm ? "closed_form" : "monte_carlo";
}

Json result_entry(double value, double stderr_, EstimateMethod method) {
    Json j;
    j["value"] = value;
    j["stderr"] = stderr_;
    j["method"] = method_name(method);
    return j;
}

Json result_entry(const EstimateWithCI& estimate) {
    Json j = result_entry(estimate.value, estimate.stderr_, estimate.method);
    if (estimate.n > 0) j["n"] = estimate.n;
    return j;
}

Json config_echo(const RunConfig& config) {
    Json model;
    model["kind"] = config.model_kind;
    auto put = [&](const char* name, const std::optional<double>& v) {
        if (v) model[name] = *v;
    };
    put("p", config.p);
    put("a_up", config.a_up);
    put("a_down", config.a_down);
    put("mu", config.mu);
    put("sigma", config.sigma);
    put("c", config.c);
    put("rho", config.rho);
    put("nu", config.nu);

    Json j;
    j["command"] = config.command;
    j["model"] = model;
    j["seed"] = config.seed;
    j["budget"] = config.budget;
    j["horizon"] = config.horizon;
    j["replications"] = config.replications;
    if (config.y) j["y"] = *config.y;
    if (config.lambda) j["lambda"] = *config.lambda;
    if (!config.x_grid.empty()) j["x_grid"] = config.x_grid;
    j["format"] = config.format;
    j["k_max"] = config.k_max;
    j["batches"] = config.batches;
    j["tol"] = config.tol;
    return j;
}

std::string render_csv(const RunConfig& config, const CsvTable& table) {
    std::string out = "# reflev " + version_string() + " schema=" + config.command +
                      ".v1 seed=" + std::to_string(config.seed) + "\n";
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out += ',';
        out += table.header[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const RunConfig& config, const Json& results, double wall_ms) {
    Json j;
    j["config"] = config_echo(config);
    j["seed"] = config.seed;
    j["version"] = version_string();
    j["results"] = results;
    j["timings"] = Json{{"wall_ms", wall_ms}};
    return j.dump(2) + "\n";
}

void write_report_text(const RunConfig& config, const std::string& text) {
    if (config.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(config.out, std::ios::binary);
    if (!f) throw_error(ErrorCode::ConfigError, "cannot open output file: " + config.out);
    f << text;
}

}  // namespace reflev
