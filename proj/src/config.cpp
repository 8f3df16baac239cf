#include "reflev/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "reflev/errors.hpp"

namespace reflev {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw_error(ErrorCode::ConfigError, "bad numeric value for '" + key + "': " + value);
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw_error(ErrorCode::ConfigError, "bad integer value for '" + key + "': " + value);
    }
}

}  // namespace

std::vector<double> parse_x_grid(const std::string& text) {
    std::vector<double> out;
    if (text.empty()) return out;
    if (text.find(':') != std::string::npos) {
        double lo = 0, hi = 0, step = 0;
        char c1 = 0, c2 = 0;
        std::istringstream is(text);
        if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
            !(step > 0.0) || hi < lo)
            throw_error(ErrorCode::ConfigError, "bad x-grid range: " + text);
        for (double x = lo; x <= hi + 1e-12 * step; x += step) out.push_back(x);
        return out;
    }
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) out.push_back(to_double("x-grid", trim(item)));
    return out;
}

RunConfig parse_config_file(std::istream& in) {
    RunConfig config;
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw_error(ErrorCode::ConfigError, "bad section header: " + line);
            section = trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "run")
                throw_error(ErrorCode::ConfigError, "unknown section: " + section);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw_error(ErrorCode::ConfigError, "expected key = value at line " +
                                                    std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (section == "model") {
            if (key == "kind") config.model_kind = value;
            else if (key == "p") config.p = to_double(key, value);
            else if (key == "a_up") config.a_up = to_double(key, value);
            else if (key == "a_down") config.a_down = to_double(key, value);
            else if (key == "mu") config.mu = to_double(key, value);
            else if (key == "sigma") config.sigma = to_double(key, value);
            else if (key == "c") config.c = to_double(key, value);
            else if (key == "rho") config.rho = to_double(key, value);
            else if (key == "nu") config.nu = to_double(key, value);
            else throw_error(ErrorCode::ConfigError, "unknown [model] key: " + key);
        } else if (section == "run") {
            if (key == "command") config.command = value;
            else if (key == "seed") config.seed = to_u64(key, value);
            else if (key == "workers") config.workers = static_cast<int>(to_u64(key, value));
            else if (key == "budget") config.budget = to_u64(key, value);
            else if (key == "horizon") config.horizon = to_double(key, value);
            else if (key == "replications") config.replications = to_u64(key, value);
            else if (key == "y") config.y = to_double(key, value);
            else if (key == "lambda") config.lambda = to_double(key, value);
            else if (key == "x_grid") config.x_grid = parse_x_grid(value);
            else if (key == "out") config.out = value;
            else if (key == "format") config.format = value;
            else if (key == "k_max") config.k_max = to_u64(key, value);
            else if (key == "batches") config.batches = to_u64(key, value);
            else if (key == "tol") config.tol = to_double(key, value);
            else throw_error(ErrorCode::ConfigError, "unknown [run] key: " + key);
        } else {
            throw_error(ErrorCode::ConfigError, "key outside a section: " + key);
        }
    }
    return config;
}

RunConfig parse_config_path(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_error(ErrorCode::ConfigError, "cannot open config file: " + path);
    return parse_config_file(in);
}

ModelSpec build_model(const RunConfig& config) {
    const std::string& kind = config.model_kind;
    auto need = [&](const std::optional<double>& v, const char* name) {
        if (!v)
            throw_error(ErrorCode::ConfigError,
                        "model '" + kind + "' needs parameter " + name);
        return *v;
    };
    if (kind == "twopoint") {
        return ModelSpec::two_point(need(config.p, "p"),
                                    config.a_up.value_or(1.0),
                                    config.a_down.value_or(1.0));
    }
    if (kind == "gaussian") {
        return ModelSpec::gaussian(need(config.mu, "mu"), need(config.sigma, "sigma"));
    }
    if (kind == "cpd") {
        return ModelSpec::compound_poisson_drift(need(config.c, "c"),
                                                 need(config.rho, "rho"),
                                                 need(config.nu, "nu"));
    }
    if (kind == "brownian") {
        return ModelSpec::brownian_drift(need(config.mu, "mu"),
                                         need(config.sigma, "sigma"));
    }
    throw_error(ErrorCode::ConfigError, "unknown model kind: " + kind);
}

void validate_config(const RunConfig& config) {
    static const char* kCommands[] = {"gamma",    "constants", "identity-check",
                                      "simulate", "tail",      "tail-fit",
                                      "poisson"};
    if (std::find(std::begin(kCommands), std::end(kCommands), config.command) ==
        std::end(kCommands))
        throw_error(ErrorCode::ConfigError, "unknown command: " + config.command);
    if (config.format != "csv" && config.format != "json")
        throw_error(ErrorCode::ConfigError, "format must be csv or json");
    if (config.workers < 1)
        throw_error(ErrorCode::ConfigError, "workers must be >= 1");
    if (config.model_kind.empty())
        throw_error(ErrorCode::ConfigError, "a model kind is required");
}

}  // namespace reflev
