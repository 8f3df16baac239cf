#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "reflev/model.hpp"

namespace reflev {

// Resolved run configuration. File values are overridden by flags; the
// published config-file keys are listed in the README and unknown keys are
// rejected.
struct RunConfig {
    std::string command;  // gamma|constants|identity-check|simulate|tail|tail-fit|poisson
    std::string model_kind;  // twopoint|gaussian|cpd|brownian
    std::optional<double> p, a_up, a_down;
    std::optional<double> mu, sigma;
    std::optional<double> c, rho, nu;
    std::uint64_t seed = 42;
    int workers = 1;
    std::uint64_t budget = 100'000;
    double horizon = 10'000.0;  // steps for walks, time for Levy kinds
    std::size_t replications = 2000;
    std::optional<double> y;
    std::optional<double> lambda;
    std::vector<double> x_grid;
    std::string out;            // empty writes to stdout
    std::string format = "json";
    std::size_t k_max = 10;     // identity-check depth
    std::size_t batches = 10;   // tail batches
    double tol = 1e-12;         // root solver tolerance
};

// Flat key-value text with [model] and [run] sections.
RunConfig parse_config_file(std::istream& in);
RunConfig parse_config_path(const std::string& path);

// "1,2,3.5" or "lo:hi:step"
std::vector<double> parse_x_grid(const std::string& text);

ModelSpec build_model(const RunConfig& config);

void validate_config(const RunConfig& config);

}  // namespace reflev
