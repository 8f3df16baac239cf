#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "reflev/config.hpp"
#include "reflev/constants.hpp"

namespace reflev {

using Json = nlohmann::ordered_json;

std::string version_string();

// Shortest representation that round-trips to the same double.
std::string format_double(double v);

const char* method_name(EstimateMethod method);

Json result_entry(double value, double stderr_, EstimateMethod method);
Json result_entry(const EstimateWithCI& estimate);

// Resolved config echo. Execution-topology keys (workers, out) are excluded
// so reruns that differ only in parallel layout emit identical reports.
Json config_echo(const RunConfig& config);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Assembles the versioned CSV text: one comment line carrying version and
// seed, a header row, then data rows.
std::string render_csv(const RunConfig& config, const CsvTable& table);

// Full JSON report: {config, seed, version, results, timings}.
std::string render_json(const RunConfig& config, const Json& results, double wall_ms);

// Writes to config.out, or stdout when empty.
void write_report_text(const RunConfig& config, const std::string& text);

}  // namespace reflev
