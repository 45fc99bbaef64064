#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace isingps {

// One output row. `pair` is "" (scalar observable), a site index, "i-j", or
// "nn" for the bond average. Oracle columns are empty when no oracle applies.
struct ResultRecord {
  double beta = 0.0;
  std::string observable;
  std::string pair;
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t n_replicas = 1;
  std::string oracle_name;
  std::optional<double> oracle_value;
};

enum class OutputFormat { kCsv, kJson };

OutputFormat parse_output_format(const std::string& name);

// Header: beta,observable,pair,estimate,stderr,n_replicas,oracle_name,oracle_value
// Reals carry 17 significant digits so doubles round-trip losslessly.
std::string to_csv(std::span<const ResultRecord> records);

nlohmann::json to_json(std::span<const ResultRecord> records);
std::vector<ResultRecord> records_from_json(const nlohmann::json& j);

// Writes atomically (temp file + rename); "-" writes to stdout. Throws
// std::runtime_error on I/O failure. Records must be nonempty.
void write_results(const std::string& path_or_dash, OutputFormat format,
                   std::span<const ResultRecord> records);

}  // namespace isingps
