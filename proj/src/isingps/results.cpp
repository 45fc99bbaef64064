#include "isingps/results.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace isingps {

namespace {

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

OutputFormat parse_output_format(const std::string& name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  throw std::invalid_argument("unknown output format '" + name + "' (expected csv or json)");
}

std::string to_csv(std::span<const ResultRecord> records) {
  std::ostringstream os;
  os << "beta,observable,pair,estimate,stderr,n_replicas,oracle_name,oracle_value\n";
  for (const auto& r : records) {
    os << format_real(r.beta) << ',' << r.observable << ',' << r.pair << ','
       << format_real(r.estimate) << ',' << format_real(r.std_error) << ',' << r.n_replicas << ','
       << r.oracle_name << ',';
    if (r.oracle_value) os << format_real(*r.oracle_value);
    os << '\n';
  }
  return os.str();
}

nlohmann::json to_json(std::span<const ResultRecord> records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json row{{"beta", r.beta},
                       {"observable", r.observable},
                       {"pair", r.pair},
                       {"estimate", r.estimate},
                       {"stderr", r.std_error},
                       {"n_replicas", r.n_replicas},
                       {"oracle_name", r.oracle_name}};
    if (r.oracle_value)
      row["oracle_value"] = *r.oracle_value;
    else
      row["oracle_value"] = nullptr;
    arr.push_back(std::move(row));
  }
  return arr;
}

std::vector<ResultRecord> records_from_json(const nlohmann::json& j) {
  std::vector<ResultRecord> out;
  for (const auto& row : j) {
    ResultRecord r;
    r.beta = row.at("beta").get<double>();
    r.observable = row.at("observable").get<std::string>();
    r.pair = row.at("pair").get<std::string>();
    r.estimate = row.at("estimate").get<double>();
    r.std_error = row.at("stderr").get<double>();
    r.n_replicas = row.at("n_replicas").get<std::int64_t>();
    r.oracle_name = row.at("oracle_name").get<std::string>();
    if (!row.at("oracle_value").is_null()) r.oracle_value = row.at("oracle_value").get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

void write_results(const std::string& path_or_dash, OutputFormat format,
                   std::span<const ResultRecord> records) {
  if (records.empty()) throw std::invalid_argument("write_results: no records");

  std::string payload;
  if (format == OutputFormat::kCsv) {
    payload = to_csv(records);
  } else {
    payload = to_json(records).dump(2);
    payload.push_back('\n');
  }

  if (path_or_dash == "-" || path_or_dash.empty()) {
    std::cout << payload;
    std::cout.flush();
    return;
  }

  namespace fs = std::filesystem;
  const fs::path target(path_or_dash);
  std::random_device rd;
  const fs::path tmp = target.parent_path() /
                       (target.filename().string() + ".tmp" + std::to_string(rd() % 1000000));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << payload;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("rename failed for " + target.string() + ": " + ec.message());
  }
}

}  // namespace isingps
