#include "rmflab/records.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rmflab/errors.hpp"
#include "rmflab/oracle.hpp"
#include "rmflab/version.hpp"

namespace rmflab {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

double parse_number(const std::string& s) {
  if (s.empty()) return kNaN;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParameterError("records: bad number '" + s + "'");
  }
  if (used != s.size()) throw ParameterError("records: bad number '" + s + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& s) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw ParameterError("records: bad integer '" + s + "'");
  }
  if (used != s.size()) throw ParameterError("records: bad integer '" + s + "'");
  return v;
}

bool parse_flag(const std::string& s) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw ParameterError("records: bad flag '" + s + "'");
}

void check_identifier(const std::string& s) {
  if (s.find_first_of(",\n\r\"") != std::string::npos) {
    throw InternalError("records: identifier '" + s + "' contains a reserved character");
  }
}

std::string json_string(const std::string& s) { return json(s).dump(); }

double json_number(const json& j) {
  if (j.is_null()) return kNaN;
  return j.get<double>();
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

}  // namespace

ResultRecord make_record(std::string experiment, std::string quantity, std::string model, double x,
                         int N, double q, const EstimateWithCI& estimate) {
  ResultRecord r;
  r.experiment = std::move(experiment);
  r.quantity = std::move(quantity);
  r.model = std::move(model);
  r.x = x;
  r.N = N;
  r.q = q;
  r.point = estimate.point;
  r.ci_lo = estimate.ci_lo;
  r.ci_hi = estimate.ci_hi;
  r.n_samples = estimate.n_samples;
  r.seed = estimate.seed;
  r.regime = regime_flags(x, N);
  return r;
}

ResultRecord exact_record(std::string experiment, std::string quantity, std::string model, double x,
                          int N, double q, double value) {
  EstimateWithCI e;
  e.point = e.ci_lo = e.ci_hi = value;
  return make_record(std::move(experiment), std::move(quantity), std::move(model), x, N, q, e);
}

RecordFormat parse_format(const std::string& name) {
  if (name == "csv") return RecordFormat::csv;
  if (name == "jsonl" || name == "json-lines") return RecordFormat::jsonl;
  throw ParameterError("unknown format '" + name + "' (expected csv or jsonl)");
}

const std::string& csv_header() {
  static const std::string header =
      "experiment,quantity,model,x,N,q,point,ci_lo,ci_hi,n_samples,seed,n_small,loglog_small";
  return header;
}

std::string format_number(double v) {
  if (std::isnan(v)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
  out << csv_header() << '\n';
  for (const auto& r : records) {
    check_identifier(r.experiment);
    check_identifier(r.quantity);
    check_identifier(r.model);
    out << r.experiment << ',' << r.quantity << ',' << r.model << ',' << format_number(r.x) << ','
        << r.N << ',' << format_number(r.q) << ',' << format_number(r.point) << ','
        << format_number(r.ci_lo) << ',' << format_number(r.ci_hi) << ',' << r.n_samples << ','
        << r.seed << ',' << (r.regime.n_small ? 1 : 0) << ',' << (r.regime.loglog_small ? 1 : 0)
        << '\n';
  }
}

void write_jsonl(std::ostream& out, const std::vector<ResultRecord>& records,
                 const std::string& manifest_ref, const std::string& run_id) {
  // Numbers are written by hand so that every value carries 17 digits.
  auto num = [](double v) { return std::isnan(v) ? std::string("null") : format_number(v); };
  for (const auto& r : records) {
    out << "{\"experiment\":" << json_string(r.experiment) << ",\"quantity\":" << json_string(r.quantity)
        << ",\"model\":" << json_string(r.model) << ",\"x\":" << num(r.x) << ",\"N\":" << r.N
        << ",\"q\":" << num(r.q) << ",\"point\":" << num(r.point) << ",\"ci_lo\":" << num(r.ci_lo)
        << ",\"ci_hi\":" << num(r.ci_hi) << ",\"n_samples\":" << r.n_samples << ",\"seed\":" << r.seed
        << ",\"regime\":{\"n_small\":" << (r.regime.n_small ? "true" : "false")
        << ",\"loglog_small\":" << (r.regime.loglog_small ? "true" : "false") << "}"
        << ",\"manifest\":" << json_string(manifest_ref) << ",\"run_id\":" << json_string(run_id)
        << "}\n";
  }
}

std::vector<ResultRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) {
    throw ParameterError("records: missing or unexpected CSV header");
  }
  std::vector<ResultRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 13) throw ParameterError("records: expected 13 CSV fields");
    ResultRecord r;
    r.experiment = f[0];
    r.quantity = f[1];
    r.model = f[2];
    r.x = parse_number(f[3]);
    r.N = static_cast<int>(parse_unsigned(f[4]));
    r.q = parse_number(f[5]);
    r.point = parse_number(f[6]);
    r.ci_lo = parse_number(f[7]);
    r.ci_hi = parse_number(f[8]);
    r.n_samples = parse_unsigned(f[9]);
    r.seed = parse_unsigned(f[10]);
    r.regime.n_small = parse_flag(f[11]);
    r.regime.loglog_small = parse_flag(f[12]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ResultRecord> read_jsonl(std::istream& in) {
  std::vector<ResultRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      ResultRecord r;
      r.experiment = j.at("experiment").get<std::string>();
      r.quantity = j.at("quantity").get<std::string>();
      r.model = j.at("model").get<std::string>();
      r.x = json_number(j.at("x"));
      r.N = j.at("N").get<int>();
      r.q = json_number(j.at("q"));
      r.point = json_number(j.at("point"));
      r.ci_lo = json_number(j.at("ci_lo"));
      r.ci_hi = json_number(j.at("ci_hi"));
      r.n_samples = j.at("n_samples").get<std::uint64_t>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.regime.n_small = j.at("regime").at("n_small").get<bool>();
      r.regime.loglog_small = j.at("regime").at("loglog_small").get<bool>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParameterError(std::string("records: bad JSON line: ") + e.what());
    }
  }
  return out;
}

std::string RunManifest::run_id() const {
  json j = json::parse(to_json());
  j.erase("wall_time_seconds");
  j.erase("run_id");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

std::string RunManifest::to_json() const {
  json j = json::object();
  j["tool"] = "rmflab";
  j["version"] = std::string(kVersion);
  j["command"] = command;
  json p = json::object();
  for (const auto& [k, v] : plan) p[k] = v;
  j["plan"] = p;
  j["seed_source"] = seed_source;
  j["master_seed"] = master_seed;
  json s = json::object();
  for (const auto& [k, v] : seeds) s[k] = v;
  j["seeds"] = s;
  j["notes"] = notes;
  j["wall_time_seconds"] = wall_time_seconds;
  return j.dump(2);
}

std::filesystem::path manifest_path_for(const std::filesystem::path& out) {
  auto p = out;
  p += ".manifest.json";
  return p;
}

void export_records(const std::filesystem::path& out, RecordFormat format,
                    const std::vector<ResultRecord>& records, const RunManifest& manifest) {
  if (records.empty()) throw InternalError("export: no records");
  std::ostringstream body;
  const auto manifest_path = manifest_path_for(out);
  if (format == RecordFormat::csv) {
    write_csv(body, records);
  } else {
    write_jsonl(body, records, manifest_path.filename().string(), manifest.run_id());
  }
  auto manifest_json = json::parse(manifest.to_json());
  manifest_json["run_id"] = manifest.run_id();
  manifest_json["records"] = out.filename().string();

  auto write_file = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (f) f << text;
    if (f) f.flush();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(path, ec);
      throw ResourceError("cannot write '" + path.string() + "'");
    }
  };
  write_file(out, body.str());
  try {
    write_file(manifest_path, manifest_json.dump(2) + "\n");
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(out, ec);
    throw;
  }
}

}  // namespace rmflab
