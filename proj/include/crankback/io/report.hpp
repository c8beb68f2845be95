#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crankback/errors.hpp"
#include "crankback/planner.hpp"
#include "crankback/profile.hpp"
#include "crankback/scenario.hpp"
#include "crankback/simulation.hpp"

namespace crankback {

// JSON mappings live in the crankback namespace so nlohmann finds them by ADL.

inline void to_json(nlohmann::json& j, const Scenario& s) {
  j = {{"n", s.n},           {"hop_mean", s.hop_mean}, {"hop_var", s.hop_var},
       {"deadline", s.deadline}, {"p_tr", s.p_tr},   {"hop_distance", s.hop_distance}};
}
inline void from_json(const nlohmann::json& j, Scenario& s) {
  j.at("n").get_to(s.n);
  j.at("hop_mean").get_to(s.hop_mean);
  j.at("hop_var").get_to(s.hop_var);
  j.at("deadline").get_to(s.deadline);
  j.at("p_tr").get_to(s.p_tr);
  j.at("hop_distance").get_to(s.hop_distance);
}

inline void to_json(nlohmann::json& j, const ReturnProfile& p) {
  j = {{"method", std::string(to_string(p.method))},
       {"p_return", p.p_return},
       {"p_success", p.p_success ? nlohmann::json(*p.p_success) : nlohmann::json(nullptr)},
       {"error_estimate", p.error_estimate},
       {"quality_warning", p.quality_warning},
       {"dropped_mass", p.dropped_mass}};
}
inline void from_json(const nlohmann::json& j, ReturnProfile& p) {
  p.method = method_from_string(j.at("method").get<std::string>());
  j.at("p_return").get_to(p.p_return);
  const auto& success = j.at("p_success");
  p.p_success = success.is_null() ? std::nullopt : std::optional<double>(success.get<double>());
  j.at("error_estimate").get_to(p.error_estimate);
  j.at("quality_warning").get_to(p.quality_warning);
  j.at("dropped_mass").get_to(p.dropped_mass);
}

inline void to_json(nlohmann::json& j, const SimReport& r) {
  j = {{"counts", r.counts},   {"profile", r.profile},
       {"ci_halfwidth", r.ci_halfwidth}, {"on_time_fraction", r.on_time_fraction},
       {"seed", r.seed},       {"trials", r.trials}};
}
inline void from_json(const nlohmann::json& j, SimReport& r) {
  j.at("counts").get_to(r.counts);
  j.at("profile").get_to(r.profile);
  j.at("ci_halfwidth").get_to(r.ci_halfwidth);
  j.at("on_time_fraction").get_to(r.on_time_fraction);
  j.at("seed").get_to(r.seed);
  j.at("trials").get_to(r.trials);
}

inline void to_json(nlohmann::json& j, const WasteReport& r) {
  j = {{"hop_distance", r.hop_distance},
       {"waste_per_attempt", r.waste_per_attempt},
       {"waste_per_success", r.waste_per_success},
       {"expected_total_distance", r.expected_total_distance}};
}
inline void from_json(const nlohmann::json& j, WasteReport& r) {
  j.at("hop_distance").get_to(r.hop_distance);
  j.at("waste_per_attempt").get_to(r.waste_per_attempt);
  j.at("waste_per_success").get_to(r.waste_per_success);
  j.at("expected_total_distance").get_to(r.expected_total_distance);
}

inline void to_json(nlohmann::json& j, const AttemptReport& r) {
  j = {{"successes", r.successes},
       {"attempts", r.attempts},
       {"hop_distance", r.hop_distance},
       {"mean_attempts_per_success", r.mean_attempts_per_success},
       {"waste_per_attempt", r.waste_per_attempt},
       {"waste_per_success", r.waste_per_success},
       {"total_distance_per_success", r.total_distance_per_success},
       {"seed", r.seed}};
}
inline void from_json(const nlohmann::json& j, AttemptReport& r) {
  j.at("successes").get_to(r.successes);
  j.at("attempts").get_to(r.attempts);
  j.at("hop_distance").get_to(r.hop_distance);
  j.at("mean_attempts_per_success").get_to(r.mean_attempts_per_success);
  j.at("waste_per_attempt").get_to(r.waste_per_attempt);
  j.at("waste_per_success").get_to(r.waste_per_success);
  j.at("total_distance_per_success").get_to(r.total_distance_per_success);
  j.at("seed").get_to(r.seed);
}

inline void to_json(nlohmann::json& j, const OptimizeResult& r) {
  j = {{"p_tr", r.p_tr},
       {"achieved", r.achieved},
       {"target", r.target},
       {"iterations", r.iterations},
       {"unattainable", r.unattainable}};
}
inline void from_json(const nlohmann::json& j, OptimizeResult& r) {
  j.at("p_tr").get_to(r.p_tr);
  j.at("achieved").get_to(r.achieved);
  j.at("target").get_to(r.target);
  j.at("iterations").get_to(r.iterations);
  j.at("unattainable").get_to(r.unattainable);
}

}  // namespace crankback

namespace crankback::io {

inline constexpr int kSchemaVersionReports = 1;

enum class Format { table, csv, json };

inline Format format_from_string(std::string_view s) {
  if (s == "table") return Format::table;
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw std::invalid_argument("unknown format '" + std::string(s) + "'");
}

/// Six significant digits, the fixed precision of csv and table output.
inline std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Report kinds as tagged in JSON documents.
template <class T> inline constexpr const char* kind_of = nullptr;
template <> inline constexpr const char* kind_of<ReturnProfile> = "profile";
template <> inline constexpr const char* kind_of<SimReport> = "simulation";
template <> inline constexpr const char* kind_of<WasteReport> = "waste";
template <> inline constexpr const char* kind_of<AttemptReport> = "attempts";
template <> inline constexpr const char* kind_of<OptimizeResult> = "optimize";

/// {"schema_version": 1, "kind": ..., "report": {...}}. Doubles are written
/// with round-trip precision.
template <class Report>
nlohmann::json to_document(const Report& r) {
  return {{"schema_version", kSchemaVersionReports}, {"kind", kind_of<Report>}, {"report", r}};
}

template <class Report>
Report from_document(const nlohmann::json& doc) {
  if (doc.at("schema_version").get<int>() != kSchemaVersionReports) {
    throw std::invalid_argument("unsupported report schema_version");
  }
  if (doc.at("kind").get<std::string>() != kind_of<Report>) {
    throw std::invalid_argument("report kind mismatch: got " + doc.at("kind").get<std::string>());
  }
  return doc.at("report").get<Report>();
}

namespace detail {

struct ProfileRow {
  std::string node;
  int k;
  double probability;
  std::optional<double> ci;
};

inline std::vector<ProfileRow> profile_rows(const ReturnProfile& p,
                                            const std::vector<double>& ci) {
  std::vector<ProfileRow> rows;
  if (p.p_return.empty()) return rows;
  auto ci_at = [&](std::size_t i) {
    return i < ci.size() ? std::optional<double>(ci[i]) : std::nullopt;
  };
  for (int k = 1; k <= p.depth(); ++k) {
    rows.push_back({std::to_string(k), k, p.at(k), ci_at(static_cast<std::size_t>(k - 1))});
  }
  if (p.p_success) {
    rows.push_back({"success", p.depth() + 1, *p.p_success,
                    ci_at(static_cast<std::size_t>(p.depth()))});
  }
  return rows;
}

inline void write_profile_csv(std::ostream& out, const ReturnProfile& p,
                              const std::vector<double>& ci) {
  out << "node,k,probability,ci_halfwidth,method\n";
  for (const ProfileRow& row : profile_rows(p, ci)) {
    out << row.node << ',' << row.k << ',' << fmt6(row.probability) << ','
        << (row.ci ? fmt6(*row.ci) : std::string()) << ',' << to_string(p.method) << '\n';
  }
}

inline void write_profile_table(std::ostream& out, const ReturnProfile& p,
                                const std::vector<double>& ci) {
  out << std::left << std::setw(10) << "node" << std::right << std::setw(14) << "probability"
      << std::setw(14) << "ci99" << '\n';
  for (const ProfileRow& row : profile_rows(p, ci)) {
    out << std::left << std::setw(10) << row.node << std::right << std::setw(14)
        << fmt6(row.probability) << std::setw(14) << (row.ci ? fmt6(*row.ci) : "-") << '\n';
  }
  out << "method: " << to_string(p.method);
  if (p.method == Method::grid || p.method == Method::quadrature) {
    out << "  error_estimate: " << fmt6(p.error_estimate)
        << "  dropped_mass: " << fmt6(p.dropped_mass);
    if (p.quality_warning) out << "  WARNING: error estimate above budget";
  }
  out << '\n';
}

using Field = std::pair<std::string, std::string>;

inline void write_fields(std::ostream& out, const std::vector<Field>& fields, Format fmt) {
  if (fmt == Format::csv) {
    out << "quantity,value\n";
    for (const auto& [k, v] : fields) out << k << ',' << v << '\n';
    return;
  }
  std::size_t width = 0;
  for (const auto& f : fields) width = std::max(width, f.first.size());
  for (const auto& [k, v] : fields) {
    out << std::left << std::setw(static_cast<int>(width + 2)) << k << std::right << v << '\n';
  }
}

}  // namespace detail

inline void write_report(const ReturnProfile& p, Format fmt, std::ostream& out) {
  switch (fmt) {
    case Format::json: out << to_document(p).dump(2) << '\n'; return;
    case Format::csv: detail::write_profile_csv(out, p, {}); return;
    case Format::table: detail::write_profile_table(out, p, {}); return;
  }
}

inline void write_report(const SimReport& r, Format fmt, std::ostream& out) {
  switch (fmt) {
    case Format::json: out << to_document(r).dump(2) << '\n'; return;
    case Format::csv: detail::write_profile_csv(out, r.profile, r.ci_halfwidth); return;
    case Format::table:
      detail::write_profile_table(out, r.profile, r.ci_halfwidth);
      out << "trials: " << r.trials << "  seed: " << r.seed
          << "  on_time_fraction: " << fmt6(r.on_time_fraction) << '\n';
      return;
  }
}

inline void write_report(const WasteReport& r, Format fmt, std::ostream& out) {
  if (fmt == Format::json) {
    out << to_document(r).dump(2) << '\n';
    return;
  }
  detail::write_fields(out,
                       {{"hop_distance", fmt6(r.hop_distance)},
                        {"waste_per_attempt", fmt6(r.waste_per_attempt)},
                        {"waste_per_success", fmt6(r.waste_per_success)},
                        {"expected_total_distance", fmt6(r.expected_total_distance)}},
                       fmt);
}

inline void write_report(const AttemptReport& r, Format fmt, std::ostream& out) {
  if (fmt == Format::json) {
    out << to_document(r).dump(2) << '\n';
    return;
  }
  detail::write_fields(out,
                       {{"successes", std::to_string(r.successes)},
                        {"attempts", std::to_string(r.attempts)},
                        {"hop_distance", fmt6(r.hop_distance)},
                        {"mean_attempts_per_success", fmt6(r.mean_attempts_per_success)},
                        {"waste_per_attempt", fmt6(r.waste_per_attempt)},
                        {"waste_per_success", fmt6(r.waste_per_success)},
                        {"total_distance_per_success", fmt6(r.total_distance_per_success)},
                        {"seed", std::to_string(r.seed)}},
                       fmt);
}

inline void write_report(const OptimizeResult& r, Format fmt, std::ostream& out) {
  if (fmt == Format::json) {
    out << to_document(r).dump(2) << '\n';
    return;
  }
  detail::write_fields(out,
                       {{"p_tr", fmt6(r.p_tr)},
                        {"achieved", fmt6(r.achieved)},
                        {"target", fmt6(r.target)},
                        {"iterations", std::to_string(r.iterations)},
                        {"unattainable", r.unattainable ? "true" : "false"}},
                       fmt);
}

/// Writes to a file; I/O failures are reported with the path.
template <class Report>
void write_report(const Report& r, Format fmt, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing", path.string());
  write_report(r, fmt, out);
  out.flush();
  if (!out) throw IoError("write failed", path.string());
}

}  // namespace crankback::io
