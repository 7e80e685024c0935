#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dipole/harness.hpp"

namespace dipole {

using Json = nlohmann::ordered_json;

/// RFC-4180 field quoting: fields holding a comma, quote, CR or LF are quoted, quotes doubled.
std::string csv_escape(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);
/// Shortest round-trip decimal for a double ("nan"/"inf" spelled out).
std::string format_number(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& json);

/// Columns: config_hash, lambda, c, error, cook_bound, cook_self_estimate, max_step_drift, status, diagnostic.
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep);
/// Columns: lambda, s, weight, g.
void write_cook_csv(const std::filesystem::path& path, const std::vector<CookReport>& reports);
/// Columns: t, observable, value (norm, position, momentum at every dipole sample).
void write_observables_csv(const std::filesystem::path& path, const DipoleSamples& samples);

struct Manifest {
  StudyConfig config;
  int threads = 1;
  double runtime_seconds = 0.0;
  std::vector<double> record_runtimes;
  bool partial = false;
};

Json to_json(const CookReport& report);
Json to_json(const CrossGaugeReport& report);
Json to_json(const SweepResult& sweep);
Json to_json(const GaugeCheckReport& report);
Json to_json(const BoundsReport& report);
Json to_json(const FieldCheckReport& report);
/// Carries the only wall-clock data (timestamp, runtimes) of a run.
Json to_json(const Manifest& manifest);

/// Human-readable bounds table for the CLI.
std::string format_bounds_table(const BoundsReport& report);

}  // namespace dipole
