#include "dipole/report_io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <Eigen/Core>

namespace dipole {

namespace {

// NaN and infinities are not JSON numbers
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

std::string iso8601_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream os;
  os << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  return out + "\r\n";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) { open_for_write(path) << text; }

void write_json(const std::filesystem::path& path, const Json& json) { open_for_write(path) << json.dump(2) << "\n"; }

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep) {
  auto out = open_for_write(path);
  out << csv_row({"config_hash", "lambda", "c", "error", "cook_bound", "cook_self_estimate", "max_step_drift",
                  "status", "diagnostic"});
  for (const auto& r : sweep.records)
    out << csv_row({sweep.config_hash, format_number(r.lambda), format_number(r.c_derived), format_number(r.error),
                    format_number(r.cook_bound), format_number(r.cook_self_estimate), format_number(r.max_step_drift),
                    r.ok ? "ok" : "failed", r.diagnostic});
}

void write_cook_csv(const std::filesystem::path& path, const std::vector<CookReport>& reports) {
  auto out = open_for_write(path);
  out << csv_row({"lambda", "s", "weight", "g"});
  for (const auto& r : reports)
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
      out << csv_row({format_number(r.lambda), format_number(r.nodes[i]), format_number(r.weights[i]),
                      format_number(r.integrand[i])});
}

void write_observables_csv(const std::filesystem::path& path, const DipoleSamples& samples) {
  auto out = open_for_write(path);
  out << csv_row({"t", "observable", "value"});
  for (std::size_t i = 0; i < samples.times.size(); ++i) {
    const std::string t = format_number(samples.times[i]);
    const WaveFunction& psi = samples.states[i];
    const Expectations e = expectations(psi);
    out << csv_row({t, "norm", format_number(norm(psi))});
    for (int j = 0; j < psi.grid.dim(); ++j) {
      out << csv_row({t, "position_" + std::to_string(j), format_number(e.position[j])});
      out << csv_row({t, "momentum_" + std::to_string(j), format_number(e.momentum[j])});
    }
  }
}

Json to_json(const CookReport& r) {
  return Json{{"lambda", number(r.lambda)},
              {"omega", number(r.omega)},
              {"t0", number(r.t0)},
              {"t", number(r.t)},
              {"panels", r.panels},
              {"nodes", numbers(r.nodes)},
              {"weights", numbers(r.weights)},
              {"integrand", numbers(r.integrand)},
              {"bound", number(r.bound)},
              {"coarse_bound", number(r.coarse_bound)},
              {"self_estimate", number(r.self_estimate())},
              {"quadrature_consistent", r.quadrature_consistent},
              {"measured_error", number(r.measured_error)},
              {"slack", number(r.slack())}};
}

Json to_json(const CrossGaugeReport& r) {
  return Json{{"direction", r.direction == GaugeDirection::VelocityToLength ? "velocity-to-length" : "length-to-velocity"},
              {"times", numbers(r.times)},
              {"fidelities", numbers(r.fidelities)},
              {"min_fidelity", number(r.min_fidelity)}};
}

Json to_json(const SweepResult& s) {
  Json records = Json::array();
  for (const auto& r : s.records)
    records.push_back(Json{{"lambda", number(r.lambda)},
                           {"c", number(r.c_derived)},
                           {"error", number(r.error)},
                           {"cook_bound", number(r.cook_bound)},
                           {"cook_self_estimate", number(r.cook_self_estimate)},
                           {"cook_consistent", r.cook_consistent},
                           {"max_step_drift", number(r.max_step_drift)},
                           {"terminal_norm_defect", number(r.terminal_norm_defect)},
                           {"ok", r.ok},
                           {"diagnostic", r.diagnostic}});
  Json cook = Json::array();
  for (const auto& c : s.cook) cook.push_back(to_json(c));
  return Json{{"preset", s.preset},
              {"config_hash", s.config_hash},
              {"omega", number(s.omega)},
              {"initial_energy", number(s.initial_energy)},
              {"dipole_max_step_drift", number(s.dipole_max_step_drift)},
              {"dipole_terminal_norm_defect", number(s.dipole_terminal_norm_defect)},
              {"slope", number(s.slope)},
              {"strictly_decreasing", s.strictly_decreasing},
              {"cook_nonincreasing", s.cook_nonincreasing},
              {"partial", s.partial},
              {"records", records},
              {"cook", cook}};
}

Json to_json(const GaugeCheckReport& r) {
  Json out{{"config_hash", r.config_hash},
           {"omega_mismatch", number(r.omega_mismatch)},
           {"initial_map_defect", number(r.initial_map_defect)},
           {"min_fidelity", number(r.min_fidelity)},
           {"forward", to_json(r.forward)},
           {"reverse", to_json(r.reverse)},
           {"has_polarized", r.has_polarized}};
  if (r.has_polarized) {
    out["polarized_forward"] = to_json(r.polarized_forward);
    out["polarized_reverse"] = to_json(r.polarized_reverse);
  }
  return out;
}

Json to_json(const BoundsReport& r) {
  return Json{{"grid", Json{{"points", r.grid.points}, {"lengths", numbers(r.grid.lengths)}, {"particles", r.grid.particles}}},
              {"time", number(r.time)},
              {"probe_seed", r.seed},
              {"probe_count", r.probe_count},
              {"probe_set", "fixed-seed mixture: random Gaussians then band-limited noise"},
              {"contraction",
               Json{{"alphas", numbers(r.contraction.alphas)},
                    {"q", numbers(r.contraction.q)},
                    {"alpha_star", number(r.contraction.alpha_star)},
                    {"nonincreasing", r.contraction.nonincreasing}}},
              {"infinitesimal",
               Json{{"epsilons", numbers(r.infinitesimal.epsilons)},
                    {"constants", numbers(r.infinitesimal.constants)},
                    {"nonincreasing", r.infinitesimal.nonincreasing},
                    {"note", "sup over the probe set: a lower bound on the true constant"}}},
              {"graph_norm",
               Json{{"alpha", number(r.graph_norm.alpha)}, {"c_min", number(r.graph_norm.c_min)}, {"c_max", number(r.graph_norm.c_max)}}}};
}

Json to_json(const FieldCheckReport& r) {
  return Json{{"transversality",
               Json{{"defect", number(r.transversality.defect)},
                    {"k_norm_defect", number(r.transversality.k_norm_defect)},
                    {"eps_norm_defect", number(r.transversality.eps_norm_defect)},
                    {"pass", r.transversality.pass}}},
              {"lambdas", numbers(r.lambdas)},
              {"divergence_defects", numbers(r.divergence_defects)},
              {"max_divergence_defect", number(r.max_divergence_defect)},
              {"commensurate", r.commensurate},
              {"is_pulse", r.is_pulse},
              {"pulse_asymptote", number(r.pulse_asymptote)},
              {"pulse_asymptote_expected", number(r.pulse_asymptote_expected)},
              {"pulse_window", number(r.pulse_window)},
              {"peak_field", number(r.peak_field)},
              {"peak_field_expected", number(r.peak_field_expected)}};
}

Json to_json(const Manifest& m) {
  return Json{{"preset", m.config.preset},
              {"config_hash", config_hash(m.config)},
              {"seed", m.config.seed},
              {"config", to_ini(m.config)},
              {"threads", m.threads},
              {"created", iso8601_now()},
              {"runtime_seconds", m.runtime_seconds},
              {"record_runtimes_seconds", numbers(m.record_runtimes)},
              {"partial", m.partial},
              {"versions", Json{{"dipolelab", "0.1.0"},
                                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                              "." + std::to_string(EIGEN_MINOR_VERSION)},
                                {"compiler", __VERSION__}}},
              {"conventions", Json{{"units", "hbar = e = 1, m = 1/2"},
                                   {"omega", m.config.field.omega},
                                   {"amplitude", m.config.field.amplitude},
                                   {"note", "omega and E are chosen conventions, not derived values"}}}};
}

std::string format_bounds_table(const BoundsReport& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "contraction q(alpha) = ||W (-Lap + alpha)^-1||  at s = " << r.time << "\n";
  os << std::setw(14) << "alpha" << std::setw(16) << "q" << "\n";
  for (std::size_t i = 0; i < r.contraction.alphas.size(); ++i)
    os << std::setw(14) << r.contraction.alphas[i] << std::setw(16) << r.contraction.q[i] << "\n";
  os << "alpha* (first q < 1): " << r.contraction.alpha_star << "\n\n";
  os << "relative bound constants over " << r.infinitesimal.probe_count << " probes (seed " << r.seed << ")\n";
  os << std::setw(14) << "eps" << std::setw(16) << "C_eps" << "\n";
  for (std::size_t i = 0; i < r.infinitesimal.epsilons.size(); ++i)
    os << std::setw(14) << r.infinitesimal.epsilons[i] << std::setw(16) << r.infinitesimal.constants[i] << "\n";
  os << "\ngraph-norm ratio at alpha = " << r.graph_norm.alpha << ": [" << r.graph_norm.c_min << ", "
     << r.graph_norm.c_max << "]\n";
  return os.str();
}

}  // namespace dipole
