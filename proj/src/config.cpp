#include "dipole/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace dipole {

namespace pt = boost::property_tree;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected a number, got '" + text + "'");
  }
}

std::vector<double> doubles(const pt::ptree& tree, const std::string& key, std::vector<double> fallback) {
  const auto text = tree.get_optional<std::string>(key);
  if (!text) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(*text)) out.push_back(to_double(key, item));
  return out;
}

double number(const pt::ptree& tree, const std::string& key, double fallback) {
  const auto text = tree.get_optional<std::string>(key);
  return text ? to_double(key, *text) : fallback;
}

long integer(const pt::ptree& tree, const std::string& key, long fallback) {
  const double v = number(tree, key, static_cast<double>(fallback));
  if (v != std::floor(v)) throw ConfigError("'" + key + "': expected an integer");
  return static_cast<long>(v);
}

Vec3 vec3(const pt::ptree& tree, const std::string& key, const Vec3& fallback) {
  const auto v = doubles(tree, key, {fallback.x(), fallback.y(), fallback.z()});
  if (v.size() != 3) throw ConfigError("'" + key + "': expected three components");
  return Vec3(v[0], v[1], v[2]);
}

template <class T>
std::vector<T> broadcast(std::vector<T> v, int dim, const std::string& key) {
  if (v.size() == 1) v.assign(dim, v.front());
  if (static_cast<int>(v.size()) != dim) throw ConfigError("'" + key + "': expected 1 or " + std::to_string(dim) + " values");
  return v;
}

std::string format(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>) out += format(v[i]);
    else out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

StudyConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  for (const auto& [section, _] : tree)
    if (section != "study" && section != "grid" && section != "potential" && section != "field" && section != "run" &&
        section != "bounds")
      throw ConfigError("unknown config section [" + section + "]");

  StudyConfig c;
  const pt::ptree empty;
  const auto& study = tree.get_child("study", empty);
  c.preset = study.get<std::string>("preset", c.preset);
  {
    const double seed = number(study, "seed", 1.0);
    if (seed < 0 || seed != std::floor(seed)) throw ConfigError("'seed' must be a non-negative integer");
    c.seed = static_cast<std::uint64_t>(seed);
  }

  const auto& grid = tree.get_child("grid", empty);
  c.grid.dim = static_cast<int>(integer(grid, "dim", 1));
  if (c.grid.dim < 1 || c.grid.dim > kMaxGridDim) throw ConfigError("grid dim must lie in [1, 6]");
  std::vector<int> points;
  for (double p : doubles(grid, "points", {1024.0})) points.push_back(static_cast<int>(p));
  c.grid.points = broadcast(points, c.grid.dim, "points");
  c.grid.lengths = broadcast(doubles(grid, "length", {200.0}), c.grid.dim, "length");
  c.grid.particles = static_cast<int>(integer(grid, "particles", 1));

  const auto& pot = tree.get_child("potential", empty);
  c.potential.kind = parse_potential_kind(pot.get<std::string>("kind", "soft-core"));
  c.potential.charge = number(pot, "charge", c.potential.charge);
  c.potential.softening = number(pot, "softening", c.potential.softening);
  c.potential.depth = number(pot, "depth", c.potential.depth);
  c.potential.width = number(pot, "width", c.potential.width);

  const auto& field = tree.get_child("field", empty);
  c.field.kind = parse_envelope_kind(field.get<std::string>("envelope", "cw"));
  c.field.amplitude = number(field, "amplitude", c.field.amplitude);
  c.field.k_hat = vec3(field, "k_hat", c.field.k_hat);
  c.field.eps_hat = vec3(field, "eps_hat", c.field.eps_hat);
  c.field.t_center = number(field, "t_center", c.field.t_center);
  c.field.omega = number(field, "omega", c.field.omega);
  c.field.lambdas = doubles(field, "lambdas", {});

  const auto& run = tree.get_child("run", empty);
  c.run.t0 = number(run, "t0", 0.0);
  c.run.t_final = number(run, "t_final", c.run.t_final);
  c.run.dt = number(run, "dt", c.run.dt);
  c.run.method = parse_step_method(run.get<std::string>("method", "krylov"));
  c.run.krylov.subspace = static_cast<int>(integer(run, "krylov_subspace", c.run.krylov.subspace));
  c.run.krylov.tolerance = number(run, "krylov_tolerance", c.run.krylov.tolerance);
  const std::string initial = run.get<std::string>("initial", "ground-state");
  if (initial == "ground-state") c.run.initial = InitialState::GroundState;
  else if (initial == "packet") c.run.initial = InitialState::Packet;
  else throw ConfigError("unknown initial state '" + initial + "'");
  c.run.ground_tolerance = number(run, "ground_tolerance", c.run.ground_tolerance);
  c.run.packet_center = broadcast(doubles(run, "packet_center", {0.0}), c.grid.dim, "packet_center");
  c.run.packet_sigma = number(run, "packet_sigma", c.run.packet_sigma);
  c.run.packet_momentum = broadcast(doubles(run, "packet_momentum", {0.0}), c.grid.dim, "packet_momentum");
  c.run.cook_panels = static_cast<int>(integer(run, "cook_panels", c.run.cook_panels));
  c.run.gauge_samples = static_cast<int>(integer(run, "gauge_samples", c.run.gauge_samples));
  c.run.gauge_omega_mismatch = number(run, "gauge_omega_mismatch", 0.0);

  const auto& bounds = tree.get_child("bounds", empty);
  c.bounds.time = number(bounds, "time", c.bounds.time);
  c.bounds.alphas = doubles(bounds, "alphas", c.bounds.alphas);
  c.bounds.epsilons = doubles(bounds, "epsilons", c.bounds.epsilons);
  c.bounds.graph_alpha = number(bounds, "graph_alpha", c.bounds.graph_alpha);
  c.bounds.probes = static_cast<int>(integer(bounds, "probes", c.bounds.probes));

  c.finalize();
  return c;
}

StudyConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

void StudyConfig::finalize() {
  const Grid g = make_grid();
  if (g.dim() % g.particles != 0) throw ConfigError("grid dim must be a multiple of the particle count");
  if (!(field.omega > 0.0)) throw ConfigError("omega must be positive");
  envelope();  // validates the unit vectors

  if (!(run.dt > 0.0)) throw ConfigError("dt must be positive");
  if (run.t0 == 0.0) run.t0 = run.dt;
  if (!(run.t0 > 0.0) || !(run.t_final > run.t0)) throw ConfigError("need 0 < t0 < t_final");
  if (run.cook_panels < 16 || run.cook_panels % 2) throw ConfigError("cook_panels must be even and >= 16");
  if (run.gauge_samples < 1) throw ConfigError("gauge_samples must be positive");
  if (bounds.probes < 64) throw ConfigError("bounds need at least 64 probes");

  // snap every wavelength to L/m along the axis carrying the largest k_hat component
  if (field.kind != EnvelopeKind::Zero) {
    int axis = -1;
    double best = 0.0;
    for (int j = 0; j < g.dim(); ++j) {
      const double kc = std::abs(field.k_hat[g.physical_axis(j)]);
      if (kc > best + 1e-12) best = kc, axis = j;
    }
    for (double& lambda : field.lambdas) {
      if (!(lambda > 0.0)) throw ConfigError("wavelengths must be positive");
      if (axis >= 0) lambda = snap_wavelength(lambda, g.lengths[axis] * best);
      if (!is_commensurate(field_at(lambda), g))
        throw ConfigError("wavelength " + format(lambda) + " is not commensurate with the box");
    }
  }
  for (std::size_t i = 1; i < field.lambdas.size(); ++i)
    if (!(field.lambdas[i] > field.lambdas[i - 1])) throw ConfigError("lambda list must be strictly increasing");
}

Grid StudyConfig::make_grid() const {
  return dipole::make_grid(grid.dim, grid.points, grid.lengths, grid.particles);
}

PotentialModel StudyConfig::make_potential(const Grid& g) const {
  switch (potential.kind) {
    case PotentialKind::Zero: return make_zero_potential(g);
    case PotentialKind::SoftCoreCoulomb: return make_soft_core(g, potential.charge, potential.softening);
    case PotentialKind::GaussianWell: return make_gaussian_well(g, potential.depth, potential.width);
    case PotentialKind::NBodySoftCore: return build_nbody(g.particles, potential.softening, g);
  }
  throw ConfigError("unknown potential kind");
}

LaserEnvelope StudyConfig::envelope() const {
  switch (field.kind) {
    case EnvelopeKind::Zero: return LaserEnvelope::zero();
    case EnvelopeKind::PlaneWaveCW: return LaserEnvelope::plane_wave(field.amplitude, field.k_hat, field.eps_hat);
    case EnvelopeKind::GaussianPulse:
      return LaserEnvelope::gaussian_pulse(field.amplitude, field.k_hat, field.eps_hat, field.t_center);
  }
  throw ConfigError("unknown envelope kind");
}

ScaledField StudyConfig::field_at(double lambda) const { return ScaledField(envelope(), lambda, field.omega); }

StepperConfig StudyConfig::stepper() const {
  StepperConfig s;
  s.t0 = run.t0;
  s.t_final = run.t_final;
  s.dt = run.dt;
  s.method = run.method;
  s.krylov = run.krylov;
  return s;
}

std::vector<double> StudyConfig::gauge_sample_times() const {
  std::vector<double> times;
  for (int i = 1; i <= run.gauge_samples; ++i)
    times.push_back(run.t0 + (run.t_final - run.t0) * i / run.gauge_samples);
  return times;
}

std::string to_ini(const StudyConfig& c) {
  std::ostringstream os;
  const auto vec = [](const Vec3& v) { return format(v.x()) + "," + format(v.y()) + "," + format(v.z()); };
  os << "[study]\npreset = " << c.preset << "\nseed = " << c.seed << "\n\n";
  os << "[grid]\ndim = " << c.grid.dim << "\npoints = " << join(c.grid.points) << "\nlength = " << join(c.grid.lengths)
     << "\nparticles = " << c.grid.particles << "\n\n";
  os << "[potential]\nkind = " << to_string(c.potential.kind) << "\ncharge = " << format(c.potential.charge)
     << "\nsoftening = " << format(c.potential.softening) << "\ndepth = " << format(c.potential.depth)
     << "\nwidth = " << format(c.potential.width) << "\n\n";
  os << "[field]\nenvelope = " << to_string(c.field.kind) << "\namplitude = " << format(c.field.amplitude)
     << "\nk_hat = " << vec(c.field.k_hat) << "\neps_hat = " << vec(c.field.eps_hat)
     << "\nt_center = " << format(c.field.t_center) << "\nomega = " << format(c.field.omega) << "\n";
  if (!c.field.lambdas.empty()) os << "lambdas = " << join(c.field.lambdas) << "\n";
  os << "\n[run]\nt0 = " << format(c.run.t0) << "\nt_final = " << format(c.run.t_final) << "\ndt = " << format(c.run.dt)
     << "\nmethod = " << to_string(c.run.method) << "\nkrylov_subspace = " << c.run.krylov.subspace
     << "\nkrylov_tolerance = " << format(c.run.krylov.tolerance)
     << "\ninitial = " << (c.run.initial == InitialState::GroundState ? "ground-state" : "packet")
     << "\nground_tolerance = " << format(c.run.ground_tolerance) << "\npacket_center = " << join(c.run.packet_center)
     << "\npacket_sigma = " << format(c.run.packet_sigma) << "\npacket_momentum = " << join(c.run.packet_momentum)
     << "\ncook_panels = " << c.run.cook_panels << "\ngauge_samples = " << c.run.gauge_samples
     << "\ngauge_omega_mismatch = " << format(c.run.gauge_omega_mismatch) << "\n\n";
  os << "[bounds]\ntime = " << format(c.bounds.time) << "\nalphas = " << join(c.bounds.alphas)
     << "\nepsilons = " << join(c.bounds.epsilons) << "\ngraph_alpha = " << format(c.bounds.graph_alpha)
     << "\nprobes = " << c.bounds.probes << "\n";
  return os.str();
}

std::string config_hash(const StudyConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_ini(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::vector<std::string> preset_names() { return {"cw-1d", "pulse-1d", "two-body-1d"}; }

StudyConfig preset_config(const std::string& name) {
  StudyConfig c;
  c.preset = name;
  if (name == "cw-1d") {
    c.grid = {1, {1024}, {200.0}, 1};
    c.potential.kind = PotentialKind::SoftCoreCoulomb;
    c.field.kind = EnvelopeKind::PlaneWaveCW;
    c.field.amplitude = 1.0;
    c.field.lambdas = {25.0, 50.0, 100.0, 200.0};
    c.run.t_final = 2.0 * kPi;
    c.run.dt = 1e-2;
  } else if (name == "pulse-1d") {
    c.grid = {1, {1024}, {200.0}, 1};
    c.potential.kind = PotentialKind::SoftCoreCoulomb;
    c.field.kind = EnvelopeKind::GaussianPulse;
    c.field.amplitude = 1.0;
    c.field.t_center = 4.0;
    c.field.lambdas = {25.0, 50.0, 100.0, 200.0};
    c.run.t_final = 8.0;
    c.run.dt = 1e-2;
  } else if (name == "two-body-1d") {
    c.grid = {2, {128, 128}, {80.0, 80.0}, 2};
    c.potential.kind = PotentialKind::NBodySoftCore;
    c.field.kind = EnvelopeKind::PlaneWaveCW;
    c.field.amplitude = 0.5;
    c.field.lambdas = {10.0, 20.0, 40.0, 80.0};
    c.run.t_final = 2.0 * kPi;
    c.run.dt = 2.5e-2;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  c.run.t0 = 0.0;
  c.finalize();
  return c;
}

}  // namespace dipole
