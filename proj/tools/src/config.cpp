// config.cpp

#include "oqs_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace oqs::cli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> kSchema{
    {"system",
     {"preset", "epsilon", "delta", "observable", "initial_state", "dim", "h_s", "h_s_im", "w_s",
      "w_s_im", "o_s", "o_s_im", "rho_s", "rho_s_im"}},
    {"bath", {"omega", "coupling", "beta", "table", "spectral", "alpha", "omega_c", "omega_max", "n_modes"}},
    {"perturbed_bath",
     {"omega", "coupling", "beta", "table", "spectral", "alpha", "omega_c", "omega_max", "n_modes",
      "coupling_scale", "omega_scale"}},
    {"dyson", {"t", "max_order", "integrator", "samples_per_order", "gauss_points", "seed", "workers"}},
    {"truncation", {"n_max", "memory_ceiling", "tail_threshold", "edge_threshold"}},
    {"check",
     {"m", "samples", "si", "sf", "correlation", "constant_re", "constant_im", "quad_points",
      "first_order", "eps_coarse", "eps_fine", "wick_tolerance"}},
    {"output", {"prefix"}},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Reads values from the parsed tree and reports problems with file, line and key path.
class Reader {
 public:
  Reader(const std::filesystem::path& path, const pt::ptree& tree) : path_(path), tree_(tree) {
    std::ifstream in(path);
    std::string line, section;
    for (int no = 1; std::getline(in, line); ++no) {
      const std::string t = trim(line);
      if (t.empty() || t[0] == ';' || t[0] == '#') continue;
      if (t.front() == '[' && t.back() == ']') {
        section = trim(t.substr(1, t.size() - 2));
        lines_[section] = no;
        continue;
      }
      const auto eq = t.find('=');
      if (eq != std::string::npos) lines_[section + "." + trim(t.substr(0, eq))] = no;
    }
  }

  [[noreturn]] void fail(const std::string& key_path, const std::string& what) const {
    std::ostringstream msg;
    msg << path_.string();
    if (auto it = lines_.find(key_path); it != lines_.end()) msg << ':' << it->second;
    msg << ": " << key_path << ": " << what;
    throw ConfigError(msg.str());
  }

  void check_schema() const {
    for (const auto& [section, keys] : tree_) {
      if (!keys.data().empty() && keys.empty()) fail(section, "key outside of any section");
      auto it = kSchema.find(section);
      if (it == kSchema.end()) fail(section, "unknown section");
      for (const auto& [key, value] : keys)
        if (!it->second.count(key)) fail(section + "." + key, "unknown key");
    }
  }

  [[nodiscard]] bool has(const std::string& key_path) const {
    return tree_.get_child_optional(pt::ptree::path_type(key_path, '.')).has_value();
  }

  [[nodiscard]] std::optional<std::string> raw(const std::string& key_path) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key_path, '.'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  [[nodiscard]] std::string require(const std::string& key_path) const {
    auto v = raw(key_path);
    if (!v) fail(key_path, "missing required key");
    return *v;
  }

  double to_double(const std::string& key_path, const std::string& text) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(text, &pos);
      if (trim(text.substr(pos)).empty() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    fail(key_path, "expected a finite number, got '" + text + "'");
  }

  long long to_integer(const std::string& key_path, const std::string& text) const {
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(text, &pos);
      if (trim(text.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    fail(key_path, "expected an integer, got '" + text + "'");
  }

  void number(const std::string& key_path, double& out) const {
    if (auto v = raw(key_path)) out = to_double(key_path, *v);
  }

  template <typename Int>
  void integer(const std::string& key_path, Int& out, long long lo, long long hi) const {
    if (auto v = raw(key_path)) {
      const long long x = to_integer(key_path, *v);
      if (x < lo || x > hi)
        fail(key_path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      out = static_cast<Int>(x);
    }
  }

  void boolean(const std::string& key_path, bool& out) const {
    if (auto v = raw(key_path)) {
      std::string s = *v;
      std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
      if (s == "true" || s == "yes" || s == "1") out = true;
      else if (s == "false" || s == "no" || s == "0") out = false;
      else fail(key_path, "expected true or false, got '" + *v + "'");
    }
  }

  void choice(const std::string& key_path, std::string& out, const std::vector<std::string>& allowed) const {
    if (auto v = raw(key_path)) {
      if (std::find(allowed.begin(), allowed.end(), *v) == allowed.end()) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        fail(key_path, "must be one of {" + list + "}, got '" + *v + "'");
      }
      out = *v;
    }
  }

  std::vector<double> list(const std::string& key_path) const {
    std::vector<double> out;
    const std::string text = require(key_path);
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key_path, trim(item)));
    if (out.empty()) fail(key_path, "empty list");
    return out;
  }

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  const pt::ptree& tree_;
  std::map<std::string, int> lines_;
};

Operator read_matrix(const Reader& r, const std::string& key, Eigen::Index d, bool required) {
  const std::string re_key = "system." + key;
  const std::string im_key = "system." + key + "_im";
  if (!r.has(re_key)) {
    if (required) r.fail(re_key, "missing required key");
    return Operator::Zero(d, d);
  }
  auto fill = [&](const std::string& k, Operator& m, bool imag) {
    const auto v = r.list(k);
    if (v.size() != static_cast<std::size_t>(d * d))
      r.fail(k, "expected " + std::to_string(d * d) + " row-major entries, got " + std::to_string(v.size()));
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        const double x = v[static_cast<std::size_t>(i * d + j)];
        if (imag) m(i, j) += cplx{0.0, x};
        else m(i, j) = x;
      }
  };
  Operator m = Operator::Zero(d, d);
  fill(re_key, m, false);
  if (r.has(im_key)) fill(im_key, m, true);
  return m;
}

void read_system(const Reader& r, SystemSection& s) {
  r.choice("system.preset", s.preset, {"spin_boson", "explicit"});
  if (s.preset == "spin_boson") {
    for (const char* k : {"dim", "h_s", "h_s_im", "w_s", "w_s_im", "o_s", "o_s_im", "rho_s", "rho_s_im"})
      if (r.has(std::string("system.") + k)) r.fail(std::string("system.") + k, "only valid with preset = explicit");
    r.number("system.epsilon", s.epsilon);
    r.number("system.delta", s.delta);
    r.choice("system.observable", s.observable, {"sigma_z", "sigma_x", "identity"});
    r.choice("system.initial_state", s.initial_state, {"up", "down", "plus", "minus"});
  } else {
    for (const char* k : {"epsilon", "delta", "observable", "initial_state"})
      if (r.has(std::string("system.") + k)) r.fail(std::string("system.") + k, "only valid with preset = spin_boson");
    Eigen::Index d = 0;
    r.integer("system.dim", d, 1, 64);
    if (d == 0) r.fail("system.dim", "missing required key");
    s.h_s = read_matrix(r, "h_s", d, true);
    s.w_s = read_matrix(r, "w_s", d, true);
    s.o_s = read_matrix(r, "o_s", d, true);
    s.rho_s = read_matrix(r, "rho_s", d, true);
  }
  try {
    (void)s.build();
  } catch (const std::invalid_argument& e) {
    r.fail("system", e.what());
  }
}

void read_bath(const Reader& r, const std::string& section, BathSection& b, bool perturbed) {
  const std::string p = section + ".";
  const bool has_modes = r.has(p + "omega") || r.has(p + "coupling");
  const bool has_table = r.has(p + "table");
  const bool has_spectral = r.has(p + "spectral");
  const bool has_scale = r.has(p + "coupling_scale") || r.has(p + "omega_scale");
  if (static_cast<int>(has_modes) + has_table + has_spectral + has_scale > 1)
    r.fail(section, "give exactly one of omega/coupling, table, spectral, or *_scale");

  if (has_table) {
    b.kind = "table";
    const std::string file = r.require(p + "table");
    std::filesystem::path path = file;
    if (path.is_relative()) path = r.path().parent_path() / path;
    b.table = path;
    return;
  }
  if (has_scale) {
    b.kind = "scaled";
    r.number(p + "coupling_scale", b.coupling_scale);
    r.number(p + "omega_scale", b.omega_scale);
    if (!(b.omega_scale > 0.0)) r.fail(p + "omega_scale", "must be > 0");
    if (r.has(p + "beta")) r.number(p + "beta", b.beta);
    else b.beta = -1.0;  // inherit
    if (r.has(p + "beta") && !(b.beta > 0.0)) r.fail(p + "beta", "beta must be > 0");
    return;
  }
  if (!r.has(p + "beta")) r.fail(p + "beta", "missing required key");
  r.number(p + "beta", b.beta);
  if (!(b.beta > 0.0)) r.fail(p + "beta", "beta must be > 0");
  if (has_spectral) {
    b.kind = "spectral";
    std::string kind;
    r.choice(p + "spectral", kind, {"ohmic"});
    if (!r.has(p + "alpha")) r.fail(p + "alpha", "missing required key");
    if (!r.has(p + "omega_max")) r.fail(p + "omega_max", "missing required key");
    if (!r.has(p + "n_modes")) r.fail(p + "n_modes", "missing required key");
    r.number(p + "alpha", b.alpha);
    r.number(p + "omega_c", b.omega_c);
    r.number(p + "omega_max", b.omega_max);
    r.integer(p + "n_modes", b.n_modes, 1, 100000);
    if (!(b.alpha >= 0.0)) r.fail(p + "alpha", "must be >= 0");
    if (!(b.omega_c > 0.0)) r.fail(p + "omega_c", "must be > 0");
    if (!(b.omega_max > 0.0)) r.fail(p + "omega_max", "must be > 0");
    return;
  }
  b.kind = "modes";
  b.omega = r.list(p + "omega");
  b.coupling = r.list(p + "coupling");
  if (b.omega.size() != b.coupling.size()) r.fail(p + "coupling", "must have as many entries as omega");
  for (double w : b.omega)
    if (!(w > 0.0)) r.fail(p + "omega", "frequencies must be > 0");
  (void)perturbed;
}

}  // namespace

SystemSpec SystemSection::build() const {
  if (preset == "spin_boson") {
    const std::map<std::string, SpinObservable> obs{{"sigma_z", SpinObservable::sigma_z},
                                                    {"sigma_x", SpinObservable::sigma_x},
                                                    {"identity", SpinObservable::identity}};
    const std::map<std::string, SpinState> st{{"up", SpinState::up},
                                              {"down", SpinState::down},
                                              {"plus", SpinState::plus},
                                              {"minus", SpinState::minus}};
    return spin_boson_system(epsilon, delta, obs.at(observable), st.at(initial_state));
  }
  return SystemSpec(h_s, w_s, o_s, rho_s);
}

CorrelationSource BathSection::build(const std::optional<BathSpec>& base) const {
  if (kind == "table") return load_tabulated_csv(table);
  if (kind == "scaled") {
    if (!base) throw ConfigError("perturbed_bath: *_scale needs a mode-based [bath]");
    BathSpec out = *base;
    for (auto& m : out.modes) {
      m.c *= coupling_scale;
      m.omega *= omega_scale;
    }
    if (beta > 0.0) out.beta = beta;
    return out;
  }
  if (kind == "spectral") {
    std::vector<double> edges;
    for (int i = 0; i <= n_modes; ++i) edges.push_back(omega_max * i / n_modes);
    const double a = alpha, wc = omega_c;
    return discretize_spectral_density(
        [&](double w) { return 0.5 * 3.14159265358979323846 * a * w * std::exp(-w / wc); }, edges, beta);
  }
  BathSpec out;
  out.beta = beta;
  for (std::size_t i = 0; i < omega.size(); ++i) out.modes.push_back({omega[i], coupling[i]});
  return out;
}

RunConfig parse_config(const std::string& command, const std::filesystem::path& path,
                       const Overrides& overrides) {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
    throw ConfigError("unknown command '" + command + "'");
  if (!std::filesystem::exists(path)) throw ConfigError(path.string() + ": cannot read config file");

  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.filename() + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  const Reader r(path, tree);
  r.check_schema();

  RunConfig cfg;
  cfg.command = command;
  cfg.config_path = path;

  read_system(r, cfg.system);
  read_bath(r, "bath", cfg.bath, false);
  if (cfg.bath.kind == "scaled") r.fail("bath", "*_scale keys are only valid in [perturbed_bath]");
  if (r.has("perturbed_bath")) {
    cfg.perturbed_bath.emplace();
    read_bath(r, "perturbed_bath", *cfg.perturbed_bath, true);
  }

  DysonConfig& d = cfg.dyson;
  r.number("dyson.t", d.t);
  if (!(d.t >= 0.0)) r.fail("dyson.t", "t must be >= 0");
  r.integer("dyson.max_order", d.max_order, 0, 64);
  if (d.max_order % 2 != 0) r.fail("dyson.max_order", "max_order must be even");
  if (auto v = r.raw("dyson.integrator")) {
    if (*v == "gauss") d.integrator = Integrator::gauss;
    else if (*v == "monte_carlo") d.integrator = Integrator::monte_carlo;
    else r.fail("dyson.integrator", "must be one of {gauss, monte_carlo}, got '" + *v + "'");
  }
  r.integer("dyson.samples_per_order", d.samples_per_order, 1, 1LL << 40);
  r.integer("dyson.gauss_points", d.gauss_points, 1, 512);
  r.integer("dyson.seed", d.seed, 0, std::numeric_limits<long long>::max());
  r.integer("dyson.workers", d.workers, 0, 4096);

  FockTruncation& tr = cfg.truncation;
  std::size_t n_modes = 1;
  if (cfg.bath.kind == "modes") n_modes = cfg.bath.omega.size();
  if (cfg.bath.kind == "spectral") n_modes = static_cast<std::size_t>(cfg.bath.n_modes);
  tr = FockTruncation::defaults_for(n_modes);
  r.integer("truncation.n_max", tr.n_max, 1, 1000);
  r.integer("truncation.memory_ceiling", tr.memory_ceiling, 1, 1LL << 20);
  r.number("truncation.tail_threshold", tr.tail_threshold);
  r.number("truncation.edge_threshold", tr.edge_threshold);
  if (!(tr.tail_threshold > 0.0)) r.fail("truncation.tail_threshold", "must be > 0");
  if (!(tr.edge_threshold > 0.0)) r.fail("truncation.edge_threshold", "must be > 0");
  if (const char* env = std::getenv("OQS_MEMORY_CEILING")) {
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(env, &pos);
      if (pos != std::string(env).size() || v < 1) throw std::invalid_argument("range");
      tr.memory_ceiling = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw ConfigError(std::string("OQS_MEMORY_CEILING: expected a positive integer, got '") + env + "'");
    }
  }

  CheckSection& c = cfg.check;
  r.integer("check.m", c.m, 0, 64);
  r.integer("check.samples", c.samples, 1, 1 << 30);
  r.number("check.si", c.si);
  if (r.has("check.sf")) {
    double sf = 0.0;
    r.number("check.sf", sf);
    c.sf = sf;
  }
  r.choice("check.correlation", c.correlation, {"bath", "constant"});
  double cre = 1.0, cim = 0.0;
  r.number("check.constant_re", cre);
  r.number("check.constant_im", cim);
  c.constant = {cre, cim};
  r.integer("check.quad_points", c.quad_points, 2, 512);
  r.boolean("check.first_order", c.first_order);
  r.number("check.eps_coarse", c.eps_coarse);
  r.number("check.eps_fine", c.eps_fine);
  r.number("check.wick_tolerance", c.wick_tolerance);
  if (!(c.eps_coarse > 0.0)) r.fail("check.eps_coarse", "must be > 0");
  if (!(c.eps_fine > 0.0) || c.eps_fine == c.eps_coarse) r.fail("check.eps_fine", "must be > 0 and differ from eps_coarse");
  if (!(c.wick_tolerance > 0.0)) r.fail("check.wick_tolerance", "must be > 0");

  if (auto v = r.raw("output.prefix")) cfg.out = *v;

  if (overrides.workers) d.workers = *overrides.workers;
  if (overrides.seed) d.seed = *overrides.seed;
  if (overrides.out) cfg.out = *overrides.out;
  if (overrides.m) {
    if (*overrides.m < 0) throw ConfigError("--m: must be >= 0");
    c.m = *overrides.m;
  }

  const double sf = c.sf.value_or(2.0 * d.t);
  if (command == "check-comb" && (c.m < 2 || c.m % 2 != 0)) r.fail("check.m", "m must be even and >= 2");
  if (command == "check-comb" && !(sf > c.si)) r.fail("check.sf", "requires si < sf");
  if (command == "check-wick" && c.m > 6) r.fail("check.m", "m must be <= 6");
  if ((command == "bound" || command == "check-identity") && !cfg.perturbed_bath)
    r.fail("perturbed_bath", "section required by command " + command);
  if (command == "check-identity" && (d.max_order < 2)) r.fail("dyson.max_order", "must be >= 2 for check-identity");
  if (command != "check-comb" && command != "check-wick" && !(d.t > 0.0) && command != "observable" &&
      command != "oracle")
    r.fail("dyson.t", "t must be > 0 for " + command);
  return cfg;
}

nlohmann::json to_json(const RunConfig& cfg) {
  using nlohmann::json;
  auto matrix = [](const Operator& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        re.push_back(m(i, j).real());
        im.push_back(m(i, j).imag());
      }
    return json{{"re", re}, {"im", im}};
  };
  json sys{{"preset", cfg.system.preset}};
  if (cfg.system.preset == "spin_boson") {
    sys["epsilon"] = cfg.system.epsilon;
    sys["delta"] = cfg.system.delta;
    sys["observable"] = cfg.system.observable;
    sys["initial_state"] = cfg.system.initial_state;
  } else {
    sys["dim"] = cfg.system.h_s.rows();
    sys["h_s"] = matrix(cfg.system.h_s);
    sys["w_s"] = matrix(cfg.system.w_s);
    sys["o_s"] = matrix(cfg.system.o_s);
    sys["rho_s"] = matrix(cfg.system.rho_s);
  }
  auto bath = [](const BathSection& b) {
    json j{{"kind", b.kind}};
    if (b.kind == "modes") {
      j["omega"] = b.omega;
      j["coupling"] = b.coupling;
      j["beta"] = b.beta;
    } else if (b.kind == "table") {
      j["table"] = b.table.string();
    } else if (b.kind == "spectral") {
      j["spectral"] = "ohmic";
      j["alpha"] = b.alpha;
      j["omega_c"] = b.omega_c;
      j["omega_max"] = b.omega_max;
      j["n_modes"] = b.n_modes;
      j["beta"] = b.beta;
    } else {
      j["coupling_scale"] = b.coupling_scale;
      j["omega_scale"] = b.omega_scale;
      j["beta"] = b.beta > 0.0 ? json(b.beta) : json("inherit");
    }
    return j;
  };
  const DysonConfig& d = cfg.dyson;
  json out{
      {"command", cfg.command},
      {"config_path", cfg.config_path.string()},
      {"output_prefix", cfg.out},
      {"system", sys},
      {"bath", bath(cfg.bath)},
      {"dyson",
       {{"t", d.t},
        {"max_order", d.max_order},
        {"integrator", d.integrator == Integrator::gauss ? "gauss" : "monte_carlo"},
        {"samples_per_order", d.samples_per_order},
        {"gauss_points", d.gauss_points},
        {"seed", d.seed},
        {"workers", d.workers},
        {"tolerances",
         {{"herm", d.tol.herm}, {"psd", d.tol.psd}, {"trace", d.tol.trace}, {"imag", d.tol.imag}}}}},
      {"truncation",
       {{"n_max", cfg.truncation.n_max},
        {"memory_ceiling", cfg.truncation.memory_ceiling},
        {"tail_threshold", cfg.truncation.tail_threshold},
        {"edge_threshold", cfg.truncation.edge_threshold}}},
      {"check",
       {{"m", cfg.check.m},
        {"samples", cfg.check.samples},
        {"si", cfg.check.si},
        {"sf", cfg.check.sf.value_or(2.0 * d.t)},
        {"correlation", cfg.check.correlation},
        {"constant_re", cfg.check.constant.real()},
        {"constant_im", cfg.check.constant.imag()},
        {"quad_points", cfg.check.quad_points},
        {"first_order", cfg.check.first_order},
        {"eps_coarse", cfg.check.eps_coarse},
        {"eps_fine", cfg.check.eps_fine},
        {"wick_tolerance", cfg.check.wick_tolerance}}},
  };
  out["perturbed_bath"] = cfg.perturbed_bath ? bath(*cfg.perturbed_bath) : json(nullptr);
  return out;
}

}  // namespace oqs::cli
