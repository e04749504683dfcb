#include "occutime/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "occutime/errors.hpp"
#include "occutime/function_parser.hpp"

namespace occutime {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Defaults for every section except [process], which depends on the kind.
const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> table{
      {"grid.horizon", "1"},
      {"grid.n", "16, 32, 64, 128, 256, 512"},
      {"grid.refine", "64"},
      {"study.function", "gaussian_bump"},
      {"study.estimators", "riemann, trapezoid"},
      {"study.paths", "1000"},
      {"study.seed", "1"},
      {"study.t_eval", "horizon"},
      {"study.per_path", "false"},
      {"study.bridge_time_nodes", "8"},
      {"study.bridge_space_nodes", "32"},
      {"study.bridge_closed_form", "true"},
      {"norms.orders", "1"},
      {"norms.kind", "sobolev"},
      {"norms.u_max", "10000"},
      {"norms.divergence_eps", "0.05"},
      {"norms.panel_nodes", "20"},
      {"norms.tail_octaves", "7"},
      {"norms.require_finite", "false"},
      {"diagnostics.frequencies", "1, 2, 5"},
      {"diagnostics.decomposition_paths", "100"},
      {"diagnostics.probe_n", "8, 16, 32, 64, 128, 256"},
      {"diagnostics.probe_frequencies", "0, 1, 3, 10"},
      {"diagnostics.probe_paths", "400"},
      {"diagnostics.probe_smoothness", "1"},
      {"diagnostics.char_paths", "100000"},
      {"diagnostics.char_lag", "0.5"},
      {"simulate.paths", "10"},
      {"simulate.regularity_paths", "200"},
  };
  return table;
}

const std::set<std::string> kCommonProcessKeys{"kind", "dim", "initial", "shift"};
const std::set<std::string> kGaussianKeys{"drift", "diffusion", "diffusion_matrix",
                                          "allow_degenerate"};
const std::set<std::string> kStochVolKeys{"sigma0", "eta", "kappa", "alpha", "beta"};

double to_double(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + t + "'");
  }
  return v;
}

std::size_t to_count(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + t + "'");
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + t + "'");
}

std::vector<std::string> list_items(std::string_view text, char sep = ',') {
  std::vector<std::string> out;
  for (auto& item : split_top_level(text, sep)) {
    if (!item.empty()) out.push_back(std::move(item));
  }
  return out;
}

std::vector<double> to_doubles(std::string_view key, std::string_view text) {
  std::vector<double> out;
  for (const auto& item : list_items(text)) out.push_back(to_double(key, item));
  return out;
}

std::vector<std::size_t> to_counts(std::string_view key, std::string_view text) {
  std::vector<std::size_t> out;
  for (const auto& item : list_items(text)) out.push_back(to_count(key, item));
  return out;
}

// "name(a, b, ...)" -> (name, args). A bare word yields no arguments.
std::pair<std::string, std::vector<double>> call_form(std::string_view key,
                                                      std::string_view text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos) return {t, {}};
  if (t.back() != ')') throw ConfigError(std::string(key) + ": unbalanced '" + t + "'");
  return {trim(std::string_view(t).substr(0, open)),
          to_doubles(key, std::string_view(t).substr(open + 1, t.size() - open - 2))};
}

}  // namespace

ConfigFile parse_config(std::string_view text, std::string source) {
  ConfigFile file;
  file.source = std::move(source);
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const std::string where = file.source + ":" + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    if (section.empty()) throw ConfigError(where + "key outside of any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ConfigError(where + "empty key");
    const std::string full = section + "." + key;
    if (!file.entries.emplace(full, trim(std::string_view(line).substr(eq + 1))).second) {
      throw ConfigError(where + "duplicate key " + full);
    }
  }
  return file;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

void apply_override(ConfigFile& file, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const std::string key = trim(assignment.substr(0, std::min(eq, assignment.size())));
  if (eq == std::string_view::npos || key.empty() || key.find('.') == std::string::npos) {
    throw ConfigError("override must look like section.key=value, got '" +
                      std::string(assignment) + "'");
  }
  file.entries[key] = trim(assignment.substr(eq + 1));
}

TimeFunction parse_time_function(std::string_view text) {
  const std::string t = trim(text);
  if (!t.empty() && t.find('(') == std::string::npos) {
    return TimeFunction::constant(to_double("time function", t));
  }
  const auto [name, args] = call_form("time function", t);
  if (name == "constant" && args.size() == 1) return TimeFunction::constant(args[0]);
  if (name == "linear" && args.size() == 2) return TimeFunction::linear(args[0], args[1]);
  if (name == "sine" && args.size() == 3) return TimeFunction::sine(args[0], args[1], args[2]);
  throw ConfigError("unknown time function '" + t +
                    "' (expected constant(a), linear(a, b) or sine(a, c, omega))");
}

ProcessSpec parse_process(const std::map<std::string, std::string>& keys,
                          double validation_horizon) {
  auto get = [&](const std::string& k, const std::string& fallback) {
    const auto it = keys.find(k);
    return it == keys.end() ? fallback : it->second;
  };
  std::string kind = trim(get("kind", "brownian"));
  if (kind == "gaussian" || kind == "deterministic") kind = "deterministic_gaussian";
  if (kind != "brownian" && kind != "deterministic_gaussian" && kind != "stochvol") {
    throw ConfigError("process.kind: unknown kind '" + kind +
                      "' (expected brownian, deterministic_gaussian or stochvol)");
  }
  for (const auto& [k, v] : keys) {
    const bool known = kCommonProcessKeys.count(k) ||
                       (kind == "deterministic_gaussian" && kGaussianKeys.count(k)) ||
                       (kind == "stochvol" && kStochVolKeys.count(k));
    if (!known) {
      if (kGaussianKeys.count(k) || kStochVolKeys.count(k)) {
        throw ConfigError("process." + k + " does not apply to kind=" + kind);
      }
      throw ConfigError("unknown config key process." + k);
    }
  }

  const std::size_t dim = to_count("process.dim", get("dim", "1"));
  if (dim < 1) throw ConfigError("process.dim must be at least 1");

  InitialLaw initial = FixedPoint{std::vector<double>(dim, 0.0)};
  {
    const auto [name, args] = call_form("process.initial", get("initial", "point(0)"));
    if (name == "point") {
      if (args.size() == 1) {
        initial = FixedPoint{std::vector<double>(dim, args[0])};
      } else if (args.size() == dim) {
        initial = FixedPoint{args};
      } else {
        throw ConfigError("process.initial: point() needs 1 or dim values");
      }
    } else if (name == "uniform" && args.size() == 2) {
      initial = UniformBox{args[0], args[1]};
    } else if (name == "gaussian" && args.size() == 2) {
      initial = GaussianLaw{args[0], args[1]};
    } else {
      throw ConfigError("process.initial: expected point(x..), uniform(lo, hi) or gaussian(m, sd)");
    }
  }

  std::optional<ShiftLaw> shift;
  {
    const auto [name, args] = call_form("process.shift", get("shift", "none"));
    if (name == "uniform" && args.size() == 1) {
      shift = ShiftLaw{args[0]};
    } else if (name != "none" || !args.empty()) {
      throw ConfigError("process.shift: expected none or uniform(h)");
    }
  }

  Coefficients coefficients = BrownianMotion{};
  if (kind == "deterministic_gaussian") {
    DeterministicGaussian dg;
    dg.drift = parse_time_function(get("drift", "constant(0)"));
    dg.diffusion = parse_time_function(get("diffusion", "constant(1)"));
    dg.mixing = to_doubles("process.diffusion_matrix", get("diffusion_matrix", ""));
    if (!dg.mixing.empty() && dg.mixing.size() != dim * dim) {
      throw ConfigError("process.diffusion_matrix needs dim*dim entries");
    }
    dg.allow_degenerate = to_bool("process.allow_degenerate", get("allow_degenerate", "false"));
    coefficients = dg;
  } else if (kind == "stochvol") {
    StochVol sv;
    sv.sigma0 = to_double("process.sigma0", get("sigma0", "1"));
    sv.eta = to_double("process.eta", get("eta", "0.5"));
    sv.kappa = to_double("process.kappa", get("kappa", "0.5"));
    sv.alpha = to_double("process.alpha", get("alpha", "0.5"));
    sv.beta = to_double("process.beta", get("beta", "0.5"));
    coefficients = sv;
  }
  try {
    return ProcessSpec(static_cast<int>(dim), initial, coefficients, shift, validation_horizon);
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("process: ") + e.what());
  } catch (const SimulationError& e) {
    throw ConfigError(std::string("process: ") + e.what());
  }
}

RunConfig resolve_config(const ConfigFile& file) {
  std::map<std::string, std::string> merged = defaults();
  std::map<std::string, std::string> process_keys;
  for (const auto& [key, value] : file.entries) {
    if (key.rfind("process.", 0) == 0) {
      process_keys[key.substr(8)] = value;
    } else if (merged.count(key)) {
      merged[key] = value;
    } else {
      throw ConfigError(file.source + ": unknown config key " + key);
    }
  }

  RunConfig run;
  StudyConfig& st = run.study;
  st.horizon = to_double("grid.horizon", merged["grid.horizon"]);
  if (!(st.horizon > 0.0)) throw ConfigError("grid.horizon must be positive");
  st.spec = std::make_shared<const ProcessSpec>(parse_process(process_keys, st.horizon));
  st.n_list = to_counts("grid.n", merged["grid.n"]);
  st.refine = to_count("grid.refine", merged["grid.refine"]);

  st.functions = list_items(merged["study.function"], ';');
  if (st.functions.empty()) throw ConfigError("study.function must name at least one function");
  for (const auto& f : st.functions) parse_function(f);
  st.estimators.clear();
  for (const auto& e : list_items(merged["study.estimators"])) {
    try {
      st.estimators.push_back(estimator_from_string(e));
    } catch (const std::exception&) {
      throw ConfigError("study.estimators: unknown estimator '" + e + "'");
    }
  }
  st.paths = to_count("study.paths", merged["study.paths"]);
  st.master_seed = to_count("study.seed", merged["study.seed"]);
  const std::string t_eval = trim(merged["study.t_eval"]);
  if (t_eval == "horizon") {
    st.t_eval.reset();
  } else {
    st.t_eval = to_double("study.t_eval", t_eval);
  }
  st.per_path = to_bool("study.per_path", merged["study.per_path"]);
  st.quadrature.time_nodes =
      static_cast<int>(to_count("study.bridge_time_nodes", merged["study.bridge_time_nodes"]));
  st.quadrature.space_nodes =
      static_cast<int>(to_count("study.bridge_space_nodes", merged["study.bridge_space_nodes"]));
  st.quadrature.closed_form = to_bool("study.bridge_closed_form", merged["study.bridge_closed_form"]);

  auto& dg = st.diagnostics;
  dg.frequencies = to_doubles("diagnostics.frequencies", merged["diagnostics.frequencies"]);
  dg.decomposition_paths =
      to_count("diagnostics.decomposition_paths", merged["diagnostics.decomposition_paths"]);
  dg.probe_n = to_counts("diagnostics.probe_n", merged["diagnostics.probe_n"]);
  dg.probe_frequencies =
      to_doubles("diagnostics.probe_frequencies", merged["diagnostics.probe_frequencies"]);
  dg.probe_paths = to_count("diagnostics.probe_paths", merged["diagnostics.probe_paths"]);
  dg.probe_smoothness =
      to_double("diagnostics.probe_smoothness", merged["diagnostics.probe_smoothness"]);
  dg.char_paths = to_count("diagnostics.char_paths", merged["diagnostics.char_paths"]);
  dg.char_lag = to_double("diagnostics.char_lag", merged["diagnostics.char_lag"]);

  auto& nm = run.norms;
  nm.orders = to_doubles("norms.orders", merged["norms.orders"]);
  const std::string kind = trim(merged["norms.kind"]);
  if (kind == "sobolev") {
    nm.sobolev = true, nm.fourier_lebesgue = false;
  } else if (kind == "fourier_lebesgue") {
    nm.sobolev = false, nm.fourier_lebesgue = true;
  } else if (kind == "both") {
    nm.sobolev = nm.fourier_lebesgue = true;
  } else {
    throw ConfigError("norms.kind: expected sobolev, fourier_lebesgue or both");
  }
  nm.settings.u_max = to_double("norms.u_max", merged["norms.u_max"]);
  nm.settings.divergence_eps = to_double("norms.divergence_eps", merged["norms.divergence_eps"]);
  nm.settings.panel_nodes = static_cast<int>(to_count("norms.panel_nodes", merged["norms.panel_nodes"]));
  nm.settings.tail_octaves =
      static_cast<int>(to_count("norms.tail_octaves", merged["norms.tail_octaves"]));
  nm.require_finite = to_bool("norms.require_finite", merged["norms.require_finite"]);
  if (!(nm.settings.u_max > 0.0) || nm.settings.tail_octaves < 2) {
    throw ConfigError("norms: u_max must be positive and tail_octaves at least 2");
  }

  run.simulate.paths = to_count("simulate.paths", merged["simulate.paths"]);
  run.simulate.regularity_paths =
      to_count("simulate.regularity_paths", merged["simulate.regularity_paths"]);

  run.echo = merged;
  for (const auto& [k, v] : st.spec->to_config()) run.echo["process." + k] = v;
  return run;
}

std::string render_echo(const std::map<std::string, std::string>& echo) {
  std::string out;
  for (const auto& [k, v] : echo) out += k + " = " + v + "\n";
  return out;
}

}  // namespace occutime
