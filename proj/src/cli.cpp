#include "hypdyn/cli.hpp"

#include "hypdyn/errors.hpp"
#include "hypdyn/exponents.hpp"
#include "hypdyn/hypgraph.hpp"
#include "hypdyn/leafgraph.hpp"
#include "hypdyn/metrics.hpp"
#include "hypdyn/parallel.hpp"
#include "hypdyn/selfcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace hypdyn {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Reads config values and records every value actually used, defaults
// included, so the report can echo the effective configuration.
class Settings {
 public:
  explicit Settings(const json& config) : config_(config) {}

  template <class T>
  T get(const std::string& section, const std::string& key, T fallback) {
    T value = fallback;
    if (config_.contains(section) && config_.at(section).contains(key)) value = config_.at(section).at(key).get<T>();
    echo_[section][key] = value;
    return value;
  }
  template <class T>
  std::optional<T> maybe(const std::string& section, const std::string& key) {
    if (!config_.contains(section) || !config_.at(section).contains(key)) return std::nullopt;
    T value = config_.at(section).at(key).get<T>();
    echo_[section][key] = value;
    return value;
  }
  bool has(const std::string& section, const std::string& key) const {
    return config_.contains(section) && config_.at(section).contains(key);
  }
  const json& raw() const { return config_; }
  json& echo() { return echo_; }

 private:
  const json& config_;
  json echo_ = json::object();
};

std::uint64_t seed_of(Settings& s) {
  const std::uint64_t seed = s.raw().contains("seed") ? s.raw().at("seed").get<std::uint64_t>() : 1;
  s.echo()["seed"] = seed;
  return seed;
}

int threads_of(Settings& s) {
  const int threads = s.raw().contains("threads") ? s.raw().at("threads").get<int>() : default_threads();
  if (threads < 1) throw Error(ErrorKind::InvalidInput, "threads must be at least 1");
  s.echo()["threads"] = threads;
  return threads;
}

System system_of(Settings& s) {
  System sys = system_from_json(s.raw().at("system"));
  s.echo()["system"] = system_to_json(sys);
  return sys;
}

LogScaleConfig logscale_of(Settings& s) {
  LogScaleConfig c;
  c.epsilon0 = s.get("logscale", "epsilon0", c.epsilon0);
  c.n_max = s.get("logscale", "n_max", c.n_max);
  c.validate();
  return c;
}

SampleSpec sample_of(Settings& s, double default_spacing) {
  SampleSpec spec;
  spec.window = s.get("sample", "window", spec.window);
  spec.spacing = s.get("sample", "spacing", default_spacing);
  spec.depth = s.get("sample", "depth", spec.depth);
  return spec;
}

std::vector<Side> sides_of(Settings& s, const std::string& fallback) {
  const std::string name = s.get<std::string>("sample", "side", fallback);
  if (name == "both") return {Side::stable, Side::unstable};
  return {side_from_string(name)};
}

ExponentConfig exponent_config(Settings& s, int threads) {
  ExponentConfig c;
  c.logscale = logscale_of(s);
  c.spacing = s.get("sample", "spacing", c.spacing);
  c.depth = s.get("sample", "depth", c.depth);
  c.n_lo = s.get("options", "n_lo", c.n_lo);
  c.n_hi = s.maybe<int>("options", "n_hi");
  if (!c.n_hi) s.echo()["options"]["n_hi"] = c.resolved_n_hi();
  c.anchor = s.get("options", "anchor", c.anchor);
  c.threads = threads;
  return c;
}

IntMat int_matrix(const json& rows) {
  const auto values = rows.get<std::vector<std::vector<double>>>();
  const auto d = static_cast<Eigen::Index>(values.size());
  if (d == 0) throw Error(ErrorKind::InvalidInput, "matrix must be non-empty");
  IntMat m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    if (static_cast<Eigen::Index>(values[r].size()) != d) throw Error(ErrorKind::InvalidInput, "matrix must be square");
    for (Eigen::Index c = 0; c < d; ++c) {
      const double v = values[r][c];
      if (v != std::round(v)) throw Error(ErrorKind::InvalidInput, "matrix entries must be integers");
      m(r, c) = static_cast<std::int64_t>(v);
    }
  }
  return m;
}

bool has_matrix(const Settings& s) {
  return s.has("options", "matrix") ||
         (s.raw().contains("system") && s.raw().at("system").is_object() && s.raw().at("system").contains("matrix"));
}

IntMat matrix_of(Settings& s) {
  if (s.has("options", "matrix")) {
    s.echo()["options"]["matrix"] = s.raw().at("options").at("matrix");
    return int_matrix(s.raw().at("options").at("matrix"));
  }
  s.echo()["system"] = s.raw().at("system");
  return int_matrix(s.raw().at("system").at("matrix"));
}

json to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const IntVec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json side_json(const SideExponents& e) {
  return {{"side", to_string(e.side)},
          {"lower", e.lower},
          {"upper", e.upper},
          {"raw_min", e.raw_min},
          {"raw_max", e.raw_max},
          {"spread", e.spread},
          {"disconnected", e.disconnected},
          {"n_lo", e.n_lo},
          {"n_hi", e.n_hi},
          {"resolution_level", e.resolution_level},
          {"pairs", e.pairs.size()},
          {"fitted_pairs", e.slopes.size()}};
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path);
  return out;
}

void write_dn_csv(const std::string& path, const std::vector<const SideExponents*>& sides) {
  auto out = open_csv(path);
  out << "pair_id,side,n,dn\n";
  for (const auto* e : sides)
    for (const auto& p : e->pairs)
      for (const auto& [n, d] : p.dn)
        out << p.pair_id << ',' << to_string(e->side) << ',' << n << ','
            << (d == kInfiniteDistance ? std::string("inf") : std::to_string(d)) << '\n';
}

json exponents_command(Settings& s) {
  const System sys = system_of(s);
  const ExponentConfig c = exponent_config(s, threads_of(s));
  const ExponentReport r = exponent_report(sys, c);
  if (const auto csv = s.maybe<std::string>("options", "csv")) write_dn_csv(*csv, {&r.stable, &r.unstable});
  return {{"stable", side_json(r.stable)}, {"unstable", side_json(r.unstable)}, {"a0", r.a0}, {"a1", r.a1},
          {"b0", r.b0},                    {"b1", r.b1},                        {"pinched_margin", r.pinched_margin}};
}

json pinch_command(Settings& s) {
  const System sys = system_of(s);
  const ExponentConfig c = exponent_config(s, threads_of(s));
  const ExponentReport r = exponent_report(sys, c);
  const PinchedResult p = pinched_check(r);
  json out = {{"a0", r.a0}, {"a1", r.a1}, {"b0", r.b0}, {"b1", r.b1}, {"pinched_margin", p.margin},
              {"pinched", p.pinched}};
  if (const auto* t = std::get_if<ToralSystem>(&sys)) {
    const MatherCheck m = mather_check({t->split.stable_min_modulus(), t->split.stable_max_modulus(),
                                        t->split.unstable_min_modulus(), t->split.unstable_max_modulus()});
    out["spectral_pinched_sum"] = m.pinched_sum;
  }
  return out;
}

json connectivity_command(Settings& s) {
  const System sys = system_of(s);
  ConnectivityConfig c;
  c.threads = threads_of(s);
  c.logscale = logscale_of(s);
  c.sample = sample_of(s, 1e-3);
  c.n_lo = s.get("options", "n_lo", c.n_lo);
  c.n_hi = s.get("options", "n_hi", c.n_hi);
  c.refine = s.get("options", "refine", c.refine);
  json out = json::object();
  for (Side side : sides_of(s, "stable")) {
    const ConnectivityReport r = connectivity_report(sys, side, c);
    json levels = json::array();
    for (const auto& l : r.levels) {
      json level = {{"n", l.n}, {"connected", l.connected}, {"components", l.components}, {"vertices", l.vertices}};
      level["diameter"] = l.diameter == kInfiniteDistance ? json("inf") : json(l.diameter);
      if (is_torus(sys)) level["spacing"] = l.spacing;
      levels.push_back(level);
    }
    out[to_string(side)] = {{"levels", levels}, {"monotone", r.monotone()}};
  }
  return out;
}

json metric_command(Settings& s) {
  const System sys = system_of(s);
  const int threads = threads_of(s);
  const LogScaleConfig lc = logscale_of(s);
  const SampleSpec spec = sample_of(s, 1e-3);
  const Side side = sides_of(s, "stable").front();
  const double beta = s.get("options", "beta", 0.5);
  const LeafSample sample = leaf_sample(sys, default_base_point(sys), side, spec);
  const EllMatrix ell = internal_ell_matrix(sys, sample, lc, threads);
  const SyntheticMetric m = synthesize_metric(ell, beta);
  std::optional<HoldoutSpec> holdout;
  if (const auto fraction = s.maybe<double>("options", "holdout")) holdout = HoldoutSpec{*fraction, seed_of(s)};
  const SandwichFit fit = verify_sandwich(m, ell, beta, holdout);
  const MetricAxioms ax = check_metric_axioms(m, ell);
  if (const auto csv = s.maybe<std::string>("options", "csv")) {
    auto out = open_csv(*csv);
    for (std::size_t i = 0; i < m.size; ++i) {
      for (std::size_t j = 0; j < m.size; ++j) out << (j ? "," : "") << fmt(m(i, j));
      out << '\n';
    }
  }
  return {{"beta", beta},
          {"points", sample.size()},
          {"sandwich",
           {{"c_lower", fit.c_lower},
            {"c_upper", fit.c_upper},
            {"ratio", fit.ratio()},
            {"pairs", fit.pairs},
            {"holdout_pairs", fit.holdout_pairs},
            {"violations", fit.violations}}},
          {"axioms",
           {{"symmetric", ax.symmetric},
            {"max_triangle_excess", ax.max_triangle_excess},
            {"upper_bound_violations", ax.upper_bound_violations},
            {"zero_off_diagonal", ax.zero_off_diagonal}}}};
}

json hypgraph_command(Settings& s) {
  const IntMat phi = matrix_of(s);
  const int threads = threads_of(s);
  const std::uint64_t seed = seed_of(s);
  const GroupData data =
      GroupData::make(phi, s.get("options", "s_rad", 1), s.get("options", "tube", 1.5));
  const LevelledGraph g = build_xi(data, s.get("options", "levels", 6), s.get("options", "rho", 20));
  const auto quadruples = s.get<std::size_t>("options", "quadruples", 20000);
  const HyperbolicityEstimate e = delta_hyperbolicity(g, quadruples, seed, threads);
  std::size_t edges = 0;
  for (const auto& row : g.adjacency) edges += row.size();
  edges /= 2;
  if (const auto path = s.maybe<std::string>("options", "edges")) {
    auto out = open_csv(*path);
    out << "u,v,u_level,v_level\n";
    for (std::size_t u = 0; u < g.size(); ++u)
      for (auto v : g.adjacency[u])
        if (u < v) out << u << ',' << v << ',' << g.level_of(u) << ',' << g.level_of(v) << '\n';
  }
  return {{"delta", e.delta},
          {"quadruples_tested", e.quadruples_tested},
          {"levels", e.levels},
          {"rho", e.rho},
          {"vertices", e.vertices},
          {"edges", edges},
          {"component_size", e.component_size},
          {"restricted_to_component", e.restricted_to_component}};
}

json limits_command(Settings& s) {
  const IntMat phi = matrix_of(s);
  const SpectralSplit split = spectral_split(to_real(phi));
  const int s_rad = s.get("options", "s_rad", 2);
  const int n = s.get("options", "n", 40);
  Vec coords = Vec::Zero(split.stable_dim());
  coords(0) = 0.3;
  if (const auto c = s.maybe<std::vector<double>>("options", "target_coords")) {
    if (static_cast<int>(c->size()) != split.stable_dim())
      throw Error(ErrorKind::InvalidInput, "target_coords must have one entry per contracting dimension");
    coords = Eigen::Map<const Vec>(c->data(), static_cast<Eigen::Index>(c->size()));
  } else {
    s.echo()["options"]["target_coords"] = to_json(coords);
  }
  const Vec target = split.e_plus_basis * coords;
  const DigitExpansion e = digit_expand(split, target, s_rad, n);
  json errors = json::array();
  for (int k = 0; k <= n; ++k) errors.push_back((reconstruct(split, e, k) - target).norm());
  const GroupData data = GroupData::make(phi, s_rad, 1.5);
  const Vec boundary = boundary_point(data, lattice_path(phi, e), n);

  Vec v0 = Vec::Zero(split.dim());
  v0(0) = 1.0;
  if (const auto v = s.maybe<std::vector<double>>("options", "v0")) {
    if (static_cast<int>(v->size()) != split.dim()) throw Error(ErrorKind::InvalidInput, "v0 has the wrong dimension");
    v0 = Eigen::Map<const Vec>(v->data(), static_cast<Eigen::Index>(v->size()));
  } else {
    s.echo()["options"]["v0"] = to_json(v0);
  }
  const Mat a = to_real(phi);
  const Vec w0 = affine_fixed_point(a, v0);
  json digits = json::array();
  for (const auto& d : e.digits) digits.push_back(to_json(d));
  return {{"target", to_json(target)},
          {"g0", to_json(e.g0)},
          {"digits", digits},
          {"reconstruction_errors", errors},
          {"final_error", errors.back()},
          {"boundary_point_error", (boundary - target).norm()},
          {"fixed_point", {{"v0", to_json(v0)}, {"w0", to_json(w0)}, {"residual", (w0 - a * w0 - v0).norm()}}}};
}

json mather_command(Settings& s) {
  MatherBounds b{};
  if (const auto list = s.maybe<std::vector<double>>("options", "bounds")) {
    if (list->size() != 4) throw Error(ErrorKind::InvalidInput, "bounds needs lambda1,lambda2,mu2,mu1");
    b = {(*list)[0], (*list)[1], (*list)[2], (*list)[3]};
  } else {
    const SpectralSplit split = spectral_split(to_real(matrix_of(s)));
    b = {split.stable_min_modulus(), split.stable_max_modulus(), split.unstable_min_modulus(),
         split.unstable_max_modulus()};
  }
  const MatherCheck m = mather_check(b);
  return {{"bounds", {{"lambda1", b.lambda1}, {"lambda2", b.lambda2}, {"mu2", b.mu2}, {"mu1", b.mu1}}},
          {"brin1", m.brin1},
          {"brin2", m.brin2},
          {"pinched_sum", m.pinched_sum},
          {"pinched", m.pinched}};
}

json codim1_command(Settings& s) {
  const System sys = system_of(s);
  const ExponentConfig c = exponent_config(s, threads_of(s));
  const Side side = sides_of(s, "stable").front();
  const CodimOneResult r = codim_one_check(sys, side, c);
  json out = {{"side", to_string(r.side)}, {"a0", r.a0}, {"a1", r.a1}, {"eta", r.eta}, {"relative_gap", r.relative_gap},
              {"eta_gap", r.eta_gap}};
  SampleSpec spec;
  spec.window = s.get("sample", "window", spec.window);
  const LeafSample sample = leaf_sample(sys, default_base_point(sys), side, spec);
  const LeafMeasureResult m = leaf_measure_check(sys, sample, c.logscale);
  out["leaf_measure"] = {{"fitted_exponent", m.fitted_exponent}, {"regression_r2", m.regression_r2},
                         {"exponent_ratio", m.exponent_ratio},   {"scaling_r2", m.scaling_r2},
                         {"pairs_used", m.pairs_used}};
  return out;
}

Report selfcheck_command(Settings& s) {
  SelfcheckOptions o;
  o.filter = s.get<std::string>("options", "filter", "");
  o.inject_fault = s.get("options", "inject_fault", false);
  o.seed = seed_of(s);
  o.threads = threads_of(s);
  const auto results = selfcheck(o);
  json props = json::array();
  bool ok = true;
  for (const auto& r : results) {
    props.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    ok = ok && r.passed;
  }
  Report rep;
  rep.json["results"] = {{"properties", props}, {"passed", ok}, {"count", results.size()}};
  rep.exit_code = ok ? 0 : 3;
  return rep;
}

std::vector<std::string> missing_keys(const std::string& command, const Settings& s) {
  std::vector<std::string> missing;
  if (command == "exponents" || command == "connectivity" || command == "pinch" || command == "metric" ||
      command == "codim1") {
    if (!s.raw().contains("system")) missing.push_back("system");
  } else if (command == "hypgraph" || command == "limits") {
    if (!has_matrix(s)) missing.push_back("options.matrix (or system.matrix)");
  } else if (command == "mather") {
    if (!s.has("options", "bounds") && !has_matrix(s)) missing.push_back("options.bounds (or a matrix)");
  }
  return missing;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"exponents", "connectivity", "pinch",  "metric",   "hypgraph",
                                              "limits",    "mather",       "codim1", "selfcheck"};
  return names;
}

json round_numbers(const json& value) {
  if (value.is_number_float()) {
    const double v = value.get<double>();
    if (!std::isfinite(v)) return fmt(v);
    return std::stod(fmt(v));
  }
  if (value.is_array()) {
    json out = json::array();
    for (const auto& v : value) out.push_back(round_numbers(v));
    return out;
  }
  if (value.is_object()) {
    json out = json::object();
    for (auto it = value.begin(); it != value.end(); ++it) out[it.key()] = round_numbers(it.value());
    return out;
  }
  return value;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
      throw Error(ErrorKind::InvalidInput, "not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidInput, "empty list");
  return out;
}

json parse_matrix(const std::string& text) {
  json rows = json::array();
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_list(row));
  return rows;
}

Report run_command(const std::string& command, const json& config) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.json = {{"command", command}, {"tool_version", kToolVersion}};
  try {
    if (std::find(command_names().begin(), command_names().end(), command) == command_names().end())
      throw Error(ErrorKind::InvalidInput, "unknown command '" + command + "'");
    if (!config.is_object()) throw Error(ErrorKind::InvalidInput, "configuration must be a JSON object");
    Settings s(config);
    if (const auto missing = missing_keys(command, s); !missing.empty()) {
      std::string list;
      for (const auto& k : missing) list += (list.empty() ? "" : ", ") + k;
      throw Error(ErrorKind::InvalidInput, "configuration missing keys: " + list);
    }
    json results;
    if (command == "exponents") results = exponents_command(s);
    else if (command == "pinch") results = pinch_command(s);
    else if (command == "connectivity") results = connectivity_command(s);
    else if (command == "metric") results = metric_command(s);
    else if (command == "hypgraph") results = hypgraph_command(s);
    else if (command == "limits") results = limits_command(s);
    else if (command == "mather") results = mather_command(s);
    else if (command == "codim1") results = codim1_command(s);
    if (command == "selfcheck") {
      Report sc = selfcheck_command(s);
      results = sc.json["results"];
      rep.exit_code = sc.exit_code;
    }
    rep.json["config"] = s.echo();
    rep.json["results"] = results;
  } catch (const Error& e) {
    rep.exit_code = is_validation_error(e.kind()) ? 2 : 3;
    rep.json["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
  } catch (const json::exception& e) {
    rep.exit_code = 2;
    rep.json["error"] = {{"kind", std::string(to_string(ErrorKind::InvalidInput))}, {"message", e.what()}};
  }
  rep.json["timing"] = {
      {"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  rep.json = round_numbers(rep.json);
  return rep;
}

}  // namespace hypdyn
