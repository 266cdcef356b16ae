#include "hypdyn/cli.hpp"
#include "hypdyn/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hypdyn::Error(hypdyn::ErrorKind::InvalidInput, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw hypdyn::Error(hypdyn::ErrorKind::InvalidInput, path + ": " + e.what());
  }
}

template <class T>
void put(json& config, const char* section, const char* key, const std::optional<T>& value) {
  if (value) config[section][key] = *value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coarse-geometric diagnostics for Smale spaces"};
  std::string command;
  std::optional<std::string> system_file, config_file, out_file, side, matrix, bounds, csv, edges, filter;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads, s_rad, levels, rho, n_lo, n_hi, depth, n_max;
  std::optional<double> window, spacing, beta, tube, epsilon0;
  std::optional<std::size_t> quadruples;
  bool inject_fault = false;

  std::string names;
  for (const auto& n : hypdyn::command_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("command", command, "One of: " + names)->required();
  app.add_option("--system", system_file, "System description JSON");
  app.add_option("--config", config_file, "Run configuration JSON");
  app.add_option("--out", out_file, "Write the report here instead of stdout");
  app.add_option("--seed", seed);
  app.add_option("--threads", threads);
  app.add_option("--side", side, "stable, unstable or both");
  app.add_option("--window", window);
  app.add_option("--spacing", spacing);
  app.add_option("--depth", depth, "Shift leaf sample depth");
  app.add_option("--epsilon0", epsilon0);
  app.add_option("--n-max", n_max);
  app.add_option("--n-lo", n_lo);
  app.add_option("--n-hi", n_hi);
  app.add_option("--beta", beta);
  app.add_option("--matrix", matrix, "Integer matrix, rows separated by ';'");
  app.add_option("--s-rad", s_rad);
  app.add_option("--tube", tube);
  app.add_option("--levels", levels);
  app.add_option("--rho", rho);
  app.add_option("--quadruples", quadruples);
  app.add_option("--bounds", bounds, "lambda1,lambda2,mu2,mu1");
  app.add_option("--csv", csv, "CSV side file");
  app.add_option("--edges", edges, "Edge list CSV");
  app.add_option("--filter", filter, "Selfcheck module prefix");
  app.add_flag("--inject-fault", inject_fault, "Selfcheck with a flipped bracket orientation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  json config = json::object();
  try {
    if (config_file) config = read_json(*config_file);
    if (!config.is_object()) throw hypdyn::Error(hypdyn::ErrorKind::InvalidInput, "configuration must be an object");
    if (system_file) config["system"] = read_json(*system_file);
    if (seed) config["seed"] = *seed;
    if (threads) config["threads"] = *threads;
    put(config, "sample", "side", side);
    put(config, "sample", "window", window);
    put(config, "sample", "spacing", spacing);
    put(config, "sample", "depth", depth);
    put(config, "logscale", "epsilon0", epsilon0);
    put(config, "logscale", "n_max", n_max);
    put(config, "options", "n_lo", n_lo);
    put(config, "options", "n_hi", n_hi);
    put(config, "options", "beta", beta);
    put(config, "options", "s_rad", s_rad);
    put(config, "options", "tube", tube);
    put(config, "options", "levels", levels);
    put(config, "options", "rho", rho);
    put(config, "options", "quadruples", quadruples);
    put(config, "options", "csv", csv);
    put(config, "options", "edges", edges);
    put(config, "options", "filter", filter);
    if (inject_fault) config["options"]["inject_fault"] = true;
    if (matrix) config["options"]["matrix"] = hypdyn::parse_matrix(*matrix);
    if (bounds) config["options"]["bounds"] = hypdyn::parse_list(*bounds);
  } catch (const hypdyn::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  const hypdyn::Report report = hypdyn::run_command(command, config);
  const std::string text = report.json.dump(2) + "\n";
  if (out_file) {
    std::ofstream out(*out_file, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << *out_file << '\n';
      return 2;
    }
    out << text;
  } else {
    std::cout << text;
  }
  if (report.json.contains("error")) std::cerr << report.json["error"]["message"].get<std::string>() << '\n';
  return report.exit_code;
}
