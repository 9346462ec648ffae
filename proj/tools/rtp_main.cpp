#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rtp/errors.hpp"
#include "rtp/experiments.hpp"
#include "rtp/version.hpp"

namespace {

using nlohmann::json;

struct Flags {
  std::optional<int> n;
  std::vector<int> d;
  std::optional<std::int64_t> p;
  std::optional<double> gamma;
  std::optional<std::string> dist;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> z_im_floor;
  std::optional<std::string> grid;
  std::optional<double> eta;
  std::optional<int> bins;
  std::vector<double> population;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> config_file;
};

void add_common_options(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--n", flags.n, "ambient dimension n");
  cmd->add_option("--d", flags.d, "tensor order d (repeatable for scans)");
  cmd->add_option("--p", flags.p, "sample count p");
  cmd->add_option("--gamma", flags.gamma, "aspect ratio N/p (resolves p)");
  cmd->add_option("--dist", flags.dist, "rademacher | gaussian | threepoint:B");
  cmd->add_option("--trials", flags.trials, "trial / instance count");
  cmd->add_option("--seed", flags.seed, "master RNG seed");
  cmd->add_option("--z-im-floor", flags.z_im_floor, "lowest Im z used by solvers");
  cmd->add_option("--grid", flags.grid, "real grid as lo:hi:steps");
  cmd->add_option("--eta", flags.eta, "Stieltjes inversion offset");
  cmd->add_option("--bins", flags.bins, "histogram bin count");
  cmd->add_option("--population", flags.population, "population eigenvalues v1,v2,...")
      ->delimiter(',');
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--format", flags.format, "csv | json");
  cmd->add_option("--config", flags.config_file, "JSON config file (flags override)");
}

void parse_grid(const std::string& text, rtp::ExperimentConfig& config) {
  std::istringstream in(text);
  std::string lo, hi, steps;
  if (!std::getline(in, lo, ':') || !std::getline(in, hi, ':') || !std::getline(in, steps)) {
    throw std::invalid_argument("--grid expects lo:hi:steps");
  }
  config.grid_lo = std::stod(lo);
  config.grid_hi = std::stod(hi);
  config.grid_steps = std::stoi(steps);
}

void apply_config_file(const std::string& path, rtp::ExperimentConfig& config) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  json doc = json::parse(in);
  if (doc.contains("n")) config.n = doc["n"].get<int>();
  if (doc.contains("d")) {
    if (doc["d"].is_array()) {
      config.d_values = doc["d"].get<std::vector<int>>();
    } else {
      config.d_values = {doc["d"].get<int>()};
    }
  }
  if (doc.contains("p")) config.p = doc["p"].get<std::int64_t>();
  if (doc.contains("gamma")) config.gamma = doc["gamma"].get<double>();
  if (doc.contains("dist")) config.dist = doc["dist"].get<std::string>();
  if (doc.contains("trials")) config.trials = doc["trials"].get<int>();
  if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("z_im_floor")) config.z_im_floor = doc["z_im_floor"].get<double>();
  if (doc.contains("grid")) {
    if (doc["grid"].is_array()) {
      config.grid_lo = doc["grid"][0].get<double>();
      config.grid_hi = doc["grid"][1].get<double>();
      config.grid_steps = doc["grid"][2].get<int>();
    } else {
      parse_grid(doc["grid"].get<std::string>(), config);
    }
  }
  if (doc.contains("eta")) config.eta = doc["eta"].get<double>();
  if (doc.contains("bins")) config.bins = doc["bins"].get<int>();
  if (doc.contains("population")) config.population = doc["population"].get<std::vector<double>>();
  if (doc.contains("out")) config.out = doc["out"].get<std::string>();
  if (doc.contains("format")) {
    const auto fmt = doc["format"].get<std::string>();
    config.format = fmt == "json" ? rtp::OutputFormat::Json : rtp::OutputFormat::Csv;
  }
}

rtp::ExperimentConfig assemble(const std::string& experiment, const Flags& flags) {
  rtp::ExperimentConfig config;
  config.experiment = experiment;
  if (flags.config_file) apply_config_file(*flags.config_file, config);
  if (flags.n) config.n = *flags.n;
  if (!flags.d.empty()) config.d_values = flags.d;
  if (flags.p) config.p = *flags.p;
  if (flags.gamma) config.gamma = *flags.gamma;
  if (flags.dist) config.dist = *flags.dist;
  if (flags.trials) config.trials = *flags.trials;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.z_im_floor) config.z_im_floor = *flags.z_im_floor;
  if (flags.grid) parse_grid(*flags.grid, config);
  if (flags.eta) config.eta = *flags.eta;
  if (flags.bins) config.bins = *flags.bins;
  if (!flags.population.empty()) config.population = flags.population;
  if (flags.out) config.out = *flags.out;
  if (flags.format) {
    if (*flags.format != "csv" && *flags.format != "json") {
      throw std::invalid_argument("--format must be csv or json");
    }
    config.format = *flags.format == "json" ? rtp::OutputFormat::Json : rtp::OutputFormat::Csv;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random tensor product covariance laboratory"};
  app.set_version_flag("--version", rtp::kVersion);
  app.require_subcommand(1);

  const std::vector<std::string> experiments = {"esd",           "threshold-scan",
                                                "variance-check", "moments-check",
                                                "identity-suite", "fixpoint"};
  const std::vector<std::string> blurbs = {
      "sample covariance spectra and compare against the MP law",
      "sweep d across the sqrt(n) boundary",
      "exact norm variance vs bounds and Monte Carlo",
      "brute-force tensor moments vs the moment bound",
      "randomized resolvent identity checks",
      "self-consistent spectral law solver"};
  std::vector<Flags> flag_sets(experiments.size());
  for (std::size_t i = 0; i < experiments.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(experiments[i], blurbs[i]);
    add_common_options(cmd, flag_sets[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rtp::kExitOk : rtp::kExitUsage;
  }

  try {
    for (std::size_t i = 0; i < experiments.size(); ++i) {
      if (app.get_subcommand(experiments[i])->parsed()) {
        return rtp::run_experiment(assemble(experiments[i], flag_sets[i]));
      }
    }
    std::cerr << "no experiment selected\n";
    return rtp::kExitUsage;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return rtp::kExitUsage;
  } catch (const std::domain_error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return rtp::kExitUsage;
  } catch (const rtp::ResourceError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return rtp::kExitUsage;
  } catch (const rtp::NonConvergenceError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return rtp::kExitNonConvergence;
  } catch (const rtp::NumericError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return rtp::kExitNonConvergence;
  } catch (const std::logic_error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return rtp::kExitBoundViolation;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return rtp::kExitUsage;
  }
}
