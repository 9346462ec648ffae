#include "rtp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "rtp/errors.hpp"
#include "rtp/general_mp.hpp"
#include "rtp/identities.hpp"
#include "rtp/metrics.hpp"
#include "rtp/model.hpp"
#include "rtp/moments.hpp"
#include "rtp/mp_law.hpp"
#include "rtp/version.hpp"

namespace rtp {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + (dir / name).string());
  return out;
}

void write_json(const fs::path& dir, const std::string& name, const ordered_json& doc) {
  auto out = open_out(dir, name);
  out << doc.dump(2) << "\n";
}

std::uint64_t require_seed(const ExperimentConfig& config) {
  if (!config.seed) {
    throw std::invalid_argument(config.experiment + ": --seed is mandatory");
  }
  return *config.seed;
}

std::int64_t resolve_p(const ExperimentConfig& config, std::uint64_t feature_dim) {
  if (config.p.has_value() == config.gamma.has_value()) {
    throw std::invalid_argument("exactly one of --p and --gamma must be given");
  }
  if (config.p) return *config.p;
  if (!(*config.gamma > 0.0)) throw std::invalid_argument("--gamma must be positive");
  const auto p = static_cast<std::int64_t>(
      std::llround(static_cast<double>(feature_dim) / *config.gamma));
  if (p < 1) throw std::invalid_argument("--gamma resolves to p < 1");
  return p;
}

int single_d(const ExperimentConfig& config) {
  if (config.d_values.size() != 1) {
    throw std::invalid_argument(config.experiment + ": exactly one --d expected");
  }
  return config.d_values.front();
}

ordered_json config_echo(const ExperimentConfig& config) {
  ordered_json echo;
  echo["experiment"] = config.experiment;
  echo["n"] = config.n;
  echo["d"] = config.d_values;
  if (config.p) echo["p"] = *config.p;
  if (config.gamma) echo["gamma"] = *config.gamma;
  echo["dist"] = config.dist;
  if (config.trials) echo["trials"] = *config.trials;
  if (config.seed) echo["seed"] = *config.seed;
  echo["z_im_floor"] = config.z_im_floor;
  echo["grid"] = {config.grid_lo, config.grid_hi, config.grid_steps};
  echo["eta"] = config.eta;
  echo["bins"] = config.bins;
  echo["population"] = config.population;
  echo["format"] = config.format == OutputFormat::Csv ? "csv" : "json";
  return echo;
}

struct EsdTrial {
  double ks = 0.0;
  std::vector<double> moments;  // spectral moments 1..4
};

}  // namespace

std::uint64_t resolve_max_entries(const ExperimentConfig& config) {
  if (config.max_entries > 0) return config.max_entries;
  if (const char* env = std::getenv("RTP_MAX_ENTRIES")) {
    const auto parsed = std::strtoull(env, nullptr, 10);
    if (parsed > 0) return parsed;
  }
  return kDefaultMaxEntries;
}

int run_esd(const ExperimentConfig& config) {
  const int trials = config.trials.value_or(5);
  if (trials < 1) throw std::invalid_argument("esd: trials must be >= 1");
  const std::uint64_t seed = require_seed(config);
  const int d = single_d(config);
  const MomentModel model = MomentModel::parse(config.dist);
  const std::uint64_t feature_dim = binomial(config.n, d);
  const ModelParams params = ModelParams::create(config.n, d, resolve_p(config, feature_dim));
  const std::uint64_t cap = resolve_max_entries(config);
  const SeededRng master(seed);
  const fs::path dir(config.out);

  auto eig_csv = open_out(dir, "eigenvalues.csv");
  eig_csv << "trial,index,eigenvalue\n";

  std::vector<double> pooled;
  std::vector<EsdTrial> results;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXd z = sample_matrix(params, model, master.substream(t), cap);
    const EmpiricalSpectrum spectrum = EmpiricalSpectrum::of_covariance(covariance(z, params.p));
    for (Eigen::Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
      eig_csv << t << "," << i << "," << fmt(spectrum.eigenvalues[i]) << "\n";
      pooled.push_back(spectrum.eigenvalues[i]);
    }
    EsdTrial row;
    row.ks = ks_distance(spectrum, [&](double x) { return mp_cdf(params.aspect, x); });
    for (int k = 1; k <= 4; ++k) row.moments.push_back(spectral_moment(spectrum, k));
    results.push_back(std::move(row));
  }

  Eigen::VectorXd pooled_vec = Eigen::Map<Eigen::VectorXd>(pooled.data(), pooled.size());
  const EmpiricalSpectrum pooled_spectrum = EmpiricalSpectrum::from_eigenvalues(pooled_vec);
  const Histogram hist = histogram(pooled_spectrum, config.bins);

  auto hist_csv = open_out(dir, "histogram.csv");
  hist_csv << "bin_left,bin_right,count,density\n";
  for (int b = 0; b < config.bins; ++b) {
    hist_csv << fmt(hist.edges[b]) << "," << fmt(hist.edges[b + 1]) << "," << hist.counts[b]
             << "," << fmt(hist.densities[b]) << "\n";
  }

  auto mp_csv = open_out(dir, "mp_reference.csv");
  mp_csv << "bin_left,bin_right,density\n";
  for (int b = 0; b < config.bins; ++b) {
    const double mass = mp_cdf(params.aspect, hist.edges[b + 1]) -
                        (b == 0 ? mp_cdf(params.aspect, hist.edges[0] - 1e-12)
                                : mp_cdf(params.aspect, hist.edges[b]));
    const double width = hist.edges[b + 1] - hist.edges[b];
    mp_csv << fmt(hist.edges[b]) << "," << fmt(hist.edges[b + 1]) << "," << fmt(mass / width)
           << "\n";
  }

  ordered_json summary;
  summary["version"] = kVersion;
  summary["config"] = config_echo(config);
  summary["gamma_n"] = params.aspect;
  summary["seed"] = seed;
  summary["trials"] = ordered_json::array();
  for (std::size_t t = 0; t < results.size(); ++t) {
    ordered_json row;
    row["trial"] = t;
    row["ks_to_mp"] = results[t].ks;
    row["spectral_moments"] = results[t].moments;
    summary["trials"].push_back(row);
  }
  write_json(dir, "summary.json", summary);
  return kExitOk;
}

int run_threshold_scan(const ExperimentConfig& config) {
  if (config.d_values.empty()) throw std::invalid_argument("threshold-scan: --d list is empty");
  const int trials = config.trials.value_or(5);
  if (trials < 1) throw std::invalid_argument("threshold-scan: trials must be >= 1");
  const std::uint64_t seed = require_seed(config);
  const MomentModel model = MomentModel::parse(config.dist);
  const double fourth = model.fourth_moment();
  const std::uint64_t cap = resolve_max_entries(config);
  const SeededRng master(seed);

  auto csv = open_out(fs::path(config.out), "threshold_scan.csv");
  csv << "n,d,d_over_sqrt_n,mean_ks,std_ks,exact_norm_variance_ratio\n";

  for (std::size_t di = 0; di < config.d_values.size(); ++di) {
    const int d = config.d_values[di];
    if (d < 1 || d > config.n) throw std::invalid_argument("threshold-scan: d out of range");
    const std::uint64_t feature_dim = binomial(config.n, d);
    const ModelParams params =
        ModelParams::create(config.n, d, resolve_p(config, feature_dim));
    if (feature_dim < 2) {
      std::cerr << "threshold-scan: degenerate N=" << feature_dim << " at d=" << d
                << " (single-coordinate model)\n";
    }
    std::vector<double> ks_values;
    for (int t = 0; t < trials; ++t) {
      const SeededRng stream = master.substream(di * 1000 + static_cast<std::uint64_t>(t));
      const Eigen::MatrixXd z = sample_matrix(params, model, stream, cap);
      const EmpiricalSpectrum spectrum =
          EmpiricalSpectrum::of_covariance(covariance(z, params.p));
      ks_values.push_back(
          ks_distance(spectrum, [&](double x) { return mp_cdf(params.aspect, x); }));
    }
    double mean = 0.0;
    for (double v : ks_values) mean += v;
    mean /= ks_values.size();
    double var = 0.0;
    for (double v : ks_values) var += (v - mean) * (v - mean);
    const double std_ks = ks_values.size() > 1 ? std::sqrt(var / (ks_values.size() - 1)) : 0.0;

    csv << config.n << "," << d << "," << fmt(d / std::sqrt(config.n)) << "," << fmt(mean)
        << "," << fmt(std_ks) << "," << fmt(exact_norm_variance_ratio(config.n, d, fourth))
        << "\n";
  }
  return kExitOk;
}

int run_variance_check(const ExperimentConfig& config) {
  const std::uint64_t seed = require_seed(config);
  const SeededRng master(seed);
  const int mc_trials = std::max(config.trials.value_or(20000), 1000);

  struct Row {
    int n, d;
    double b;
    std::string dist;
    bool run_mc;
  };
  // Fixed sweep grid; the Rademacher row pins the B = 1 degenerate case and
  // the (128, 16, 9) row exercises the large-d regime.
  std::vector<Row> rows;
  for (int n : {8, 16, 32, 64, 128}) {
    for (int d : {1, 2, 3, 4}) {
      if (d > n / 2) continue;
      for (double b : {1.0, 2.0, 3.0, 9.0}) {
        const bool mc = n <= 16 && b <= 3.0;
        rows.push_back({n, d, b, b == 1.0 ? "rademacher" : "threepoint", mc});
      }
    }
  }
  rows.push_back({128, 16, 9.0, "threepoint", false});
  rows.push_back({128, 16, 3.0, "threepoint", false});

  auto csv = open_out(fs::path(config.out), "variance_check.csv");
  csv << "n,d,fourth_moment,dist,exact,exact_ratio,upper_bound,upper_applicable,"
         "lower_bound,lower_applicable,large_d_ratio,large_d_log_n_sq,large_d_applicable,"
         "mc_estimate,mc_std_error\n";

  int violations = 0;
  std::uint64_t row_index = 0;
  for (const Row& row : rows) {
    VarianceReport report;
    try {
      report = variance_report(row.n, row.d, row.b);
    } catch (const std::logic_error& err) {
      std::cerr << "variance-check: " << err.what() << "\n";
      ++violations;
      continue;
    }
    std::string mc_estimate, mc_std_error;
    if (row.run_mc) {
      const MomentModel model =
          row.b == 1.0 ? MomentModel::rademacher() : MomentModel::three_point(row.b);
      const ModelParams params = ModelParams::create(row.n, row.d, 1);
      const MonteCarloEstimate mc =
          mc_norm_variance(params, model, mc_trials, master.substream(row_index));
      mc_estimate = fmt(mc.estimate);
      mc_std_error = fmt(mc.std_error);
      if (std::abs(mc.estimate - report.exact) > 4.0 * std::max(mc.std_error, 1e-12) &&
          report.exact != 0.0) {
        std::cerr << "variance-check: MC estimate " << mc.estimate << " far from exact "
                  << report.exact << " at n=" << row.n << " d=" << row.d << "\n";
        ++violations;
      }
    }
    csv << row.n << "," << row.d << "," << fmt(row.b) << "," << row.dist << ","
        << fmt(report.exact) << "," << fmt(report.exact_ratio) << "," << fmt(report.upper.value)
        << "," << (report.upper.applicable ? 1 : 0) << "," << fmt(report.lower.value) << ","
        << (report.lower.applicable ? 1 : 0) << "," << fmt(report.lower_large_d.ratio_to_n_sq)
        << "," << fmt(report.lower_large_d.log_n_sq) << ","
        << (report.lower_large_d.applicable ? 1 : 0) << "," << mc_estimate << ","
        << mc_std_error << "\n";
    ++row_index;
  }
  return violations == 0 ? kExitOk : kExitBoundViolation;
}

int run_moments_check(const ExperimentConfig& config) {
  auto csv = open_out(fs::path(config.out), "moments_check.csv");
  csv << "m,n,d_list,dist,moment_constant,c_moment,bound,applicable\n";

  const MomentModel models[] = {MomentModel::rademacher(), MomentModel::gaussian()};
  int violations = 0;
  for (const MomentModel& model : models) {
    const double constant = model.moment_constant();
    // Small-n rows enumerate everything; the large-n rows are the ones where
    // the bound precondition s <= sqrt(n)/(3Ce) actually holds.
    std::vector<std::pair<int, std::vector<int>>> grid;
    for (int n = 3; n <= 8; ++n) {
      for (int d1 = 1; d1 <= std::min(3, n); ++d1) {
        grid.push_back({n, {d1}});
        for (int d2 = d1; d2 <= std::min(3, n); ++d2) grid.push_back({n, {d1, d2}});
      }
    }
    for (int n : {100, 400}) {
      grid.push_back({n, {1}});
      grid.push_back({n, {2}});
      grid.push_back({n, {1, 1}});
      if (n <= 100) grid.push_back({n, {1, 2}});
    }
    for (const auto& [n, d_list] : grid) {
        const int m = static_cast<int>(d_list.size());
        const double value = c_moment(m, n, d_list, model);
        const BoundValue bound = c_moment_bound(m, n, d_list, constant);
        if (bound.applicable && value > bound.value * (1.0 + 1e-12)) {
          std::cerr << "moments-check: c_moment " << value << " exceeds bound " << bound.value
                    << " at n=" << n << "\n";
          ++violations;
        }
        std::ostringstream joined;
        for (std::size_t i = 0; i < d_list.size(); ++i) {
          if (i) joined << ";";
          joined << d_list[i];
        }
        csv << m << "," << n << "," << joined.str() << "," << model.name() << ","
            << fmt(constant) << "," << fmt(value) << "," << fmt(bound.value) << ","
            << (bound.applicable ? 1 : 0) << "\n";
    }
  }
  return violations == 0 ? kExitOk : kExitBoundViolation;
}

int run_identity_suite(const ExperimentConfig& config) {
  const std::uint64_t seed = require_seed(config);
  if (!(config.z_im_floor > 0.0)) {
    throw std::domain_error("identity-suite: --z-im-floor must be positive");
  }
  IdentitySuiteOptions opts;
  opts.seed = seed;
  opts.instances = config.trials.value_or(200);
  opts.z_im_lo = config.z_im_floor;
  opts.z_im_hi = std::max(config.z_im_floor + 4.0, 5.0);
  const std::vector<IdentityReport> reports = run_identity_checks(opts);

  constexpr double kThreshold = 1e-8;
  ordered_json doc;
  doc["version"] = kVersion;
  doc["config"] = config_echo(config);
  doc["threshold"] = kThreshold;
  doc["reports"] = ordered_json::array();
  std::string offender;
  for (const IdentityReport& report : reports) {
    ordered_json row;
    row["name"] = report.name;
    row["residual"] = report.residual;
    row["digest"] = report.instance_digest;
    row["skipped"] = report.skipped;
    if (report.bound) {
      row["bound"] = {{"lhs", report.bound->lhs},
                      {"rhs", report.bound->rhs},
                      {"holds", report.bound->holds}};
    }
    doc["reports"].push_back(row);
    if (report.skipped) continue;
    if (report.residual > kThreshold || (report.bound && !report.bound->holds)) {
      offender = report.instance_digest;
    }
  }
  write_json(fs::path(config.out), "identity_suite.json", doc);
  if (!offender.empty()) {
    std::cerr << "identity-suite: threshold breach at " << offender << "\n";
    return kExitBoundViolation;
  }
  return kExitOk;
}

int run_fixpoint(const ExperimentConfig& config) {
  if (config.grid_steps < 2) throw std::invalid_argument("fixpoint: grid needs >= 2 steps");
  if (!(config.eta >= 1e-4)) {
    throw std::invalid_argument("fixpoint: eta below the 1e-4 floor");
  }
  if (!config.gamma) throw std::invalid_argument("fixpoint: --gamma is required");
  const double gamma = *config.gamma;
  const bool isotropic = config.population.empty();
  DiscreteMeasure h = isotropic
                          ? DiscreteMeasure::point_mass(1.0)
                          : esd_of_population(Eigen::Map<const Eigen::VectorXd>(
                                config.population.data(), config.population.size()));

  Eigen::VectorXd grid(config.grid_steps);
  const double step = (config.grid_hi - config.grid_lo) / (config.grid_steps - 1);
  for (int i = 0; i < config.grid_steps; ++i) grid[i] = config.grid_lo + i * step;

  FixpointOptions opts;
  opts.im_floor = std::min(config.eta, 0.5);

  auto csv = open_out(fs::path(config.out), "fixpoint.csv");
  csv << "x,re_m,im_m,density,iterations,residual,converged";
  if (isotropic) csv << ",mp_density,delta";
  csv << "\n";

  int failures = 0;
  std::optional<Complex> warm;
  for (int i = 0; i < config.grid_steps; ++i) {
    const Complex z(grid[i], config.eta);
    bool converged = true;
    FixpointResult result;
    try {
      result = solve_ie(h, gamma, z, opts, warm);
      warm = result.m;
    } catch (const NonConvergenceError& err) {
      converged = false;
      ++failures;
      result.m = Complex(0.0, 0.0);
      result.iterations = -1;
      result.residual = err.residual();
      warm.reset();
    }
    const double density = converged ? std::max(0.0, -result.m.imag() / M_PI) : 0.0;
    csv << fmt(grid[i]) << "," << fmt(result.m.real()) << "," << fmt(result.m.imag()) << ","
        << fmt(density) << "," << result.iterations << "," << fmt(result.residual) << ","
        << (converged ? 1 : 0);
    if (isotropic) {
      const double reference = mp_density(gamma, grid[i]);
      csv << "," << fmt(reference) << "," << fmt(density - reference);
    }
    csv << "\n";
  }
  if (failures * 100 > config.grid_steps) {
    std::cerr << "fixpoint: " << failures << " of " << config.grid_steps
              << " grid points failed to converge\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

int run_experiment(const ExperimentConfig& config) {
  if (config.experiment == "esd") return run_esd(config);
  if (config.experiment == "threshold-scan") return run_threshold_scan(config);
  if (config.experiment == "variance-check") return run_variance_check(config);
  if (config.experiment == "moments-check") return run_moments_check(config);
  if (config.experiment == "identity-suite") return run_identity_suite(config);
  if (config.experiment == "fixpoint") return run_fixpoint(config);
  throw std::invalid_argument("unknown experiment '" + config.experiment + "'");
}

}  // namespace rtp
