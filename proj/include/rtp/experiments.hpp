#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rtp {

enum class OutputFormat { Csv, Json };

// Batch-experiment configuration shared by every subcommand; unused fields
// are ignored by experiments that do not need them.
struct ExperimentConfig {
  std::string experiment;  // esd | threshold-scan | variance-check | moments-check |
                           // identity-suite | fixpoint
  int n = 0;
  std::vector<int> d_values;           // repeatable; single-d experiments use the first
  std::optional<std::int64_t> p;       // exactly one of p / gamma
  std::optional<double> gamma;         // gamma resolves p = round(N / gamma)
  std::string dist = "rademacher";     // rademacher | gaussian | threepoint:B
  std::optional<int> trials;           // per-experiment defaults when unset
  std::optional<std::uint64_t> seed;   // mandatory for sampling experiments
  double z_im_floor = 1.0;
  double grid_lo = 0.1;
  double grid_hi = 3.9;
  int grid_steps = 39;
  double eta = 1e-3;
  int bins = 30;
  std::vector<double> population;      // diagonal population eigenvalues, empty = isotropic
  std::string out = "out";
  OutputFormat format = OutputFormat::Csv;
  std::uint64_t max_entries = 0;       // 0 = library default / RTP_MAX_ENTRIES
};

// Exit codes shared by the experiment runners and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitBoundViolation = 2;
inline constexpr int kExitNonConvergence = 3;

// Each runner writes its files under config.out and returns an exit code.
// Configuration errors throw std::invalid_argument (mapped to exit 1 by the
// CLI); mathematical bound violations return 2; solver failure quotas 3.
int run_esd(const ExperimentConfig& config);
int run_threshold_scan(const ExperimentConfig& config);
int run_variance_check(const ExperimentConfig& config);
int run_moments_check(const ExperimentConfig& config);
int run_identity_suite(const ExperimentConfig& config);
int run_fixpoint(const ExperimentConfig& config);

// Dispatch by config.experiment.
int run_experiment(const ExperimentConfig& config);

// Effective N*p cap: config override, else RTP_MAX_ENTRIES, else default.
std::uint64_t resolve_max_entries(const ExperimentConfig& config);

}  // namespace rtp
