#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace membrane::expcli {

inline constexpr const char* kSchemaVersion = "membrane-lab/v1";
inline constexpr const char* kToolVersion = "membrane-lab 1.0";

// Flat experiment configuration. Serializes to `key = value` lines; parsing
// rejects unknown keys and out-of-range values, and the round trip is
// lossless.
struct ExperimentConfig {
  std::string experiment;  // variance-profile | max-scan | positivity |
                           // repulsion | green-report
  int d = 4;
  std::vector<int> n_list = {2, 3, 4};
  double delta = 0.25;        // interior margin, in (0, 1/2)
  double alpha = 0.6;         // hierarchy exponent, in (1/2, 1)
  int k_levels = 2;           // hierarchy scales
  double epsilon = 0.25;      // averaging-window fraction, in (0, 1/2)
  double eta = 0.5;           // repulsion margin parameter
  double tilt_a = 3.0;        // importance-sampling amplitude
  std::int64_t replicas = 10'000;
  std::uint64_t seed = 1;
  int obstacle_halfwidth = 1;  // centered block; -1 means empty obstacle
  std::string method = "auto";  // auto | exact | normal
  std::int64_t direct_threshold = 20'000;
  double cg_tol = 1e-10;
  double sample_cg_tol = 1e-6;
  int max_diag_scan = 6;       // full-diagonal check bound for variance profile
  int fundamental_kmax = 1152; // truncation for the fundamental-solution fit
  std::string out_dir = "out";
  std::string cache_dir;
  int threads = 2;
  std::string format = "csv";  // csv | json

  // Canonical serialization: every key, sorted, lossless doubles.
  std::string to_string() const;
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  void validate() const;
};

}  // namespace membrane::expcli
