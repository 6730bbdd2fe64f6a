#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tsboost/pspline.hpp"

namespace tsboost::cli {

inline constexpr const char* kVersion = "1.0.0";

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

struct SplineOptions {
  int degree = 3;
  int penalty_order = 2;
  std::optional<int> interior_knots;
  std::string criterion = "vcurve";

  pspline::SmootherSettings settings() const;
};

struct SimulateOptions {
  std::filesystem::path out = ".";
  std::uint64_t seed = 1;
  std::vector<std::size_t> sizes{90, 50, 100, 25, 60, 35};
  std::size_t points = 10;
  double sigma2_e = 0.08;
  double sigma2_v = 0.85;
  double sigma2_u = 0.3;
  double ar_phi = 0.5;
  double ar_variance = 0.002;
};

struct ClusterOptions {
  std::filesystem::path input;
  std::string format = "wide";
  std::filesystem::path out = ".";
  std::string algorithm = "boost";
  std::size_t clusters = 2;
  std::string distance = "euclidean";
  std::size_t iterations = 100;
  std::size_t restarts = 10;
  std::uint64_t seed = 1;
  std::optional<std::size_t> sample_size;
  SplineOptions spline;
  double fuzzifier = 2.0;
  double epsilon = 1e-6;
  std::size_t max_sweeps = 500;
};

struct EvaluateOptions {
  std::filesystem::path membership;
  std::optional<std::filesystem::path> reference_membership;
  std::optional<std::filesystem::path> reference_labels;
  std::optional<std::filesystem::path> input;
  std::string format = "wide";
  std::string distance = "euclidean";
  SplineOptions spline;
  std::optional<std::filesystem::path> out;  // report.json
};

struct SmoothOptions {
  std::filesystem::path input;
  std::string format = "wide";
  std::optional<std::string> series_id;  // first series when empty
  SplineOptions spline;
  std::filesystem::path out = ".";
};

// Each command writes its files and throws tsboost::Error on failure.
void cmd_simulate(const SimulateOptions& options);
void cmd_cluster(const ClusterOptions& options);
// Returns the printed report.
std::string cmd_evaluate(const EvaluateOptions& options);
void cmd_smooth(const SmoothOptions& options);

// Threads for parallel restarts from TSBOOST_THREADS (0 or unset = auto).
std::size_t threads_from_environment();

int exit_code_for(ErrorCode code);

// Parses argv, dispatches, and maps errors to exit codes.
int run(int argc, char** argv);

}  // namespace tsboost::cli
