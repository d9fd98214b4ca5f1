#ifndef SAP_EXPERIMENT_HPP
#define SAP_EXPERIMENT_HPP

#include <map>
#include <string>

#include "sap/gossip.hpp"
#include "sap/inexact.hpp"
#include "sap/privacy.hpp"

namespace sap {

// Flat key=value configuration with dotted keys ("sketch.tau=5"). Lines
// starting with '#' are comments. CLI flags override file entries.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig parse_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;  // throws when missing
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// Synthetic problem generators mirroring the experimental setup: entries of A
// i.i.d. standard normal and b = A z with z standard normal, so the system is
// consistent by construction.
LinearSystem gaussian_system(int m, int n, std::uint64_t seed);
// A = P^T P with P an m x n Gaussian matrix (positive definite), b = A z,
// geometry B = A.
LinearSystem spd_system(int m, int n, std::uint64_t seed);
// Gaussian rows with exactly g nonzeros each (positions seeded).
LinearSystem sparse_row_system(int m, int n, int g, std::uint64_t seed);

// "gaussian:50x20[:seed]", "spd:40x30[:seed]", "sparse:300x100:10[:seed]" or a
// matrix file path (with optional separate right-hand-side file).
LinearSystem make_system(const std::string& spec, const std::string& rhs_path = "");

// Sketch distribution from config keys sketch.variant / sketch.tau /
// sketch.probabilities ("row-norms", "uniform", or an inline comma list).
SketchDistribution make_sketch(const ExperimentConfig& config, const LinearSystem& system);

SolverConfig make_solver_config(const ExperimentConfig& config, const LinearSystem& system);

struct ExperimentResult {
  Trace trace;          // all trials
  std::string summary;  // one-line human description
};

// Multi-trial orchestration; trials run on independent streams derived from
// (seed, trial) and may execute in parallel (SAP_THREADS). Deterministic
// output regardless of thread count or execution order.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Number of worker threads: SAP_THREADS when set, else 1.
int thread_count_from_env();

// gnuplot script with inline data blocks, one curve per labelled series,
// log-scale y axis.
std::string emit_plot_script(
    const std::vector<std::pair<std::string, std::vector<std::pair<long long, double>>>>& curves,
    const std::string& title);
// Convenience: one curve per metric, mean over trials.
std::string emit_plot_script(const Trace& trace, const std::string& title);

}  // namespace sap

#endif
