#ifndef NULLCAST_HARNESS_HPP
#define NULLCAST_HARNESS_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "nullcast/concurrence.hpp"
#include "nullcast/config.hpp"

namespace nullcast {

inline constexpr double kZ95 = 1.959963984540054;

struct Rate {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  long successes = 0;
  long total = 0;
};

/// Wilson score interval for k successes out of n. EmptyInput if n = 0.
Rate wilson(long k, long n, double z = kZ95);

/// One trial of dimension identification at one (Ep/N0, Q, P_FA) point.
struct RocRecord {
  double ep_n0_db = 0.0;
  Index q = 1;
  double p_fa = 0.0;
  Index trial = 0;
  Index detected = 0;      // effective dims selected
  Index effective = 0;     // effective dims present
  Index false_alarms = 0;  // non-effective dims selected
  Index excess = 0;        // non-effective dims present
};

struct RocPoint {
  double ep_n0_db = 0.0;
  Index q = 1;
  double p_fa = 0.0;  // nominal
  Rate p_d;
  Rate p_md;          // 1 - p_d, interval mirrored
  Rate p_fa_emp;
  Index n_trials = 0;
};

/// Pools records per (Ep/N0, Q, P_FA), ordered by that key. Rates count
/// dimensions, which are independent under white noise. EmptyInput if empty.
std::vector<RocPoint> aggregate_roc(const std::vector<RocRecord>& records);

struct ConcurrenceRecord {
  double ep_n0_db = 0.0;
  Index q = 1;
  double p_fa = 0.0;
  Index trial = 0;
  Index rx_detected = 0;
  Index rx_false = 0;
  Index nc_detected = 0;  // noncooperative, tx side
  Index nc_false = 0;
  Index co_detected = 0;  // cooperative, tx side
  Index co_false = 0;
  double chordal_nc = 0.0;  // normalized, against the rx estimate
  double chordal_co = 0.0;
};

struct DetectRecord {
  double ep_n0_db = 0.0;
  Index q = 1;
  Index eps_r = 0;
  Index trial = 0;
  bool correct = false;
  double gamma_unc_db = 0.0;
};

/// Receiver-side identification over the pairwise geometry of `cfg`.
std::vector<RocRecord> simulate_rx_identification(const ExperimentConfig& cfg);

/// Forward identification, feedback, and both concurrence schemes. Without
/// cfg.ideal_receiver the receiver uses its own detector output, and on the
/// reverse link transmits from the dims it selected.
std::vector<ConcurrenceRecord> simulate_concurrence(const ExperimentConfig& cfg);

/// Waveform-book detection with full frames, sweeping eps_r over 0..cfg.eps_r.
std::vector<DetectRecord> simulate_detection(const ExperimentConfig& cfg);

/// B^H y_bar for the mean of Q frames, drawn directly in the DoF domain: the
/// mean of Q frames with per-dim noise variance v_d is CN(signal_d, v_d / Q).
/// Both detectors only use the frame mean, so this has the same distribution
/// as projecting simulate_received() frames.
CVector simulate_mean_coefficients(const CVector& signal, const RVector& variance, Index q, Rng& rng);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

/// IoError when the file cannot be written.
void write_csv(const CsvTable& table, const std::string& path);

/// Shortest round-trip decimal form.
std::string format_number(double x);

struct ExperimentOutput {
  CsvTable aggregate;  // params..., metric, value, ci_low, ci_high, n_trials
  CsvTable raw;        // params..., trial, metric, value (Monte Carlo experiments only)
};

/// Deterministic per (cfg, seed); trial i draws from Rng(cfg.seed).split(i).
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Worker count: NULLCAST_THREADS if set (>= 1), otherwise the hardware concurrency.
std::size_t worker_count();

/// Runs fn(0..count-1) on worker_count() threads. Results must be written to
/// per-index slots; the first exception (lowest index) is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace nullcast

#endif  // NULLCAST_HARNESS_HPP
