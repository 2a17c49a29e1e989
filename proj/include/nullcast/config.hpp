#ifndef NULLCAST_CONFIG_HPP
#define NULLCAST_CONFIG_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nullcast/scenario.hpp"

namespace nullcast {

enum class Experiment {
  Psd,
  Zplane,
  LossGrid,
  DetectProb,
  RocRx,
  PmdVsSnr,
  CrocNoncoop,
  CrocCoop,
  DofCountTx,
  Chordal,
};

std::string_view to_string(Experiment e);
/// ConfigInvalid for unknown names.
Experiment parse_experiment(std::string_view name);
const std::vector<Experiment>& all_experiments();
std::string_view describe(Experiment e);

/// Flat key-value configuration. Key names in config files are the field
/// names given in the comments.
struct ExperimentConfig {
  Experiment experiment = Experiment::RocRx;
  Index n = 64;                 // N
  Index d = 24;                 // D, occupied dims (psd, zplane)
  Index k0 = 40;                // K0
  Index kappa_t = 12;           // kappaT
  Index kappa_r = 12;           // kappaR
  Index eps_r = 0;              // epsR
  BasisKind basis_kind = BasisKind::Fourier;
  std::vector<double> ep_over_n0_db{0.0, 10.0, 20.0};  // Ep_over_N0_list
  std::vector<Index> q_list{1, 10, 100};               // Q_list
  std::vector<double> p_fa_list{1e-3, 1e-2, 1e-1};     // P_FA_list
  double inr_bar = 0.0;         // inr_bar, linear
  Index trials = 1000;
  std::uint64_t seed = 1;
  std::string output_path = "out.csv";

  // Sensing uncertainty for psd / zplane: eps, delta, false_alarms.
  Index eps = 0;
  Index delta = 0;
  Index false_alarms = 0;
  Index grid_steps = 11;        // loss_grid points per axis over [0, 1]
  Index fft_oversample = 8;     // psd zero padding factor
  bool ideal_receiver = false;  // receiver knows N0 exactly (concurrence experiments)
  bool raw = false;             // also write per-trial rows to <out>.raw.csv
};

/// ConfigInvalid on infeasible dimensions, empty lists, trials < 1 or P_FA outside (0, 1).
void validate(const ExperimentConfig& cfg);

struct Command {
  ExperimentConfig config;
  bool list = false;
  bool help = false;
  std::string help_text;
};

/// `nullcast <experiment> --config <path> [--seed S] [--trials T] [--out path.csv]`.
/// Config file values are overridden by flags. ConfigInvalid on bad input,
/// IoError when the config file cannot be read. The result is validated
/// unless --list or --help was given.
Command parse_command_line(int argc, const char* const* argv);

}  // namespace nullcast

#endif  // NULLCAST_CONFIG_HPP
