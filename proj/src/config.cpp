#include "nullcast/config.hpp"

#include <array>
#include <optional>
#include <utility>

#include <CLI11.hpp>

namespace nullcast {

namespace {

struct ExperimentInfo {
  Experiment id;
  std::string_view name;
  std::string_view text;
};

constexpr std::array<ExperimentInfo, 10> kExperiments{{
    {Experiment::Psd, "psd", "power spectral density of the designed waveform"},
    {Experiment::Zplane, "zplane", "zeros of the waveform polynomial, with and without uncertainty"},
    {Experiment::LossGrid, "loss_grid", "matched-filter loss [dB] over (rho_T, rho_R)"},
    {Experiment::DetectProb, "detect_prob", "waveform-book detection probability versus Gamma_unc"},
    {Experiment::RocRx, "roc_rx", "receiver ROC of effective-subspace identification"},
    {Experiment::PmdVsSnr, "pmd_vs_snr", "receiver miss-detection probability versus Ep/N0"},
    {Experiment::CrocNoncoop, "croc_noncoop", "complementary ROC of noncooperative concurrence"},
    {Experiment::CrocCoop, "croc_coop", "complementary ROC of cooperative concurrence"},
    {Experiment::DofCountTx, "dof_count_tx", "average effective DoF identified at the transmitter"},
    {Experiment::Chordal, "chordal", "normalized chordal distance between tx and rx estimates"},
}};

const ExperimentInfo& info(Experiment e) {
  for (const auto& x : kExperiments) {
    if (x.id == e) return x;
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown experiment id");
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::ConfigInvalid, what);
}

bool is_monte_carlo(Experiment e) {
  return e != Experiment::Psd && e != Experiment::Zplane && e != Experiment::LossGrid;
}

}  // namespace

std::string_view to_string(Experiment e) { return info(e).name; }

std::string_view describe(Experiment e) { return info(e).text; }

Experiment parse_experiment(std::string_view name) {
  for (const auto& x : kExperiments) {
    if (x.name == name) return x.id;
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown experiment '" + std::string(name) + "' (see --list)");
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& x : kExperiments) v.push_back(x.id);
    return v;
  }();
  return all;
}

void validate(const ExperimentConfig& c) {
  require(c.trials >= 1, "trials must be >= 1");
  require(c.n >= 2, "N must be >= 2");
  switch (c.experiment) {
    case Experiment::Psd:
    case Experiment::Zplane:
      require(c.d >= 1 && c.d < c.n, "need 1 <= D < N");
      require(c.eps >= 0 && c.delta >= 0 && c.eps + c.delta <= c.d, "need eps + delta <= D");
      require(c.false_alarms >= 0 && c.false_alarms <= c.n - c.d, "need false_alarms <= N - D");
      require(c.fft_oversample >= 1, "fft_oversample must be >= 1");
      return;
    case Experiment::LossGrid:
      require(c.grid_steps >= 2, "grid_steps must be >= 2");
      require(c.k0 >= 1 && c.k0 <= c.n, "need 1 <= K0 <= N");
      return;
    default:
      break;
  }
  if (!is_monte_carlo(c.experiment)) return;
  require(c.k0 >= 1, "K0 must be >= 1");
  require(c.kappa_t >= 0 && c.kappa_r >= 0, "kappaT and kappaR must be >= 0");
  require(c.k0 + c.kappa_t + c.kappa_r <= c.n, "need K0 + kappaT + kappaR <= N");
  require(c.eps_r >= 0 && c.eps_r <= c.kappa_r, "need 0 <= epsR <= kappaR");
  require(c.inr_bar >= 0.0, "inr_bar must be >= 0");
  require(!c.ep_over_n0_db.empty(), "Ep_over_N0_list is empty");
  require(!c.q_list.empty(), "Q_list is empty");
  for (Index q : c.q_list) require(q >= 1, "every Q must be >= 1");
  if (c.experiment != Experiment::DetectProb) {
    require(!c.p_fa_list.empty(), "P_FA_list is empty");
    for (double p : c.p_fa_list) require(p > 0.0 && p < 1.0, "every P_FA must lie in (0, 1)");
  }
}

Command parse_command_line(int argc, const char* const* argv) {
  Command cmd;
  ExperimentConfig& c = cmd.config;
  std::optional<std::string> experiment;
  std::string basis = std::string(to_string(c.basis_kind));

  CLI::App app{"Opportunistic null-space signaling experiments; writes CSV."};
  app.allow_config_extras(false);
  app.set_config("--config", "", "key = value configuration file");
  app.add_option("experiment", experiment, "experiment name (see --list)");
  app.add_flag("--list", cmd.list, "list experiments and exit");
  app.add_option("--seed", c.seed);
  app.add_option("--trials", c.trials);
  app.add_option("--out,--output_path", c.output_path, "aggregate CSV path");
  app.add_option("--N", c.n);
  app.add_option("--D", c.d);
  app.add_option("--K0", c.k0);
  app.add_option("--kappaT", c.kappa_t);
  app.add_option("--kappaR", c.kappa_r);
  app.add_option("--epsR", c.eps_r);
  app.add_option("--basis_kind", basis, "fourier | canonical | random");
  app.add_option("--Ep_over_N0_list", c.ep_over_n0_db, "dB values")->delimiter(',');
  app.add_option("--Q_list", c.q_list)->delimiter(',');
  app.add_option("--P_FA_list", c.p_fa_list)->delimiter(',');
  app.add_option("--inr_bar", c.inr_bar, "linear INR per interfered DoF");
  app.add_option("--eps", c.eps);
  app.add_option("--delta", c.delta);
  app.add_option("--false_alarms", c.false_alarms);
  app.add_option("--grid_steps", c.grid_steps);
  app.add_option("--fft_oversample", c.fft_oversample);
  app.add_flag("--ideal_receiver", c.ideal_receiver);
  app.add_flag("--raw", c.raw, "also write <out>.raw.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    cmd.help = true;
    cmd.help_text = app.help();
    return cmd;
  } catch (const CLI::FileError& e) {
    throw Error(ErrorCode::IoError, e.what());
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  if (cmd.list) return cmd;
  if (!experiment) throw Error(ErrorCode::ConfigInvalid, "no experiment given");
  c.experiment = parse_experiment(*experiment);
  c.basis_kind = parse_basis_kind(basis);
  validate(c);
  return cmd;
}

}  // namespace nullcast
