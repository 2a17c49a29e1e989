#ifndef NULLCAST_END_TO_END_HPP
#define NULLCAST_END_TO_END_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "nullcast/scenario.hpp"
#include "nullcast/signaling.hpp"

namespace nullcast {

/// Transmitter/receiver noise subspaces sharing an effective part N0:
///   tx noise = [shared | delta_t], rx noise = [shared | delta_r].
/// The first eps_r columns of delta_r are the interfered excess dims.
struct MismatchGeometry {
  Index n = 0;
  Index k0 = 0;
  Index kappa_t = 0;
  Index kappa_r = 0;
  Index eps_r = 0;
  BasisKind kind = BasisKind::Fourier;
  SubspaceBasisd shared;
  SubspaceBasisd delta_t;
  SubspaceBasisd delta_r;
  // Column numbers within basis_family().
  std::vector<std::size_t> shared_indices;
  std::vector<std::size_t> delta_t_indices;
  std::vector<std::size_t> delta_r_indices;

  double rho_t() const { return static_cast<double>(kappa_t) / static_cast<double>(k0); }
  double rho_r() const { return static_cast<double>(kappa_r) / static_cast<double>(k0); }
  Index k_hat_t() const { return k0 + kappa_t; }
  Index k_hat_r() const { return k0 + kappa_r; }
  SubspaceBasisd tx_noise() const { return concatenate(shared, delta_t); }
  SubspaceBasisd rx_noise() const { return concatenate(shared, delta_r); }

  /// Roles swapped, for the reverse (TDD) link. The new receiver has
  /// `eps_r_reverse` interfered excess dims at the front of its delta.
  MismatchGeometry reversed(Index eps_r_reverse = 0) const;
};

/// Infeasible unless K0 >= 1, K0 + kappa_t + kappa_r <= N and eps_r <= kappa_r.
MismatchGeometry build_pairwise(Index n, Index k0, Index kappa_t, Index kappa_r, Index eps_r,
                                BasisKind kind, std::uint64_t seed);

/// Closed-form matched-filter gain (1 + rho_t + rho_r + rho_t rho_r)^{-1/2}.
double mismatch_loss(double rho_t, double rho_r);

/// Re(phi_R^H phi_T) for waveforms designed at the same column n at both ends.
/// n defaults to the transmitter's select_column winner. ColumnUndefined when
/// either projector has a ~0 diagonal at n.
double matched_filter_gain(const MismatchGeometry& geom, std::optional<Index> column = std::nullopt);

struct ChannelParams {
  double gain = 1.0;          // G, amplitude
  double tx_power = 1.0;      // S_T
  double noise_density = 1.0; // N0 per DoF
  double inr_bar = 0.0;       // average INR per interfered DoF, linear
  double ep_over_n0_db = 0.0; // pulse energy to noise ratio

  double pulse_energy() const;  // Ep = N0 10^{Ep/N0 / 10}
};

struct SnrBreakdown {
  double snr = 0.0;
  double gamma_no_unc = 0.0;   // G^2 S_T / (K0 N0)
  double gamma_unc_inv = 1.0;  // SNR penalty factor, <= 1
  double gamma_unc() const { return 1.0 / gamma_unc_inv; }
};

SnrBreakdown snr_with_uncertainty(const ChannelParams& p, const MismatchGeometry& geom);
SnrBreakdown snr_with_uncertainty(const ChannelParams& p, Index k0, double rho_t, double rho_r, Index eps_r);

enum class DofLabel { Effective, InterferedExcess, CleanExcess };

/// Q received frames y_q = G sqrt(Ep) phi_tx + w_q + i_q (N x Q), with
/// w ~ CN(0, N0 I) and i confined to the interfered excess dims.
struct ReceivedBlock {
  CMatrix frames;
  std::vector<DofLabel> labels;  // one per rx noise column, in rx_noise() order

  Index q() const { return frames.cols(); }
  /// Per-dimension samples B^H y_q (dims x Q).
  CMatrix dof_samples(const SubspaceBasisd& basis) const { return basis.columns().adjoint() * frames; }
};

ReceivedBlock simulate_received(const MismatchGeometry& geom, const ChannelParams& p, Index q,
                                const Waveform& tx, std::uint64_t seed);

/// Empirical SNR inside span(basis): coherent signal energy over the
/// noise-plus-interference energy, both estimated from the block.
struct SnrMeasurement {
  double signal_energy = 0.0;
  double noise_energy = 0.0;
  double snr() const { return signal_energy / noise_energy; }
};
SnrMeasurement measure_snr(const ReceivedBlock& block, const SubspaceBasisd& basis);

inline constexpr double kDefaultLoading = 1e-3;

/// argmax over book entries of p^H R^{-1} p with p = R phi_iota, R the sample
/// covariance, loaded by reg * trace / N inside the inverse. Absent entries are
/// skipped. SingularCovariance when reg = 0 and R is rank deficient.
Index detect_waveform(const CMatrix& frames, const WaveformBook& book, double reg = kDefaultLoading);

}  // namespace nullcast

#endif  // NULLCAST_END_TO_END_HPP
