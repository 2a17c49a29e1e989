#ifndef NULLCAST_CONCURRENCE_HPP
#define NULLCAST_CONCURRENCE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "nullcast/identification.hpp"

namespace nullcast {

/// f = [K0_hat, phi_R^T]^T, sent from receiver to transmitter.
struct FeedbackMessage {
  std::uint32_t k0_hat = 0;
  CVector phi_r;

  Index n() const { return phi_r.size(); }
};

/// u32 K0_hat then N interleaved (re, im) f64 pairs, all little-endian.
std::vector<std::uint8_t> serialize(const FeedbackMessage& f);
/// DimensionMismatch on a truncated payload or K0_hat > N.
FeedbackMessage deserialize(std::span<const std::uint8_t> bytes);

/// The receiver's composite filter P beta_hat = sum_{i in lambda} P_i e_alpha.
/// Zero when nothing was selected.
CVector receiver_filter(const SingletonDictionary& dict, const SparseSelection& sel);

FeedbackMessage build_feedback(const SparseSelection& sel, const CVector& phi_r);

struct TxSelection {
  std::vector<bool> pi;
  CVector gamma;           // relaxed coefficients over the tx singletons (empty for noncoop)
  RVector dim_magnitude;   // |b_i^H P_i gamma_i|
  Index iterations = 0;

  Index k0_hat() const;
};

/// The receiver's detector run over the transmitter's own singletons with the
/// reverse-link frames. `reference` is the transmitter's waveform for the
/// column both ends use.
TxSelection noncoop_concur(const CMatrix& reverse_frames, const SubspaceBasisd& tx_basis,
                           const DetectionThreshold& thr, const CVector& reference);

/// Euclidean projection onto {z : ||z||_1 <= radius}; phases are kept and the
/// magnitudes go through the sort-based simplex projection.
CVector project_l1_ball(const CVector& z, double radius);

/// Projected gradient on ||P_T gamma - phi_R||^2 s.t. ||gamma||_1 <= K0_hat.
/// pi marks the K0_hat largest dimension magnitudes (ties to the lower index),
/// counting only dims whose magnitude is above 1e-9 of the largest.
/// step <= 0 selects 1 / ||P_T||^2. NonConvergence if the relative objective
/// change is still > 1e-8 after iters.
TxSelection coop_concur(const FeedbackMessage& f, const SingletonDictionary& tx, Index iters = 2000,
                        double step = 0.0);

struct RipResult {
  bool lower_ok = false;
  double ratio = 0.0;  // ||P gamma|| / ||gamma||
};

/// gamma = pi (x) e_alpha. lower_ok when ratio^2 >= 1 - eps. ZeroVector if
/// pi is empty of selections.
RipResult rip_check(const SingletonDictionary& dict, const std::vector<bool>& pi, Index alpha, double eps = 0.5);
/// Same for an arbitrary gamma.
RipResult rip_check(const SingletonDictionary& dict, const CVector& gamma, double eps = 0.5);

/// Chordal distance between the projectors built from the selected tx and rx
/// singletons. With `normalize` it is divided by max(K0_hat_T, K0_hat_R)
/// (0 when both are empty).
double consensus_distance(const std::vector<bool>& sel_t, const SubspaceBasisd& tx_basis,
                          const std::vector<bool>& sel_r, const SubspaceBasisd& rx_basis, bool normalize = true);

/// |B_T^H B_R|^2 entrywise, for repeated consensus_distance calls on one geometry.
RMatrix overlap_gram(const SubspaceBasisd& tx_basis, const SubspaceBasisd& rx_basis);

/// consensus_distance through 1/2 (k_T + k_R) - sum_{i in T, j in R} |b_i^H c_j|^2.
double consensus_distance(const std::vector<bool>& sel_t, const std::vector<bool>& sel_r, const RMatrix& overlap,
                          bool normalize = true);

}  // namespace nullcast

#endif  // NULLCAST_CONCURRENCE_HPP
