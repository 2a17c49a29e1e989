#ifndef NULLCAST_IDENTIFICATION_HPP
#define NULLCAST_IDENTIFICATION_HPP

#include <optional>
#include <vector>

#include "nullcast/end_to_end.hpp"

namespace nullcast {

/// Inverse Gaussian tail: x with P(Z > x) = p. BadProbability unless 0 < p < 1.
double qtail_inverse(double p);

struct DetectionThreshold {
  double gamma = 0.0;
  double sigma2 = 0.0;  // variance of one real-valued per-frame statistic
  Index q = 1;
  double p_fa = 0.5;
};

/// gamma = sqrt(sigma2 / Q) Qtail^{-1}(P_FA).
DetectionThreshold np_threshold(double sigma2, Index q, double p_fa);

/// Per-frame noise variance of the coherent statistic for CN(0, N0) noise.
inline double statistic_variance(double noise_density) { return noise_density / 2.0; }

/// The rank-one projectors P_i = b_i b_i^H of one node's sensed noise basis,
/// concatenated as P = [P_1 ... P_K] (N x K N). beta is indexed i * N + j.
class SingletonDictionary {
 public:
  explicit SingletonDictionary(SubspaceBasisd basis);

  Index ambient_dim() const { return basis_.ambient_dim(); }
  Index count() const { return basis_.dim(); }
  const SubspaceBasisd& basis() const { return basis_; }

  CVector apply(const CVector& beta) const;       // P beta
  CVector adjoint(const CVector& r) const;        // P^H r
  CMatrix dense() const;                          // the N x K N matrix itself
  /// b_i^H (P_i beta_i): the coefficient of beta on dimension i.
  CVector dim_coefficients(const CVector& beta) const;
  /// Projector onto the span of the selected dimensions.
  OrthoProjectord selected_projector(const std::vector<bool>& selected) const;

 private:
  SubspaceBasisd basis_;
};

/// beta = lambda (x) alpha over K dims and N projector columns.
struct SparseSelection {
  std::vector<bool> lambda;
  std::optional<Index> alpha;
  Index n = 0;

  Index k0_hat() const;
  std::vector<std::size_t> beta_support() const;
};

inline Index estimated_dim(const SparseSelection& sel) { return sel.k0_hat(); }

/// t_d = (1/Q) sum_q Re{ s_{d,q} e^{-j theta_d} } for dims x Q samples s, with
/// theta_d = arg(b_d^H reference). The reference is the node's own waveform
/// for the column both ends selected, so it is independent of the noise and
/// the statistic is N(0, sigma2 / Q) on dims without signal. Dims where the
/// reference has no component use theta = 0.
RVector dimension_statistics(const CMatrix& dof_samples, const SubspaceBasisd& basis, const CVector& reference);
/// The same from the per-dim sample means and the reference's coefficients B^H reference.
RVector coherent_statistics(const CVector& mean_coeffs, const CVector& reference_coeffs);

/// Thresholds precomputed statistics; alpha is chosen from the averaged frame.
SparseSelection select_dimensions(const RVector& stats, const DetectionThreshold& thr);

/// Full detector over raw N x Q frames. BlockLengthMismatch unless the frame
/// count equals thr.q. alpha maximizes |(P~ e_i)^H y_bar|^2 / ||P~ e_i||^2.
SparseSelection identify_dimensions(const CMatrix& frames, const SubspaceBasisd& basis,
                                    const DetectionThreshold& thr, const CVector& reference);

/// argmax_i |(P~ e_i)^H v|^2 / ||P~ e_i||^2 over columns with ||P~ e_i|| > 0.
std::optional<Index> best_column(const SingletonDictionary& dict, const std::vector<bool>& lambda, const CVector& v);
/// Same, given u = B^H v.
std::optional<Index> best_column_from_coefficients(const SubspaceBasisd& basis, const std::vector<bool>& lambda,
                                                   const CVector& u);

struct PursuitResult {
  CVector beta;                 // relaxed solution, length K N
  RVector dim_magnitude;        // |b_i^H P_i beta_i| per dimension
  SparseSelection selection;    // dims at or above half the largest magnitude
  std::vector<std::size_t> beta_support;  // entries at or above half the largest |beta|
  double mu = 0.0;
  Index iterations = 0;
  std::vector<double> objective;  // per iteration
};

/// ISTA on 1/2 sum_q ||y_q - P beta||^2 + mu ||beta||_1. mu is the largest
/// value whose solution meets sum_q ||y_q - P beta||^2 <= eps^2 (found by
/// bisection on the exact per-dimension shrinkage curve); if eps is below the
/// achievable floor a tiny mu is used. step <= 0 selects 0.9 / L.
/// NonConvergence if the relative objective change is still > 1e-8 after iters.
PursuitResult basis_pursuit(const CMatrix& frames, const SingletonDictionary& dict, double eps,
                            Index iters = 5000, double step = 0.0);

/// Soft-threshold shrinkage, z max(0, 1 - tau/|z|).
inline Complex soft_threshold(Complex z, double tau) {
  const double a = std::abs(z);
  return a > tau ? z * (1.0 - tau / a) : Complex(0.0, 0.0);
}

/// SNR penalty once the receiver detects only on the selected rx dims
/// (order as in MismatchGeometry::rx_noise()). Signal energy follows the
/// selected effective dims, noise the selected count, interference the
/// selected interfered excess dims.
double gamma_unc_inv_after(const MismatchGeometry& geom, const ChannelParams& p, const std::vector<bool>& selected);

}  // namespace nullcast

#endif  // NULLCAST_IDENTIFICATION_HPP
