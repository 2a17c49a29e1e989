#include "nullcast/concurrence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace nullcast {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_f64(std::vector<std::uint8_t>& out, double x) {
  const auto v = std::bit_cast<std::uint64_t>(x);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t at, int width) {
  std::uint64_t v = 0;
  for (int b = 0; b < width; ++b) v |= static_cast<std::uint64_t>(bytes[at + static_cast<std::size_t>(b)]) << (8 * b);
  return v;
}

}  // namespace

std::vector<std::uint8_t> serialize(const FeedbackMessage& f) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + 16 * static_cast<std::size_t>(f.n()));
  put_u32(out, f.k0_hat);
  for (Index i = 0; i < f.n(); ++i) {
    put_f64(out, f.phi_r(i).real());
    put_f64(out, f.phi_r(i).imag());
  }
  return out;
}

FeedbackMessage deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || (bytes.size() - 4) % 16 != 0) {
    throw Error(ErrorCode::DimensionMismatch, "feedback payload of " + std::to_string(bytes.size()) + " bytes");
  }
  FeedbackMessage f;
  f.k0_hat = static_cast<std::uint32_t>(get_le(bytes, 0, 4));
  const auto n = static_cast<Index>((bytes.size() - 4) / 16);
  if (static_cast<Index>(f.k0_hat) > n) throw Error(ErrorCode::DimensionMismatch, "K0_hat exceeds N");
  f.phi_r.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto at = 4 + 16 * static_cast<std::size_t>(i);
    f.phi_r(i) = Complex(std::bit_cast<double>(get_le(bytes, at, 8)), std::bit_cast<double>(get_le(bytes, at + 8, 8)));
  }
  return f;
}

CVector receiver_filter(const SingletonDictionary& dict, const SparseSelection& sel) {
  if (static_cast<Index>(sel.lambda.size()) != dict.count()) {
    throw Error(ErrorCode::DimensionMismatch, "selection length differs from the dimension count");
  }
  CVector beta = CVector::Zero(dict.ambient_dim() * dict.count());
  if (!sel.alpha) return dict.apply(beta);
  for (std::size_t i = 0; i < sel.lambda.size(); ++i) {
    if (sel.lambda[i]) beta(static_cast<Index>(i) * dict.ambient_dim() + *sel.alpha) = 1.0;
  }
  return dict.apply(beta);
}

FeedbackMessage build_feedback(const SparseSelection& sel, const CVector& phi_r) {
  FeedbackMessage f;
  f.k0_hat = static_cast<std::uint32_t>(estimated_dim(sel));
  f.phi_r = phi_r;
  return f;
}

Index TxSelection::k0_hat() const { return static_cast<Index>(std::count(pi.begin(), pi.end(), true)); }

TxSelection noncoop_concur(const CMatrix& reverse_frames, const SubspaceBasisd& tx_basis,
                           const DetectionThreshold& thr, const CVector& reference) {
  const SparseSelection sel = identify_dimensions(reverse_frames, tx_basis, thr, reference);
  TxSelection out;
  out.pi = sel.lambda;
  return out;
}

CVector project_l1_ball(const CVector& z, double radius) {
  if (!(radius >= 0.0)) throw Error(ErrorCode::BadDimensions, "radius must be nonnegative");
  const RVector mag = z.cwiseAbs();
  if (mag.sum() <= radius) return z;
  if (radius == 0.0) return CVector::Zero(z.size());
  // Simplex projection of the magnitudes (Michelot): drop entries at or below
  // the running threshold until the active set is stable. Exact, no sort.
  std::vector<double> active(mag.data(), mag.data() + mag.size());
  double theta = 0.0;
  for (;;) {
    double sum = 0.0;
    for (double v : active) sum += v;
    theta = (sum - radius) / static_cast<double>(active.size());
    const auto kept = std::remove_if(active.begin(), active.end(), [&](double v) { return v <= theta; });
    if (kept == active.end()) break;
    active.erase(kept, active.end());
  }
  CVector out(z.size());
  for (Index j = 0; j < z.size(); ++j) out(j) = soft_threshold(z(j), theta);
  return out;
}

TxSelection coop_concur(const FeedbackMessage& f, const SingletonDictionary& tx, Index iters, double step) {
  if (f.n() != tx.ambient_dim()) throw Error(ErrorCode::DimensionMismatch, "feedback length differs from N");
  const Index n = tx.ambient_dim();
  const Index k = tx.count();
  const double radius = static_cast<double>(f.k0_hat);

  TxSelection out;
  out.pi.assign(static_cast<std::size_t>(k), false);
  out.gamma = CVector::Zero(n * k);
  out.dim_magnitude = RVector::Zero(k);
  if (k == 0 || f.k0_hat == 0) return out;

  // P_T P_T^H = sum_i b_i b_i^H is a projector, so ||P_T||^2 = 1.
  const double t = step > 0.0 ? step : 1.0;
  CVector gamma = out.gamma;
  CVector residual = -f.phi_r;
  double f_prev = 0.5 * residual.squaredNorm();
  double change = std::numeric_limits<double>::infinity();
  const double scale = std::max(f.phi_r.squaredNorm(), std::numeric_limits<double>::min());
  Index it = 0;
  for (; it < iters; ++it) {
    CVector next = project_l1_ball(gamma - t * tx.adjoint(residual), radius);
    const double step_size = (next - gamma).norm();
    gamma = std::move(next);
    residual = tx.apply(gamma) - f.phi_r;
    const double fv = 0.5 * residual.squaredNorm();
    change = std::abs(f_prev - fv) / std::max(std::abs(f_prev), std::numeric_limits<double>::min());
    f_prev = fv;
    if (change <= 1e-15 || fv <= 1e-30 * scale || step_size <= 1e-15 * std::max(gamma.norm(), 1e-300)) {
      change = 0.0;
      ++it;
      break;
    }
  }
  out.iterations = it;
  if (change > 1e-8) throw Error(ErrorCode::NonConvergence, "cooperative concurrence did not converge");

  out.gamma = gamma;
  out.dim_magnitude = tx.dim_coefficients(gamma).cwiseAbs();
  const double top = out.dim_magnitude.maxCoeff();
  if (!(top > 0.0)) return out;
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return out.dim_magnitude(a) > out.dim_magnitude(b); });
  const auto keep = std::min<std::size_t>(order.size(), f.k0_hat);
  for (std::size_t j = 0; j < keep; ++j) {
    const Index d = order[j];
    if (out.dim_magnitude(d) > 1e-9 * top) out.pi[static_cast<std::size_t>(d)] = true;
  }
  return out;
}

RipResult rip_check(const SingletonDictionary& dict, const CVector& gamma, double eps) {
  if (gamma.size() != dict.ambient_dim() * dict.count()) {
    throw Error(ErrorCode::DimensionMismatch, "gamma has the wrong length");
  }
  const double g = gamma.norm();
  if (!(g > 0.0)) throw Error(ErrorCode::ZeroVector, "gamma is zero");
  RipResult r;
  r.ratio = dict.apply(gamma).norm() / g;
  r.lower_ok = r.ratio * r.ratio >= 1.0 - eps;
  return r;
}

RipResult rip_check(const SingletonDictionary& dict, const std::vector<bool>& pi, Index alpha, double eps) {
  if (static_cast<Index>(pi.size()) != dict.count()) {
    throw Error(ErrorCode::DimensionMismatch, "pi length differs from the dimension count");
  }
  if (alpha < 0 || alpha >= dict.ambient_dim()) throw Error(ErrorCode::BadDimensions, "alpha out of range");
  CVector gamma = CVector::Zero(dict.ambient_dim() * dict.count());
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (pi[i]) gamma(static_cast<Index>(i) * dict.ambient_dim() + alpha) = 1.0;
  }
  return rip_check(dict, gamma, eps);
}

RMatrix overlap_gram(const SubspaceBasisd& tx_basis, const SubspaceBasisd& rx_basis) {
  if (tx_basis.ambient_dim() != rx_basis.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "bases live in different ambient spaces");
  }
  return (tx_basis.columns().adjoint() * rx_basis.columns()).cwiseAbs2();
}

double consensus_distance(const std::vector<bool>& sel_t, const std::vector<bool>& sel_r, const RMatrix& overlap,
                          bool normalize) {
  if (static_cast<Index>(sel_t.size()) != overlap.rows() || static_cast<Index>(sel_r.size()) != overlap.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "selection lengths differ from the overlap matrix");
  }
  const auto kt = std::count(sel_t.begin(), sel_t.end(), true);
  const auto kr = std::count(sel_r.begin(), sel_r.end(), true);
  double cross = 0.0;
  for (Index i = 0; i < overlap.rows(); ++i) {
    if (!sel_t[static_cast<std::size_t>(i)]) continue;
    for (Index j = 0; j < overlap.cols(); ++j) {
      if (sel_r[static_cast<std::size_t>(j)]) cross += overlap(i, j);
    }
  }
  const double d = std::max(0.0, 0.5 * static_cast<double>(kt + kr) - cross);
  if (!normalize) return d;
  const auto denom = std::max(kt, kr);
  return denom == 0 ? 0.0 : d / static_cast<double>(denom);
}

double consensus_distance(const std::vector<bool>& sel_t, const SubspaceBasisd& tx_basis,
                          const std::vector<bool>& sel_r, const SubspaceBasisd& rx_basis, bool normalize) {
  const auto pt = SingletonDictionary(tx_basis).selected_projector(sel_t);
  const auto pr = SingletonDictionary(rx_basis).selected_projector(sel_r);
  const double d = chordal_distance(pt, pr);
  if (!normalize) return d;
  const auto kt = std::count(sel_t.begin(), sel_t.end(), true);
  const auto kr = std::count(sel_r.begin(), sel_r.end(), true);
  const auto denom = std::max(kt, kr);
  return denom == 0 ? 0.0 : d / static_cast<double>(denom);
}

}  // namespace nullcast
