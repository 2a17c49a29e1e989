#include "nullcast/identification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>

namespace nullcast {

double qtail_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::BadProbability, "probability must lie in (0, 1)");
  const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(boost::math::complement(standard, p));
}

DetectionThreshold np_threshold(double sigma2, Index q, double p_fa) {
  if (q < 1) throw Error(ErrorCode::BadDimensions, "block length must be >= 1");
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::BadDimensions, "noise variance must be positive");
  DetectionThreshold t;
  t.sigma2 = sigma2;
  t.q = q;
  t.p_fa = p_fa;
  t.gamma = std::sqrt(sigma2 / static_cast<double>(q)) * qtail_inverse(p_fa);
  return t;
}

SingletonDictionary::SingletonDictionary(SubspaceBasisd basis) : basis_(std::move(basis)) {}

CVector SingletonDictionary::dim_coefficients(const CVector& beta) const {
  const Index n = ambient_dim();
  if (beta.size() != n * count()) throw Error(ErrorCode::DimensionMismatch, "beta has the wrong length");
  CVector c(count());
  for (Index i = 0; i < count(); ++i) c(i) = basis_.column(i).dot(beta.segment(i * n, n));
  return c;
}

CVector SingletonDictionary::apply(const CVector& beta) const {
  return basis_.columns() * dim_coefficients(beta);
}

CVector SingletonDictionary::adjoint(const CVector& r) const {
  const Index n = ambient_dim();
  if (r.size() != n) throw Error(ErrorCode::DimensionMismatch, "residual has the wrong length");
  const CVector u = basis_.columns().adjoint() * r;
  CVector out(n * count());
  for (Index i = 0; i < count(); ++i) out.segment(i * n, n) = basis_.column(i) * u(i);
  return out;
}

CMatrix SingletonDictionary::dense() const {
  const Index n = ambient_dim();
  CMatrix p(n, n * count());
  for (Index i = 0; i < count(); ++i) p.middleCols(i * n, n) = basis_.column(i) * basis_.column(i).adjoint();
  return p;
}

OrthoProjectord SingletonDictionary::selected_projector(const std::vector<bool>& selected) const {
  if (static_cast<Index>(selected.size()) != count()) {
    throw Error(ErrorCode::DimensionMismatch, "selection length differs from the dimension count");
  }
  const Index n = ambient_dim();
  CMatrix m = CMatrix::Zero(n, n);
  Index rank = 0;
  for (Index i = 0; i < count(); ++i) {
    if (!selected[static_cast<std::size_t>(i)]) continue;
    m += basis_.column(i) * basis_.column(i).adjoint();
    ++rank;
  }
  return OrthoProjectord::trusted(std::move(m), rank);
}

Index SparseSelection::k0_hat() const {
  return static_cast<Index>(std::count(lambda.begin(), lambda.end(), true));
}

std::vector<std::size_t> SparseSelection::beta_support() const {
  std::vector<std::size_t> out;
  if (!alpha) return out;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i]) out.push_back(i * static_cast<std::size_t>(n) + static_cast<std::size_t>(*alpha));
  }
  return out;
}

RVector dimension_statistics(const CMatrix& dof_samples, const SubspaceBasisd& basis, const CVector& reference) {
  if (dof_samples.rows() != basis.dim()) throw Error(ErrorCode::DimensionMismatch, "one sample row per dimension");
  return coherent_statistics(dof_samples.rowwise().mean(), basis.columns().adjoint() * reference);
}

RVector coherent_statistics(const CVector& mean_coeffs, const CVector& reference_coeffs) {
  if (mean_coeffs.size() != reference_coeffs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one reference coefficient per dimension");
  }
  RVector t(mean_coeffs.size());
  const double floor = 1e-12 * std::max(reference_coeffs.norm(), 1e-300);
  for (Index d = 0; d < t.size(); ++d) {
    const double mag = std::abs(reference_coeffs(d));
    const Complex rot = mag > floor ? std::conj(reference_coeffs(d)) / mag : Complex(1.0, 0.0);
    t(d) = (mean_coeffs(d) * rot).real();
  }
  return t;
}

SparseSelection select_dimensions(const RVector& stats, const DetectionThreshold& thr) {
  SparseSelection sel;
  sel.lambda.resize(static_cast<std::size_t>(stats.size()));
  for (Index d = 0; d < stats.size(); ++d) sel.lambda[static_cast<std::size_t>(d)] = stats(d) > thr.gamma;
  return sel;
}

std::optional<Index> best_column(const SingletonDictionary& dict, const std::vector<bool>& lambda, const CVector& v) {
  return best_column_from_coefficients(dict.basis(), lambda, dict.basis().columns().adjoint() * v);
}

std::optional<Index> best_column_from_coefficients(const SubspaceBasisd& basis, const std::vector<bool>& lambda,
                                                   const CVector& u) {
  if (static_cast<Index>(lambda.size()) != basis.dim() || u.size() != basis.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "one flag and one coefficient per dimension");
  }
  const auto& b = basis.columns();
  // P~ e_i has coefficients conj(b_d[i]) on the selected dims, so both the
  // inner product and the norm reduce to sums over those dims.
  std::optional<Index> best;
  double best_val = -1.0;
  for (Index i = 0; i < basis.ambient_dim(); ++i) {
    Complex ip(0.0, 0.0);
    double norm2 = 0.0;
    for (Index d = 0; d < basis.dim(); ++d) {
      if (!lambda[static_cast<std::size_t>(d)]) continue;
      ip += b(i, d) * u(d);
      norm2 += std::norm(b(i, d));
    }
    if (norm2 <= 1e-24) continue;
    const double val = std::norm(ip) / norm2;
    if (val > best_val) {
      best_val = val;
      best = i;
    }
  }
  return best;
}

SparseSelection identify_dimensions(const CMatrix& frames, const SubspaceBasisd& basis,
                                    const DetectionThreshold& thr, const CVector& reference) {
  if (frames.cols() != thr.q) {
    throw Error(ErrorCode::BlockLengthMismatch, "frame count " + std::to_string(frames.cols()) +
                                                    " differs from block length " + std::to_string(thr.q));
  }
  const CMatrix s = basis.columns().adjoint() * frames;
  SparseSelection sel = select_dimensions(dimension_statistics(s, basis, reference), thr);
  sel.n = basis.ambient_dim();
  const CVector mean = frames.rowwise().mean();
  sel.alpha = best_column(SingletonDictionary(basis), sel.lambda, mean);
  return sel;
}

namespace {

// Residual sum_q ||y_q - P beta(mu)||^2 of the exact minimizer. Because the
// singletons are orthogonal the problem separates per dimension into a scalar
// shrinkage of u_i = b_i^H y_bar with threshold mu / (Q m_i), m_i = ||b_i||_inf.
double shrinkage_residual(const CVector& u, const RVector& m, double q, double floor, double mu) {
  double r = floor;
  for (Index i = 0; i < u.size(); ++i) {
    const double shrink = std::min(std::abs(u(i)), mu / (q * m(i)));
    r += q * shrink * shrink;
  }
  return r;
}

}  // namespace

PursuitResult basis_pursuit(const CMatrix& frames, const SingletonDictionary& dict, double eps, Index iters,
                            double step) {
  if (!(eps >= 0.0)) throw Error(ErrorCode::BadDimensions, "eps must be nonnegative");
  if (frames.rows() != dict.ambient_dim()) throw Error(ErrorCode::DimensionMismatch, "frame length differs from N");
  if (frames.cols() < 1) throw Error(ErrorCode::BadDimensions, "need at least one frame");
  const Index n = dict.ambient_dim();
  const Index k = dict.count();
  const double q = static_cast<double>(frames.cols());

  const CVector ybar = frames.rowwise().mean();
  const double spread = (frames.colwise() - ybar).squaredNorm();
  const CVector u = dict.basis().columns().adjoint() * ybar;
  // Part of the residual no beta can remove: frame spread plus energy outside the span.
  const double floor = spread + q * std::max(0.0, ybar.squaredNorm() - u.squaredNorm());
  RVector m(k);
  for (Index i = 0; i < k; ++i) m(i) = dict.basis().column(i).cwiseAbs().maxCoeff();

  PursuitResult res;
  res.beta = CVector::Zero(n * k);
  res.dim_magnitude = RVector::Zero(k);
  res.selection.lambda.assign(static_cast<std::size_t>(k), false);
  res.selection.n = n;

  // Smallest mu that already gives beta = 0.
  const double mu_max = q * (dict.adjoint(ybar)).cwiseAbs().maxCoeff();
  if (k == 0 || !(mu_max > 0.0)) return res;

  const double eps2 = eps * eps;
  double mu;
  if (eps2 >= shrinkage_residual(u, m, q, floor, mu_max)) {
    mu = mu_max;
  } else if (eps2 <= floor) {
    mu = 1e-9 * mu_max;
  } else {
    double lo = 0.0, hi = mu_max;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * mu_max; ++it) {
      const double mid = 0.5 * (lo + hi);
      (shrinkage_residual(u, m, q, floor, mid) <= eps2 ? lo : hi) = mid;
    }
    mu = std::max(lo, 1e-9 * mu_max);
  }
  res.mu = mu;

  // The Gram operator Q P^H P has largest eigenvalue Q (orthonormal singletons).
  const double lipschitz = q;
  const double t = step > 0.0 ? step : 0.9 / lipschitz;

  auto objective = [&](const CVector& beta) {
    return 0.5 * (spread + q * (ybar - dict.apply(beta)).squaredNorm()) + mu * beta.cwiseAbs().sum();
  };

  CVector beta = CVector::Zero(n * k);
  double f_prev = objective(beta);
  res.objective.push_back(f_prev);
  // Iterate well past the 1e-8 acceptance rule; it only decides NonConvergence.
  double change = std::numeric_limits<double>::infinity();
  Index it = 0;
  for (; it < iters; ++it) {
    const CVector grad = q * dict.adjoint(dict.apply(beta) - ybar);
    CVector next = beta - t * grad;
    for (Index j = 0; j < next.size(); ++j) next(j) = soft_threshold(next(j), t * mu);
    beta = std::move(next);
    const double f = objective(beta);
    res.objective.push_back(f);
    change = std::abs(f_prev - f) / std::max(std::abs(f_prev), std::numeric_limits<double>::min());
    f_prev = f;
    if (change <= 1e-15) {
      ++it;
      break;
    }
  }
  res.iterations = it;
  if (change > 1e-8) throw Error(ErrorCode::NonConvergence, "basis pursuit did not converge");

  res.beta = beta;
  const CVector c = dict.dim_coefficients(beta);
  res.dim_magnitude = c.cwiseAbs();
  const double top = res.dim_magnitude.maxCoeff();
  if (top > 0.0) {
    for (Index i = 0; i < k; ++i) res.selection.lambda[static_cast<std::size_t>(i)] = res.dim_magnitude(i) >= 0.5 * top;
    // alpha: the projector column carrying the most coefficient mass.
    RVector col_mass = RVector::Zero(n);
    for (Index i = 0; i < k; ++i) col_mass += beta.segment(i * n, n).cwiseAbs();
    Index a = 0;
    col_mass.maxCoeff(&a);
    res.selection.alpha = a;
  }
  const double beta_top = beta.cwiseAbs().maxCoeff();
  if (beta_top > 0.0) {
    for (Index j = 0; j < beta.size(); ++j) {
      if (std::abs(beta(j)) >= 0.5 * beta_top) res.beta_support.push_back(static_cast<std::size_t>(j));
    }
  }
  return res;
}

double gamma_unc_inv_after(const MismatchGeometry& geom, const ChannelParams& p, const std::vector<bool>& selected) {
  if (static_cast<Index>(selected.size()) != geom.k_hat_r()) {
    throw Error(ErrorCode::DimensionMismatch, "one selection flag per receiver dimension");
  }
  double effective = 0.0, count = 0.0, interfered = 0.0;
  for (Index d = 0; d < geom.k_hat_r(); ++d) {
    if (!selected[static_cast<std::size_t>(d)]) continue;
    count += 1.0;
    if (d < geom.k0) {
      effective += 1.0;
    } else if (d - geom.k0 < geom.eps_r) {
      interfered += 1.0;
    }
  }
  if (count == 0.0) return 0.0;
  const double k0 = static_cast<double>(geom.k0);
  return (effective / static_cast<double>(geom.k_hat_t())) * k0 / (count + p.inr_bar * interfered);
}

}  // namespace nullcast
