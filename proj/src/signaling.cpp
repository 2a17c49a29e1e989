#include "nullcast/signaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace nullcast {

namespace {

constexpr double kColumnFloor = 1e-12;

ColumnSelection argmax_with_ties(const RVector& values, double tie_tol) {
  ColumnSelection sel;
  Index best = 0;
  for (Index k = 1; k < values.size(); ++k) {
    if (values(k) > values(best)) best = k;
  }
  const double cutoff = values(best) - tie_tol;
  for (Index k = 0; k < values.size(); ++k) {
    if (values(k) >= cutoff) sel.tie_set.push_back(k);
  }
  sel.index = sel.tie_set.front();
  return sel;
}

// Rescale so sample n is real positive and the vector has unit energy.
CVector fix_phase(const CVector& v, Index n) {
  const Complex a = v(n);
  return v * (std::conj(a) / std::abs(a)) / v.norm();
}

}  // namespace

ColumnSelection select_column(const OrthoProjectord& p, double tie_tol) {
  if (p.rank() == 0) throw Error(ErrorCode::ZeroProjector, "projector has rank 0");
  return argmax_with_ties(p.diagonal(), tie_tol);
}

Waveform design_waveform(const OrthoProjectord& p, Index n) {
  if (n < 0 || n >= p.ambient_dim()) throw Error(ErrorCode::BadDimensions, "column index out of range");
  const double pn = p.matrix()(n, n).real();
  if (!(pn > kColumnFloor)) {
    throw Error(ErrorCode::DegenerateColumn, "projector column " + std::to_string(n) + " is ~0");
  }
  Waveform w;
  w.samples = p.matrix().col(n) / std::sqrt(pn);
  w.column_index = n;
  w.tie_set = {n};
  return w;
}

Waveform design_waveform(const OrthoProjectord& p, const ColumnSelection& sel) {
  Waveform w = design_waveform(p, sel.index);
  w.unique = sel.unique();
  w.tie_set = sel.tie_set;
  return w;
}

Waveform design_tls(const SubspaceBasisd& sensed_signal, double tie_tol) {
  const Index n = sensed_signal.ambient_dim();
  const Index d_hat = sensed_signal.dim();
  if (n < 1) throw Error(ErrorCode::BadDimensions, "empty ambient space");

  CMatrix t = CMatrix::Zero(d_hat, n + 1);
  if (d_hat > 0) t.rightCols(n) = sensed_signal.columns().adjoint();
  const auto v2 = svd_null_space<double>(t);
  const CMatrix v2t = v2.columns().bottomRows(n);

  // Squared row norms of V2~ equal the diagonal of V2~ V2~^H, i.e. of the sensed
  // noise projector, so the predictor row choice mirrors select_column.
  const RVector row_norms = v2t.rowwise().squaredNorm();
  if (!(row_norms.maxCoeff() > kColumnFloor)) {
    throw Error(ErrorCode::EmptyNullSpace, "sensed signal subspace fills the ambient space");
  }
  const auto sel = argmax_with_ties(row_norms, tie_tol);
  const CVector c = v2t.row(sel.index).transpose();
  const CVector phi = v2t * c.conjugate() / c.squaredNorm();

  Waveform w;
  w.samples = fix_phase(phi, sel.index);
  w.column_index = sel.index;
  w.unique = sel.unique();
  w.tie_set = sel.tie_set;
  return w;
}

WaveformBook waveform_book(const OrthoProjectord& p) {
  WaveformBook book(static_cast<std::size_t>(p.ambient_dim()));
  for (Index n = 0; n < p.ambient_dim(); ++n) {
    if (p.matrix()(n, n).real() > kColumnFloor) book[static_cast<std::size_t>(n)] = design_waveform(p, n);
  }
  return book;
}

double rank1_distance(const CVector& a, const CVector& b) {
  // The expanded form |a|^4 + |b|^4 - 2|a^H b|^2 cancels down to ~1e-8, so form the matrices.
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "vectors differ in length");
  return (a * a.adjoint() - b * b.adjoint()).norm();
}

RVector psd(const CVector& w, Index n_fft) {
  if (n_fft < w.size() || n_fft < 1) throw Error(ErrorCode::BadFftSize, "n_fft must be >= N");
  RVector out(n_fft);
  for (Index k = 0; k < n_fft; ++k) {
    Complex acc(0.0, 0.0);
    for (Index t = 0; t < w.size(); ++t) {
      const auto m = static_cast<double>((k * t) % n_fft);
      acc += w(t) * std::polar(1.0, -2.0 * std::numbers::pi * m / static_cast<double>(n_fft));
    }
    out(k) = std::norm(acc);
  }
  const double peak = out.maxCoeff();
  if (peak > 0.0) out /= peak;
  return out;
}

RVector power_db(const RVector& linear) {
  RVector out(linear.size());
  for (Index k = 0; k < linear.size(); ++k) {
    out(k) = linear(k) > 1e-40 ? 10.0 * std::log10(linear(k)) : -400.0;
  }
  return out;
}

std::vector<Complex> polynomial_roots(const CVector& coeffs) {
  const double scale = coeffs.size() > 0 ? coeffs.cwiseAbs().maxCoeff() : 0.0;
  if (!(scale > 1e-300)) throw Error(ErrorCode::DegeneratePolynomial, "all coefficients are zero");
  const double floor = 1e-12 * scale;
  Index first = 0;
  Index last = coeffs.size() - 1;
  while (std::abs(coeffs(first)) < floor) ++first;
  while (std::abs(coeffs(last)) < floor) --last;
  const Index degree = last - first;
  if (degree == 0) return {};

  const CVector c = coeffs.segment(first, degree + 1) / coeffs(first);
  CMatrix companion = CMatrix::Zero(degree, degree);
  for (Index j = 0; j < degree; ++j) companion(0, j) = -c(j + 1);
  for (Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<CMatrix> es(companion, false);

  std::vector<Complex> roots(es.eigenvalues().data(), es.eigenvalues().data() + degree);
  // A few Newton steps on the original polynomial tighten the eigenvalue roots.
  for (auto& z : roots) {
    for (int it = 0; it < 3; ++it) {
      Complex p = c(0), dp = 0.0;
      for (Index j = 1; j <= degree; ++j) {
        dp = dp * z + p;
        p = p * z + c(j);
      }
      if (std::abs(dp) < 1e-300) break;
      const Complex step = p / dp;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
    }
  }
  return roots;
}

std::vector<Complex> zeros(const CVector& w) {
  // Multiplying sum_n w[n] z^{-n} by z^{N-1} gives coefficients w[0], ..., w[N-1].
  return polynomial_roots(w);
}

std::vector<Complex> spectral_zeros(const CVector& w) {
  const Index n = w.size();
  CVector amp(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index k = 0; k < n; ++k) {
    Complex acc(0.0, 0.0);
    for (Index t = 0; t < n; ++t) {
      const auto m = static_cast<double>((k * t) % n);
      acc += w(t) * std::polar(1.0, -2.0 * std::numbers::pi * m / static_cast<double>(n));
    }
    amp(k) = acc * scale;
  }
  return polynomial_roots(amp);
}

}  // namespace nullcast
