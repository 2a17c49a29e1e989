#include "nullcast/end_to_end.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace nullcast {

namespace {

SubspaceBasisd gather(const CMatrix& family, const std::vector<std::size_t>& idx) {
  CMatrix m(family.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) m.col(static_cast<Index>(j)) = family.col(static_cast<Index>(idx[j]));
  return SubspaceBasisd(std::move(m));
}

}  // namespace

MismatchGeometry MismatchGeometry::reversed(Index eps_r_reverse) const {
  if (eps_r_reverse < 0 || eps_r_reverse > kappa_t) {
    throw Error(ErrorCode::Infeasible, "reverse-link interfered dims exceed the transmitter excess");
  }
  MismatchGeometry g = *this;
  std::swap(g.kappa_t, g.kappa_r);
  std::swap(g.delta_t, g.delta_r);
  std::swap(g.delta_t_indices, g.delta_r_indices);
  g.eps_r = eps_r_reverse;
  return g;
}

MismatchGeometry build_pairwise(Index n, Index k0, Index kappa_t, Index kappa_r, Index eps_r,
                                BasisKind kind, std::uint64_t seed) {
  if (k0 < 1 || kappa_t < 0 || kappa_r < 0 || k0 + kappa_t + kappa_r > n) {
    throw Error(ErrorCode::Infeasible, "need K0 >= 1 and K0 + kappa_t + kappa_r <= N");
  }
  if (eps_r < 0 || eps_r > kappa_r) throw Error(ErrorCode::Infeasible, "eps_r must lie in [0, kappa_r]");

  Rng rng(seed);
  const CMatrix family = basis_family(n, kind, rng.split(0).next_u64());
  Rng pick = rng.split(1);
  const auto total = static_cast<std::size_t>(k0 + kappa_t + kappa_r);
  const auto cols = pick.sample_without_replacement(static_cast<std::size_t>(n), total);

  MismatchGeometry g;
  g.n = n;
  g.k0 = k0;
  g.kappa_t = kappa_t;
  g.kappa_r = kappa_r;
  g.eps_r = eps_r;
  g.kind = kind;
  const auto a = cols.begin();
  const auto b = a + k0;
  const auto c = b + kappa_t;
  g.shared_indices.assign(a, b);
  g.delta_t_indices.assign(b, c);
  g.delta_r_indices.assign(c, cols.end());
  g.shared = gather(family, g.shared_indices);
  g.delta_t = gather(family, g.delta_t_indices);
  g.delta_r = gather(family, g.delta_r_indices);
  return g;
}

double mismatch_loss(double rho_t, double rho_r) {
  return 1.0 / std::sqrt((1.0 + rho_t) * (1.0 + rho_r));
}

double matched_filter_gain(const MismatchGeometry& geom, std::optional<Index> column) {
  const auto pt = projector_from_basis(geom.tx_noise());
  const auto pr = projector_from_basis(geom.rx_noise());
  const Index n = column ? *column : select_column(pt).index;
  try {
    const auto wt = design_waveform(pt, n);
    const auto wr = design_waveform(pr, n);
    return wr.samples.dot(wt.samples).real();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateColumn) throw Error(ErrorCode::ColumnUndefined, e.what());
    throw;
  }
}

double ChannelParams::pulse_energy() const {
  return noise_density * std::pow(10.0, ep_over_n0_db / 10.0);
}

SnrBreakdown snr_with_uncertainty(const ChannelParams& p, Index k0, double rho_t, double rho_r, Index eps_r) {
  SnrBreakdown out;
  const double kk = static_cast<double>(k0);
  out.gamma_no_unc = p.gain * p.gain * p.tx_power / (kk * p.noise_density);
  out.gamma_unc_inv =
      (1.0 - rho_t / (1.0 + rho_t)) / ((1.0 + rho_r) + p.inr_bar * static_cast<double>(eps_r) / kk);
  out.snr = out.gamma_no_unc * out.gamma_unc_inv;
  return out;
}

SnrBreakdown snr_with_uncertainty(const ChannelParams& p, const MismatchGeometry& geom) {
  return snr_with_uncertainty(p, geom.k0, geom.rho_t(), geom.rho_r(), geom.eps_r);
}

ReceivedBlock simulate_received(const MismatchGeometry& geom, const ChannelParams& p, Index q,
                                const Waveform& tx, std::uint64_t seed) {
  if (q < 1) throw Error(ErrorCode::BadDimensions, "block length must be >= 1");
  if (tx.size() != geom.n) throw Error(ErrorCode::DimensionMismatch, "waveform length differs from N");

  ReceivedBlock block;
  block.labels.assign(static_cast<std::size_t>(geom.k0), DofLabel::Effective);
  for (Index j = 0; j < geom.kappa_r; ++j) {
    block.labels.push_back(j < geom.eps_r ? DofLabel::InterferedExcess : DofLabel::CleanExcess);
  }

  const CVector signal = p.gain * std::sqrt(p.pulse_energy()) * tx.samples;
  const double n0 = p.noise_density;
  const double inr_power = p.inr_bar * n0;
  Rng noise = Rng(seed).split(0);
  Rng interference = Rng(seed).split(1);

  block.frames.resize(geom.n, q);
  for (Index k = 0; k < q; ++k) {
    CVector y = signal;
    for (Index i = 0; i < geom.n; ++i) y(i) += noise.complex_normal(n0);
    if (inr_power > 0.0) {
      for (Index j = 0; j < geom.eps_r; ++j) y += geom.delta_r.column(j) * interference.complex_normal(inr_power);
    }
    block.frames.col(k) = y;
  }
  return block;
}

SnrMeasurement measure_snr(const ReceivedBlock& block, const SubspaceBasisd& basis) {
  const CMatrix y = block.dof_samples(basis);
  const Index q = y.cols();
  if (q < 2) throw Error(ErrorCode::BadDimensions, "need at least two frames to split signal from noise");
  const CVector mean = y.rowwise().mean();
  const double noise = (y.colwise() - mean).squaredNorm() / static_cast<double>(q - 1);
  SnrMeasurement m;
  m.noise_energy = noise;
  // |mean|^2 carries noise / Q on top of the signal energy.
  m.signal_energy = mean.squaredNorm() - noise / static_cast<double>(q);
  return m;
}

Index detect_waveform(const CMatrix& frames, const WaveformBook& book, double reg) {
  if (frames.cols() < 1) throw Error(ErrorCode::BadDimensions, "need at least one frame");
  const Index n = frames.rows();
  if (static_cast<Index>(book.size()) != n) throw Error(ErrorCode::DimensionMismatch, "book size differs from N");

  const CMatrix r = frames * frames.adjoint() / static_cast<double>(frames.cols());
  CMatrix loaded = r;
  if (reg > 0.0) {
    loaded.diagonal().array() += reg * r.trace().real() / static_cast<double>(n);
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(r, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    if (!(ev(0) > 1e-12 * std::max(ev(n - 1), 1e-300))) {
      throw Error(ErrorCode::SingularCovariance, "sample covariance is rank deficient and loading is off");
    }
  }
  const Eigen::LLT<CMatrix> llt(loaded);

  Index best = -1;
  double best_val = -1.0;
  for (Index i = 0; i < n; ++i) {
    const auto& entry = book[static_cast<std::size_t>(i)];
    if (!entry) continue;
    const CVector pv = r * entry->samples;
    const double val = pv.dot(llt.solve(pv)).real();
    if (val > best_val) {
      best_val = val;
      best = i;
    }
  }
  if (best < 0) throw Error(ErrorCode::EmptyInput, "waveform book has no entries");
  return best;
}

}  // namespace nullcast
