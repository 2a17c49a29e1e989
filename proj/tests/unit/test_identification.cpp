#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nullcast/identification.hpp"

using namespace nullcast;

namespace {

// Independent Gaussian tail: power series for small x, continued fraction beyond.
double qtail_oracle(double x) {
  if (x < 0) return 1.0 - qtail_oracle(-x);
  const long double pdf = std::exp(-0.5L * x * x) / std::sqrt(2.0L * std::numbers::pi_v<long double>);
  if (x < 3.0) {
    long double term = x, sum = x;
    for (int n = 1; n < 200; ++n) {
      term *= -static_cast<long double>(x) * x / (2.0L * n);
      sum += term / (2.0L * n + 1.0L);
    }
    return static_cast<double>(0.5L - sum / std::sqrt(2.0L * std::numbers::pi_v<long double>));
  }
  long double frac = 0.0L;
  for (int k = 300; k >= 1; --k) frac = k / (x + frac);
  return static_cast<double>(pdf / (x + frac));
}

SubspaceBasisd canonical(Index n, const std::vector<Index>& idx) {
  CMatrix m = CMatrix::Zero(n, static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) m(idx[j], static_cast<Index>(j)) = 1.0;
  return SubspaceBasisd(m);
}

// Plain ISTA on the fully stacked problem 1/2 ||y~ - Phi beta||^2 + mu ||beta||_1.
CVector stacked_ista(const CMatrix& frames, const CMatrix& p, double mu, int iters) {
  const Index q = frames.cols();
  const Index n = frames.rows();
  CMatrix phi(n * q, p.cols());
  CVector ys(n * q);
  for (Index k = 0; k < q; ++k) {
    phi.middleRows(k * n, n) = p;
    ys.segment(k * n, n) = frames.col(k);
  }
  Eigen::JacobiSVD<CMatrix> svd(phi);
  const double l = svd.singularValues()(0) * svd.singularValues()(0);
  const double t = 0.9 / l;
  CVector beta = CVector::Zero(p.cols());
  for (int it = 0; it < iters; ++it) {
    CVector z = beta - t * (phi.adjoint() * (phi * beta - ys));
    for (Index j = 0; j < z.size(); ++j) z(j) = soft_threshold(z(j), t * mu);
    beta = z;
  }
  return beta;
}

}  // namespace

TEST_CASE("inverse tail against an independent series/continued-fraction oracle") {
  CHECK(qtail_oracle(1.0) == doctest::Approx(0.158655253931457).epsilon(1e-12));
  for (double p : {0.5, 0.4, 0.25, 0.1587, 0.1, 0.05, 0.01, 1e-3, 1e-4, 1e-6, 1e-9, 0.9, 0.999}) {
    const double x = qtail_inverse(p);
    CHECK(qtail_oracle(x) == doctest::Approx(p).epsilon(1e-10));
  }
  CHECK_THROWS_AS(qtail_inverse(0.0), Error);
  CHECK_THROWS_AS(qtail_inverse(1.0), Error);
}

TEST_CASE("np_threshold examples") {
  CHECK(np_threshold(1.0, 1, 0.5).gamma == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(np_threshold(1.0, 1, qtail_oracle(1.0)).gamma == doctest::Approx(1.0).epsilon(1e-10));
  const double g1 = np_threshold(0.7, 10, 0.01).gamma;
  const double g4 = np_threshold(0.7, 40, 0.01).gamma;
  CHECK(g4 == doctest::Approx(g1 / 2.0).epsilon(1e-14));
  CHECK(np_threshold(1.0, 1, 0.3).gamma > 0.0);
  try {
    np_threshold(1.0, 1, 1.5);
    FAIL("expected BadProbability");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadProbability);
  }
}

TEST_CASE("singleton dictionary operators agree with the dense matrix") {
  auto g = build_pairwise(10, 3, 2, 2, 0, BasisKind::RandomOrthonormal, 1);
  SingletonDictionary dict(g.rx_noise());
  const CMatrix p = dict.dense();
  CHECK(p.rows() == 10);
  CHECK(p.cols() == 50);
  Rng rng(2);
  CVector beta(50), r(10);
  for (Index i = 0; i < 50; ++i) beta(i) = rng.complex_normal();
  for (Index i = 0; i < 10; ++i) r(i) = rng.complex_normal();
  CHECK((dict.apply(beta) - p * beta).norm() < 1e-12);
  CHECK((dict.adjoint(r) - p.adjoint() * r).norm() < 1e-12);
  // P P^H is the projector onto the whole basis, so ||P||_2 = 1.
  CHECK((p * p.adjoint() - projector_from_basis(g.rx_noise()).matrix()).norm() < 1e-12);
}

TEST_CASE("sparse selection bookkeeping") {
  SparseSelection s;
  s.lambda = {false, false, false};
  s.n = 4;
  CHECK(estimated_dim(s) == 0);
  CHECK(s.beta_support().empty());
  s.lambda = {true, false, true};
  s.alpha = 2;
  CHECK(estimated_dim(s) == 2);
  CHECK(s.beta_support() == std::vector<std::size_t>{2, 10});
}

TEST_CASE("noiseless frames select exactly the effective dims") {
  auto g = build_pairwise(64, 40, 12, 12, 0, BasisKind::Fourier, 3);
  const auto pt = projector_from_basis(g.tx_noise());
  const auto pr = projector_from_basis(g.rx_noise());
  const auto sel_t = select_column(pt);
  auto tx = design_waveform(pt, sel_t.index);
  auto ref = design_waveform(pr, sel_t.index);
  ChannelParams p;
  p.noise_density = 1e-20;
  p.ep_over_n0_db = 200.0;
  auto blk = simulate_received(g, p, 5, tx, 4);
  auto thr = np_threshold(statistic_variance(p.noise_density), 5, 0.01);
  auto sel = identify_dimensions(blk.frames, g.rx_noise(), thr, ref.samples);
  for (Index d = 0; d < 52; ++d) CHECK(sel.lambda[static_cast<std::size_t>(d)] == (d < 40));
  CHECK(estimated_dim(sel) == 40);
  REQUIRE(sel.alpha.has_value());
  CHECK(*sel.alpha == sel_t.index);
  CHECK_THROWS_AS(identify_dimensions(blk.frames, g.rx_noise(), np_threshold(0.5, 4, 0.01), ref.samples), Error);
}

TEST_CASE("pure-noise exceedance rate is calibrated") {
  auto g = build_pairwise(16, 6, 3, 3, 0, BasisKind::Fourier, 5);
  const auto pr = projector_from_basis(g.rx_noise());
  const auto ref = design_waveform(pr).samples;
  ChannelParams p;
  p.ep_over_n0_db = -400.0;
  const Index q = 100;
  const auto thr = np_threshold(statistic_variance(p.noise_density), q, 0.01);
  const auto tx = design_waveform(projector_from_basis(g.tx_noise()));
  long hits = 0, total = 0;
  for (int t = 0; t < 2000; ++t) {
    auto blk = simulate_received(g, p, q, tx, static_cast<std::uint64_t>(t));
    auto sel = identify_dimensions(blk.frames, g.rx_noise(), thr, ref);
    hits += estimated_dim(sel);
    total += g.k_hat_r();
  }
  const double rate = static_cast<double>(hits) / static_cast<double>(total);
  CHECK(rate > 0.008);
  CHECK(rate < 0.012);
}

TEST_CASE("high Ep/N0 with Q=100 misses almost nothing at P_FA=1e-2") {
  auto g = build_pairwise(64, 40, 12, 12, 0, BasisKind::Fourier, 6);
  const auto pt = projector_from_basis(g.tx_noise());
  const auto pr = projector_from_basis(g.rx_noise());
  const Index n = select_column(pt).index;
  const auto tx = design_waveform(pt, n);
  const auto ref = design_waveform(pr, n).samples;
  ChannelParams p;
  p.ep_over_n0_db = 20.0;
  const auto thr = np_threshold(statistic_variance(p.noise_density), 100, 0.01);
  long missed = 0;
  for (int t = 0; t < 50; ++t) {
    auto sel = identify_dimensions(simulate_received(g, p, 100, tx, static_cast<std::uint64_t>(t)).frames,
                                   g.rx_noise(), thr, ref);
    for (Index d = 0; d < 40; ++d) missed += sel.lambda[static_cast<std::size_t>(d)] ? 0 : 1;
  }
  CHECK(static_cast<double>(missed) / (50.0 * 40.0) < 1e-2);
}

TEST_CASE("basis pursuit recovers a single projector column") {
  auto g = build_pairwise(8, 2, 1, 1, 0, BasisKind::RandomOrthonormal, 7);
  SingletonDictionary dict(g.rx_noise());
  const Index dim = 1, col = 5;
  CMatrix y(8, 1);
  y.col(0) = dict.basis().column(dim) * std::conj(dict.basis().columns()(col, dim));
  auto res = basis_pursuit(y, dict, 0.0);
  CHECK(res.selection.lambda == std::vector<bool>{false, true, false});
  CHECK((dict.apply(res.beta) - y.col(0)).norm() < 1e-6);
}

TEST_CASE("basis pursuit objective never increases") {
  auto g = build_pairwise(12, 4, 2, 2, 1, BasisKind::Fourier, 8);
  SingletonDictionary dict(g.rx_noise());
  const auto tx = design_waveform(projector_from_basis(g.tx_noise()));
  ChannelParams p;
  p.ep_over_n0_db = 5.0;
  auto blk = simulate_received(g, p, 10, tx, 9);
  auto res = basis_pursuit(blk.frames, dict, std::sqrt(10.0 * 12.0));
  for (std::size_t i = 1; i < res.objective.size(); ++i) CHECK(res.objective[i] <= res.objective[i - 1] + 1e-12);
}

TEST_CASE("basis pursuit matches the exact per-dimension shrinkage") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = build_pairwise(12, 4, 2, 3, 1, seed % 2 ? BasisKind::Fourier : BasisKind::RandomOrthonormal, seed);
    SingletonDictionary dict(g.rx_noise());
    const auto tx = design_waveform(projector_from_basis(g.tx_noise()));
    ChannelParams p;
    p.ep_over_n0_db = 10.0;
    auto blk = simulate_received(g, p, 6, tx, seed + 50);
    auto res = basis_pursuit(blk.frames, dict, std::sqrt(6.0 * 12.0 * 1.1));
    const CVector ybar = blk.frames.rowwise().mean();
    const CVector u = dict.basis().columns().adjoint() * ybar;
    for (Index i = 0; i < dict.count(); ++i) {
      const double m = dict.basis().column(i).cwiseAbs().maxCoeff();
      const double expect = std::max(0.0, std::abs(u(i)) - res.mu / (6.0 * m));
      CHECK(std::abs(res.dim_magnitude(i) - expect) < 1e-6);
    }
  }
}

TEST_CASE("cumulative and stacked forms give the same solution") {
  auto g = build_pairwise(6, 2, 1, 1, 0, BasisKind::RandomOrthonormal, 10);
  SingletonDictionary dict(g.rx_noise());
  const auto tx = design_waveform(projector_from_basis(g.tx_noise()));
  ChannelParams p;
  p.ep_over_n0_db = 6.0;
  auto blk = simulate_received(g, p, 4, tx, 11);
  auto res = basis_pursuit(blk.frames, dict, std::sqrt(4.0 * 6.0));
  const CVector stacked = stacked_ista(blk.frames, dict.dense(), res.mu, 20000);
  CHECK((dict.dim_coefficients(stacked) - dict.dim_coefficients(res.beta)).norm() < 1e-6);
  CHECK(std::abs(0.5 * (blk.frames.colwise() - dict.apply(stacked)).squaredNorm() + res.mu * stacked.cwiseAbs().sum() -
                 res.objective.back()) < 1e-8 * res.objective.back());
}

TEST_CASE("basis pursuit support matches exhaustive search on canonical instances") {
  // Exhaustive oracle: over all (lambda, alpha), least residual, then fewest dims.
  for (Index n = 2; n <= 8; ++n) {
    for (Index k = 1; k <= std::min<Index>(4, n); ++k) {
      std::vector<Index> dims;
      for (Index i = 0; i < k; ++i) dims.push_back(i * n / k);
      SingletonDictionary dict(canonical(n, dims));
      for (Index active = 0; active < k; ++active) {
        CMatrix y = CMatrix::Zero(n, 1);
        y(dims[static_cast<std::size_t>(active)], 0) = 1.0;
        auto res = basis_pursuit(y, dict, 0.0);
        double best = 1e300;
        std::vector<bool> best_lambda;
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
          for (Index a = 0; a < n; ++a) {
            CVector beta = CVector::Zero(n * k);
            std::vector<bool> lam(static_cast<std::size_t>(k));
            for (Index i = 0; i < k; ++i) {
              lam[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
              if (lam[static_cast<std::size_t>(i)]) beta(i * n + a) = 1.0;
            }
            const double r = (y.col(0) - dict.apply(beta)).squaredNorm();
            const auto cnt = std::count(lam.begin(), lam.end(), true);
            if (r < best - 1e-12 ||
                (r < best + 1e-12 && cnt < std::count(best_lambda.begin(), best_lambda.end(), true))) {
              best = r;
              best_lambda = lam;
            }
          }
        }
        CHECK(res.selection.lambda == best_lambda);
      }
    }
  }
}

TEST_CASE("identification brings the SNR penalty to the transmitter-only limit") {
  auto g = build_pairwise(64, 40, 12, 12, 6, BasisKind::Fourier, 12);
  ChannelParams p;
  p.inr_bar = 4.0;
  const auto pt = projector_from_basis(g.tx_noise());
  const auto pr = projector_from_basis(g.rx_noise());
  const Index n = select_column(pt).index;
  const auto tx = design_waveform(pt, n);
  const auto ref = design_waveform(pr, n).samples;
  std::vector<bool> all(52, true);
  const double before = gamma_unc_inv_after(g, p, all);
  CHECK(before == doctest::Approx(snr_with_uncertainty(p, g).gamma_unc_inv));
  // Interference would raise the exceedance rate of the interfered dims above
  // the noise-calibrated P_FA, so the limit is checked without it.
  p.inr_bar = 0.0;
  const double limit = 1.0 - 0.3 / 1.3;
  double prev_gap = 1e9;
  for (double snr_db : {0.0, 10.0, 20.0, 30.0}) {
    p.ep_over_n0_db = snr_db;
    const auto thr = np_threshold(statistic_variance(p.noise_density), 20, 0.01);
    double acc = 0.0;
    for (int t = 0; t < 20; ++t) {
      auto blk = simulate_received(g, p, 20, tx, static_cast<std::uint64_t>(t));
      acc += gamma_unc_inv_after(g, p, identify_dimensions(blk.frames, g.rx_noise(), thr, ref).lambda);
    }
    const double gap = std::abs(acc / 20.0 - limit);
    CHECK(gap <= prev_gap + 1e-3);
    prev_gap = gap;
  }
  CHECK(prev_gap < 0.01);
}
