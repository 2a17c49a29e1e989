#include <doctest.h>

#include <algorithm>
#include <map>

#include "nullcast/scenario.hpp"
#include "nullcast/signaling.hpp"

using namespace nullcast;

namespace {

OrthoProjectord diag_projector(std::initializer_list<double> d) {
  RVector v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return OrthoProjectord::trusted(v.cast<Complex>().asDiagonal(), 1);
}

SubspaceBasisd canonical(Index n, std::initializer_list<Index> idx) {
  CMatrix m = CMatrix::Zero(n, static_cast<Index>(idx.size()));
  Index j = 0;
  for (Index i : idx) m(i, j++) = 1.0;
  return SubspaceBasisd(m);
}

CVector unit(Index n, Index k) {
  CVector e = CVector::Zero(n);
  e(k) = 1.0;
  return e;
}

}  // namespace

TEST_CASE("select_column ties and strict maxima") {
  auto p = projector_from_basis(canonical(4, {0, 2}));
  auto s = select_column(p, 1e-9);
  CHECK(s.index == 0);
  CHECK(s.tie_set == std::vector<Index>{0, 2});
  CHECK_FALSE(s.unique());

  // Only the diagonal is read, so a diagonal stand-in is enough here.
  auto q = select_column(diag_projector({0.9, 0.5, 0.6}), 1e-9);
  CHECK(q.index == 0);
  CHECK(q.unique());

  CHECK_THROWS_AS(select_column(projector_from_basis(SubspaceBasisd::empty(3))), Error);
}

TEST_CASE("DFT projectors have a fully ambiguous diagonal") {
  const SubspaceBasisd f(dft_matrix<double>(12));
  const std::array<std::size_t, 5> idx{1, 2, 6, 9, 11};
  auto p = projector_from_basis(select_columns(f, std::span<const std::size_t>(idx)));
  for (Index i = 0; i < 12; ++i) CHECK(p.diagonal()(i) == doctest::Approx(5.0 / 12.0));
  CHECK(select_column(p).tie_set.size() == 12);
}

TEST_CASE("design_waveform examples") {
  auto w = design_waveform(projector_from_basis(SubspaceBasisd(CMatrix(CMatrix::Identity(4, 4)))), 0);
  CHECK((w.samples - unit(4, 0)).norm() < 1e-15);
  auto w2 = design_waveform(projector_from_basis(canonical(4, {0, 2})), 0);
  CHECK((w2.samples - unit(4, 0)).norm() < 1e-15);
  try {
    design_waveform(projector_from_basis(canonical(4, {0, 2})), 1);
    FAIL("expected DegenerateColumn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateColumn);
  }
}

TEST_CASE("design_waveform properties on random environments") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto env = generate_environment(16, 6, BasisKind::RandomOrthonormal, seed);
    auto s = apply_sensing_uncertainty(env, {1, 1, 2}, seed + 1);
    auto p = projector_from_basis(s.sensed_noise);
    auto w = design_waveform(p);
    CHECK(std::abs(w.samples.norm() - 1.0) < 1e-10);
    CHECK((p.matrix() * w.samples - w.samples).norm() < 1e-9);
    CHECK(std::abs(w.samples(w.column_index).imag()) < 1e-15);
    CHECK(w.samples(w.column_index).real() > 0.0);
    CHECK((s.sensed_signal.columns().adjoint() * w.samples).norm() < 1e-9);
  }
}

TEST_CASE("occupied carriers are nulled in the spectrum") {
  auto env = generate_environment(32, 12, BasisKind::Fourier, 3);
  auto s = apply_sensing_uncertainty(env, {}, 0);
  auto w = design_waveform(projector_from_basis(s.sensed_noise));
  const auto spec = psd(w, 32);
  for (auto k : env.signal_indices) CHECK(spec(static_cast<Index>(k)) < 1e-16);
  // Zero padding by 8 puts carrier k on bin 8k.
  const auto fine = psd(w, 256);
  for (auto k : env.signal_indices) CHECK(fine(static_cast<Index>(8 * k)) < 1e-16);
  CHECK(fine.maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("psd of an impulse is flat; bad sizes rejected") {
  const auto spec = psd(unit(8, 0), 32);
  CHECK((spec - RVector::Ones(32)).norm() < 1e-12);
  CHECK_THROWS_AS(psd(unit(8, 0), 7), Error);
  CHECK(power_db(RVector::Constant(1, 0.01))(0) == doctest::Approx(-20.0));
}

TEST_CASE("maximum uncertainty exploits every carrier uniformly") {
  auto env = generate_environment(32, 12, BasisKind::Fourier, 5);
  auto s = apply_sensing_uncertainty(env, {12, 0, 0}, 1);
  auto w = design_waveform(projector_from_basis(s.sensed_noise));
  const auto spec = psd(w, 32);
  CHECK((spec - RVector::Ones(32)).norm() < 1e-12);
}

TEST_CASE("zeros examples") {
  CHECK(zeros(unit(8, 0)).empty());
  CVector two(2);
  two << 1.0, Complex(0.3, -0.4);
  auto r = zeros(two);
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r[0] - Complex(-0.3, 0.4)) < 1e-14);
  CHECK_THROWS_AS(zeros(CVector::Zero(4)), Error);
  // Leading zeros shrink the degree, trailing zeros drop roots at the origin.
  CVector padded(5);
  padded << 0.0, 1.0, 2.0, 0.0, 0.0;
  auto rp = zeros(padded);
  REQUIRE(rp.size() == 1);
  CHECK(std::abs(rp[0] + 2.0) < 1e-14);
}

TEST_CASE("polynomial roots match a product-form oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Complex> truth;
    for (int i = 0; i < 6; ++i) truth.push_back(rng.complex_normal());
    // Expand prod (z - r_i).
    CVector c = CVector::Zero(7);
    c(0) = 1.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      for (Index j = static_cast<Index>(i) + 1; j >= 1; --j) c(j) -= truth[i] * c(j - 1);
    }
    auto roots = polynomial_roots(c);
    REQUIRE(roots.size() == 6);
    for (const auto& t : truth) {
      double best = 1e9;
      for (const auto& z : roots) best = std::min(best, std::abs(z - t));
      CHECK(best < 1e-8);
    }
  }
}

TEST_CASE("time-domain zeros of the uncertainty-free waveform sit on the occupied carriers") {
  auto env = generate_environment(32, 12, BasisKind::Fourier, 8);
  auto s = apply_sensing_uncertainty(env, {}, 0);
  auto w = design_waveform(projector_from_basis(s.sensed_noise));
  auto z = zeros(w);
  for (auto k : env.signal_indices) {
    const Complex target = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / 32.0);
    double best = 1e9;
    for (const auto& r : z) best = std::min(best, std::abs(r - target));
    CHECK(best < 1e-6);
  }
}

TEST_CASE("spectral zeros of the maximum-uncertainty waveform are uniform on a circle") {
  auto env = generate_environment(32, 12, BasisKind::Fourier, 9);
  auto s = apply_sensing_uncertainty(env, {7, 5, 0}, 2);
  auto w = design_waveform(projector_from_basis(s.sensed_noise));
  auto z = spectral_zeros(w);
  REQUIRE(z.size() == 31);
  double rmin = 1e9, rmax = 0;
  for (const auto& r : z) {
    rmin = std::min(rmin, std::abs(r));
    rmax = std::max(rmax, std::abs(r));
  }
  CHECK(rmax - rmin < 1e-8);
  // Every zero is within 1e-6 rad of the 2 pi / 32 lattice.
  const double step = 2.0 * std::numbers::pi / 32.0;
  for (const auto& r : z) {
    const double a = std::arg(r) / step;
    CHECK(std::abs(a - std::round(a)) * step < 1e-6);
  }
}

TEST_CASE("TLS small examples") {
  // Signal span{e1} in C^3: candidates are columns 2 and 3 of a rank-2 projector.
  auto sig = canonical(3, {0});
  auto w = design_tls(sig);
  CHECK(std::abs(w.samples(0)) < 1e-12);
  auto p = projector_from_basis(orthogonal_complement(sig));
  double best = 1e9;
  for (Index n : {1, 2}) best = std::min(best, rank1_distance(w.samples, design_waveform(p, n).samples));
  CHECK(best < 1e-10);

  // D_hat = N - 1 leaves a single null direction.
  CMatrix g(4, 3);
  Rng rng(2);
  for (Index j = 0; j < 3; ++j)
    for (Index i = 0; i < 4; ++i) g(i, j) = rng.complex_normal();
  auto s3 = orthonormalize<double>(g);
  auto wt = design_tls(s3);
  auto null_dir = orthogonal_complement(s3);
  CHECK(rank1_distance(wt.samples, null_dir.column(0)) < 1e-9);

  CHECK_THROWS_AS(design_tls(SubspaceBasisd(CMatrix(CMatrix::Identity(3, 3)))), Error);
  auto wi = design_tls(SubspaceBasisd::empty(5));
  CHECK((wi.samples - unit(5, 0)).norm() < 1e-12);
}

TEST_CASE("TLS agrees with the projector column on random environments") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto kind = static_cast<BasisKind>(seed % 3);
    auto env = generate_environment(24, 9, kind, seed);
    auto s = apply_sensing_uncertainty(env, {2, 1, 3}, seed ^ 0xABC);
    auto p = projector_from_basis(s.sensed_noise);
    auto ref = design_waveform(p);
    auto tls = design_tls(s.sensed_signal);
    CHECK(tls.column_index == ref.column_index);
    CHECK(rank1_distance(tls.samples, ref.samples) < 1e-8);
    CHECK((tls.samples - ref.samples).norm() < 1e-8);
  }
}

TEST_CASE("waveform book") {
  auto book = waveform_book(projector_from_basis(SubspaceBasisd(CMatrix(CMatrix::Identity(2, 2)))));
  REQUIRE(book.size() == 2);
  CHECK((book[0]->samples - unit(2, 0)).norm() < 1e-15);
  CHECK((book[1]->samples - unit(2, 1)).norm() < 1e-15);

  auto half = waveform_book(projector_from_basis(canonical(2, {0})));
  CHECK(half[0].has_value());
  CHECK_FALSE(half[1].has_value());
}

TEST_CASE("DFT-subset waveform book is circulant") {
  const SubspaceBasisd f(dft_matrix<double>(8));
  const std::array<std::size_t, 5> idx{0, 2, 3, 5, 6};
  auto p = projector_from_basis(select_columns(f, std::span<const std::size_t>(idx)));
  auto book = waveform_book(p);
  REQUIRE(book.size() == 8);
  // |<w_n, w_m>| depends only on (m - n) mod N.
  std::map<Index, double> by_lag;
  for (Index n = 0; n < 8; ++n) {
    CHECK(std::abs(book[n]->samples.norm() - 1.0) < 1e-12);
    for (Index m = 0; m < 8; ++m) {
      const double mag = std::abs(book[n]->samples.dot(book[m]->samples));
      const Index lag = (m - n + 8) % 8;
      if (by_lag.count(lag)) {
        CHECK(std::abs(by_lag[lag] - mag) < 1e-12);
      } else {
        by_lag[lag] = mag;
      }
      if (m != n) CHECK((book[n]->samples - book[m]->samples).norm() > 1e-3);
    }
  }
}

TEST_CASE("rotation of the sensed noise basis leaves the waveform unchanged") {
  auto env = generate_environment(20, 7, BasisKind::RandomOrthonormal, 4);
  auto s = apply_sensing_uncertainty(env, {2, 0, 1}, 4);
  auto w = design_waveform(projector_from_basis(s.sensed_noise));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rb = rotate_basis(s.sensed_noise, random_unitary<double>(s.K_hat(), seed));
    auto wr = design_waveform(projector_from_basis(rb));
    CHECK(wr.column_index == w.column_index);
    CHECK((wr.samples - w.samples).norm() < 1e-9);
  }
}

TEST_CASE("phase and frequency offsets keep the selected column") {
  auto env = generate_environment(16, 5, BasisKind::RandomOrthonormal, 12);
  auto p = projector_from_basis(env.noise);
  CMatrix gamma = CMatrix::Zero(16, 16);
  const double nu = 0.013, phi0 = 0.7;
  for (Index i = 0; i < 16; ++i) gamma(i, i) = std::polar(1.0, 2.0 * std::numbers::pi * nu * static_cast<double>(i) + phi0);
  auto rotated = SubspaceBasisd(gamma * env.noise.columns());
  auto pr = projector_from_basis(rotated);
  CHECK((pr.matrix() - gamma * p.matrix() * gamma.adjoint()).norm() < 1e-10);
  CHECK((pr.diagonal() - p.diagonal()).norm() < 1e-12);
  CHECK(select_column(pr).index == select_column(p).index);
}

TEST_CASE("book entries carry unit power in the sensed noise subspace and bounded energy in Xi") {
  auto env = generate_environment(32, 12, BasisKind::Fourier, 21);
  auto s = apply_sensing_uncertainty(env, {3, 2, 1}, 22);
  auto book = waveform_book(projector_from_basis(s.sensed_noise));
  const double bound = static_cast<double>(s.spec.xi()) / static_cast<double>(s.K_hat()) + 1e-9;
  for (const auto& w : book) {
    REQUIRE(w.has_value());
    CHECK(std::abs((s.sensed_noise.columns().adjoint() * w->samples).norm() - 1.0) < 1e-10);
    CHECK((s.sensed_signal.columns().adjoint() * w->samples).norm() < 1e-9);
    CHECK((s.xi.columns().adjoint() * w->samples).squaredNorm() <= bound);
  }
}
