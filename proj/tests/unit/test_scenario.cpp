#include <doctest.h>

#include <algorithm>
#include <set>

#include "nullcast/scenario.hpp"

using namespace nullcast;

namespace {

bool same_projector(const SubspaceBasisd& a, const SubspaceBasisd& b) {
  return (projector_from_basis(a).matrix() - projector_from_basis(b).matrix()).norm() < 1e-10;
}

}  // namespace

TEST_CASE("basis kind parsing") {
  CHECK(parse_basis_kind("Fourier") == BasisKind::Fourier);
  CHECK(parse_basis_kind("canonical") == BasisKind::Canonical);
  CHECK(parse_basis_kind("random") == BasisKind::RandomOrthonormal);
  CHECK_THROWS_AS(parse_basis_kind("wavelet"), Error);
  CHECK(parse_basis_kind(to_string(BasisKind::RandomOrthonormal)) == BasisKind::RandomOrthonormal);
}

TEST_CASE("proof-of-concept size: N=32, D=12") {
  auto env = generate_environment(32, 12, BasisKind::Fourier, 1);
  CHECK(env.signal.dim() == 12);
  CHECK(env.noise.dim() == 20);
  CHECK(std::is_sorted(env.signal_indices.begin(), env.signal_indices.end()));
  // Columns really are the DFT columns named by the indices.
  const CMatrix f = dft_matrix<double>(32);
  for (std::size_t j = 0; j < 12; ++j) {
    CHECK((env.signal.column(static_cast<Index>(j)) - f.col(static_cast<Index>(env.signal_indices[j]))).norm() < 1e-15);
  }
  CHECK((env.signal.columns().adjoint() * env.noise.columns()).norm() < 1e-10);
}

TEST_CASE("64-dim setup leaves K=40") {
  auto env = generate_environment(64, 24, BasisKind::Fourier, 2);
  CHECK(env.noise.dim() == 40);
}

TEST_CASE("D=0 noise spans everything") {
  for (auto kind : {BasisKind::Fourier, BasisKind::Canonical, BasisKind::RandomOrthonormal}) {
    auto env = generate_environment(6, 0, kind, 3);
    CHECK(env.signal.dim() == 0);
    CHECK((projector_from_basis(env.noise).matrix() - CMatrix::Identity(6, 6)).norm() < 1e-10);
  }
}

TEST_CASE("generate_environment is seed deterministic and validates") {
  auto a = generate_environment(16, 5, BasisKind::RandomOrthonormal, 9);
  auto b = generate_environment(16, 5, BasisKind::RandomOrthonormal, 9);
  CHECK((a.signal.columns() - b.signal.columns()).norm() == 0.0);
  CHECK(a.signal_indices == b.signal_indices);
  CHECK_THROWS_AS(generate_environment(4, 5, BasisKind::Fourier, 0), Error);
  CHECK_THROWS_AS(generate_environment(4, -1, BasisKind::Fourier, 0), Error);
}

TEST_CASE("no uncertainty leaves sensed bases equal to truth") {
  auto env = generate_environment(16, 6, BasisKind::Fourier, 4);
  auto s = apply_sensing_uncertainty(env, {}, 1);
  CHECK(same_projector(s.sensed_signal, env.signal));
  CHECK(same_projector(s.sensed_noise, env.noise));
  CHECK(s.xi.dim() == 0);
  CHECK(s.upsilon.dim() == 0);
}

TEST_CASE("twelve misclassified DoF give K_hat=52") {
  auto env = generate_environment(64, 24, BasisKind::Fourier, 5);
  auto s = apply_sensing_uncertainty(env, {12, 0, 0}, 6);
  CHECK(s.K_hat() == 52);
  CHECK(s.D_hat() == 12);
  CHECK(s.xi.dim() == 12);
}

TEST_CASE("maximum uncertainty: every carrier sensed available") {
  auto env = generate_environment(32, 12, BasisKind::Fourier, 7);
  auto s = apply_sensing_uncertainty(env, {6, 6, 0}, 8);
  CHECK(s.K_hat() == 32);
  CHECK(s.D_hat() == 0);
  CHECK(s.xi_eps().dim() == 6);
}

TEST_CASE("dimension bookkeeping and orthogonality") {
  Rng r(10);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = 4 + static_cast<Index>(r.below(20));
    const Index d = static_cast<Index>(r.below(static_cast<std::size_t>(n) + 1));
    const auto kind = static_cast<BasisKind>(r.below(3));
    auto env = generate_environment(n, d, kind, r.next_u64());
    const std::size_t k = static_cast<std::size_t>(n - d);
    UncertaintySpec spec;
    spec.eps = r.below(static_cast<std::size_t>(d) + 1);
    spec.delta = r.below(static_cast<std::size_t>(d) - spec.eps + 1);
    spec.false_alarms = r.below(k + 1);
    auto s = apply_sensing_uncertainty(env, spec, r.next_u64());

    const Index D = d, K = n - d;
    const Index K_tilde = K - static_cast<Index>(spec.false_alarms);
    CHECK(s.D_hat() + s.K_hat() == n);
    CHECK(s.K_hat() == K_tilde + static_cast<Index>(spec.xi()));
    CHECK(s.D_hat() == D - static_cast<Index>(spec.xi()) + (K - K_tilde));
    CHECK(s.K_tilde() == K_tilde);
    if (s.D_hat() > 0 && s.K_hat() > 0) {
      CHECK((s.sensed_signal.columns().adjoint() * s.sensed_noise.columns()).norm() < 1e-9);
    }
    // Truth is preserved as a subspace, only relabeled.
    CHECK(same_projector(s.true_signal, env.signal));
    CHECK(same_projector(s.true_noise, env.noise));
    // Xi lies in the true signal, Upsilon in the true noise subspace.
    if (s.xi.dim() > 0) {
      CHECK((projector_from_basis(env.signal).matrix() * s.xi.columns() - s.xi.columns()).norm() < 1e-9);
    }
    if (s.upsilon.dim() > 0) {
      CHECK((projector_from_basis(env.noise).matrix() * s.upsilon.columns() - s.upsilon.columns()).norm() < 1e-9);
    }
  }
}

TEST_CASE("infeasible specs are rejected") {
  auto env = generate_environment(8, 3, BasisKind::Canonical, 0);
  try {
    apply_sensing_uncertainty(env, {2, 2, 0}, 0);
    FAIL("expected SpecInfeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SpecInfeasible);
  }
  CHECK_THROWS_AS(apply_sensing_uncertainty(env, {0, 0, 6}, 0), Error);
}

TEST_CASE("sensing is replayable per seed") {
  auto env = generate_environment(20, 8, BasisKind::Fourier, 1);
  auto a = apply_sensing_uncertainty(env, {2, 1, 3}, 55);
  auto b = apply_sensing_uncertainty(env, {2, 1, 3}, 55);
  CHECK(a.xi_indices == b.xi_indices);
  CHECK(a.upsilon_indices == b.upsilon_indices);
  std::set<std::size_t> xi(a.xi_indices.begin(), a.xi_indices.end());
  for (auto i : xi) CHECK(std::binary_search(env.signal_indices.begin(), env.signal_indices.end(), i));
}
