#include "nullcast/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace nullcast {

std::string_view to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::Fourier: return "fourier";
    case BasisKind::Canonical: return "canonical";
    case BasisKind::RandomOrthonormal: return "random";
  }
  return "unknown";
}

BasisKind parse_basis_kind(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "fourier") return BasisKind::Fourier;
  if (s == "canonical") return BasisKind::Canonical;
  if (s == "random" || s == "random_orthonormal" || s == "randomorthonormal") {
    return BasisKind::RandomOrthonormal;
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown basis kind '" + s + "'");
}

CMatrix basis_family(Index n, BasisKind kind, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::BadDimensions, "ambient dimension must be >= 1");
  switch (kind) {
    case BasisKind::Fourier: return dft_matrix<double>(n);
    case BasisKind::Canonical: return CMatrix::Identity(n, n);
    case BasisKind::RandomOrthonormal: return random_unitary<double>(n, seed);
  }
  throw Error(ErrorCode::BadDimensions, "unknown basis kind");
}

namespace {

SubspaceBasisd gather(const CMatrix& family, const std::vector<std::size_t>& idx) {
  CMatrix m(family.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) m.col(static_cast<Index>(j)) = family.col(static_cast<Index>(idx[j]));
  return SubspaceBasisd(std::move(m));
}

std::vector<std::size_t> concat(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Splits `from` into (kept, moved) with `count` moved entries picked by `rng`.
// Both parts keep the relative order of `from`.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_off(
    const std::vector<std::size_t>& from, std::size_t count, Rng& rng) {
  auto picks = rng.sample_without_replacement(from.size(), count);
  std::vector<bool> chosen(from.size(), false);
  for (auto p : picks) chosen[p] = true;
  std::vector<std::size_t> kept, moved;
  // Moved entries stay in draw order so the eps/delta split of Xi is random too.
  for (auto p : picks) moved.push_back(from[p]);
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (!chosen[i]) kept.push_back(from[i]);
  }
  return {kept, moved};
}

}  // namespace

Environment generate_environment(Index n, Index d, BasisKind kind, std::uint64_t seed) {
  if (n < 1 || d < 0 || d > n) {
    throw Error(ErrorCode::BadDimensions, "need 0 <= D <= N and N >= 1");
  }
  Rng rng(seed);
  const CMatrix family = basis_family(n, kind, rng.split(0).next_u64());
  Rng pick = rng.split(1);
  auto occupied = pick.sample_without_replacement(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
  std::sort(occupied.begin(), occupied.end());
  std::vector<std::size_t> available;
  for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
    if (!std::binary_search(occupied.begin(), occupied.end(), k)) available.push_back(k);
  }
  Environment env;
  env.kind = kind;
  env.signal = gather(family, occupied);
  env.noise = gather(family, available);
  env.signal_indices = std::move(occupied);
  env.noise_indices = std::move(available);
  return env;
}

SubspaceBasisd SensedEnvironment::xi_eps() const {
  return SubspaceBasisd(xi.columns().leftCols(static_cast<Index>(spec.eps)));
}

SensedEnvironment apply_sensing_uncertainty(const Environment& truth, const UncertaintySpec& spec,
                                            std::uint64_t seed) {
  const std::size_t d = truth.signal_indices.size();
  const std::size_t k = truth.noise_indices.size();
  if (spec.xi() > d) throw Error(ErrorCode::SpecInfeasible, "eps + delta exceeds the occupied DoF count");
  if (spec.false_alarms > k) throw Error(ErrorCode::SpecInfeasible, "false alarms exceed the available DoF count");

  // Rebuild the family columns from the stored bases so no seed bookkeeping is needed.
  const Index n = truth.ambient_dim();
  CMatrix family(n, n);
  for (std::size_t j = 0; j < d; ++j) family.col(static_cast<Index>(truth.signal_indices[j])) = truth.signal.column(static_cast<Index>(j));
  for (std::size_t j = 0; j < k; ++j) family.col(static_cast<Index>(truth.noise_indices[j])) = truth.noise.column(static_cast<Index>(j));

  Rng rng(seed);
  Rng pick_xi = rng.split(0);
  Rng pick_up = rng.split(1);
  auto [signal_kept, xi_idx] = split_off(truth.signal_indices, spec.xi(), pick_xi);
  auto [noise_kept, up_idx] = split_off(truth.noise_indices, spec.false_alarms, pick_up);

  SensedEnvironment s;
  s.kind = truth.kind;
  s.spec = spec;
  s.true_signal = gather(family, concat(signal_kept, xi_idx));
  s.true_noise = gather(family, concat(noise_kept, up_idx));
  s.sensed_signal_indices = concat(signal_kept, up_idx);
  s.sensed_noise_indices = concat(noise_kept, xi_idx);
  s.sensed_signal = gather(family, s.sensed_signal_indices);
  s.sensed_noise = gather(family, s.sensed_noise_indices);
  s.xi = gather(family, xi_idx);
  s.upsilon = gather(family, up_idx);
  s.xi_indices = std::move(xi_idx);
  s.upsilon_indices = std::move(up_idx);
  return s;
}

}  // namespace nullcast
