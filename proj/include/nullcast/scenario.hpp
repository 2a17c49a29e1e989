#ifndef NULLCAST_SCENARIO_HPP
#define NULLCAST_SCENARIO_HPP

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "nullcast/subspace.hpp"

namespace nullcast {

enum class BasisKind { Fourier, Canonical, RandomOrthonormal };

std::string_view to_string(BasisKind kind);
/// Accepts "fourier", "canonical", "random" / "random_orthonormal" (case-insensitive).
BasisKind parse_basis_kind(std::string_view text);

/// Full N x N unitary whose columns are the candidate DoF of the given family.
/// Fourier and Canonical ignore the seed.
CMatrix basis_family(Index n, BasisKind kind, std::uint64_t seed);

/// Counts of misclassified DoF at one node.
struct UncertaintySpec {
  std::size_t eps = 0;           // occupied, sensed available through sensing errors
  std::size_t delta = 0;         // occupied, sensed available through poor monitoring
  std::size_t false_alarms = 0;  // available, sensed occupied (K - K~)

  std::size_t xi() const { return eps + delta; }
};

/// Ground-truth partition of C^N into a D-dim signal and a K-dim noise subspace.
struct Environment {
  BasisKind kind = BasisKind::Fourier;
  SubspaceBasisd signal;
  SubspaceBasisd noise;
  // Column numbers within basis_family() (carrier numbers for Fourier), ascending.
  std::vector<std::size_t> signal_indices;
  std::vector<std::size_t> noise_indices;

  Index ambient_dim() const { return signal.ambient_dim(); }
};

/// Occupied columns are drawn uniformly without replacement from the family.
Environment generate_environment(Index n, Index d, BasisKind kind, std::uint64_t seed);

/// Truth plus the bases an opportunistic node senses. The sensed bases are
/// relabelings of true columns:
///   true signal  = [Psi~_S | Xi]      true noise  = [Psi~_N | Upsilon]
///   sensed signal = [Psi~_S | Upsilon] sensed noise = [Psi~_N | Xi]
/// Xi stores its eps columns first, then its delta columns.
struct SensedEnvironment {
  BasisKind kind = BasisKind::Fourier;
  UncertaintySpec spec;
  SubspaceBasisd true_signal;
  SubspaceBasisd true_noise;
  SubspaceBasisd sensed_signal;
  SubspaceBasisd sensed_noise;
  SubspaceBasisd xi;
  SubspaceBasisd upsilon;
  std::vector<std::size_t> sensed_signal_indices;
  std::vector<std::size_t> sensed_noise_indices;
  std::vector<std::size_t> xi_indices;
  std::vector<std::size_t> upsilon_indices;

  Index ambient_dim() const { return true_signal.ambient_dim(); }
  Index D() const { return true_signal.dim(); }
  Index K() const { return true_noise.dim(); }
  Index K_tilde() const { return K() - static_cast<Index>(spec.false_alarms); }
  Index D_hat() const { return sensed_signal.dim(); }
  Index K_hat() const { return sensed_noise.dim(); }

  /// Only the eps part of Xi (the DoF that carry interference both ways).
  SubspaceBasisd xi_eps() const;
};

/// SpecInfeasible when eps + delta > D or false_alarms > K.
SensedEnvironment apply_sensing_uncertainty(const Environment& truth, const UncertaintySpec& spec,
                                            std::uint64_t seed);

}  // namespace nullcast

#endif  // NULLCAST_SCENARIO_HPP
