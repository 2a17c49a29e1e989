#ifndef NULLCAST_SIGNALING_HPP
#define NULLCAST_SIGNALING_HPP

#include <optional>
#include <vector>

#include "nullcast/subspace.hpp"

namespace nullcast {

inline constexpr double kDefaultTieTol = 1e-9;

struct ColumnSelection {
  Index index = 0;
  std::vector<Index> tie_set;  // every k with p_k >= p_max - tie_tol, ascending

  bool unique() const { return tie_set.size() == 1; }
};

/// Argmax of the projector diagonal; the lowest index wins a tie.
/// ZeroProjector if the projector has rank 0.
ColumnSelection select_column(const OrthoProjectord& p, double tie_tol = kDefaultTieTol);

/// Unit-energy shaping vector built from one projector column.
struct Waveform {
  CVector samples;
  Index column_index = 0;
  bool unique = true;
  std::vector<Index> tie_set;

  Index size() const { return samples.size(); }
};

/// (e_n^H P e_n)^{-1/2} P e_n, so sample n is real and positive.
/// DegenerateColumn when the nth diagonal entry is <= 1e-12.
Waveform design_waveform(const OrthoProjectord& p, Index n);

/// design_waveform at a select_column result, carrying its tie information.
Waveform design_waveform(const OrthoProjectord& p, const ColumnSelection& sel);
/// Same, at the select_column winner with the default tie tolerance.
inline Waveform design_waveform(const OrthoProjectord& p) { return design_waveform(p, select_column(p)); }

/// Total-least-squares route. Builds the extended data matrix T = [0 | Psi_S^H]
/// (D_hat x (N+1)), takes the null space V2 of T and drops its first row to get
/// V2~. Because e_0 always lies in that null space, the first-row predictor of
/// the textbook formula is identically zero here; the linear-predictor row is
/// therefore taken as the row c_n of V2~ with the largest norm and the waveform
/// is V2~ c_n^* / (c_n^H c_n), rescaled to unit energy with sample n real
/// positive. EmptyNullSpace when D_hat = N.
Waveform design_tls(const SubspaceBasisd& sensed_signal, double tie_tol = kDefaultTieTol);

/// Entry n is design_waveform(p, n), or empty when the nth diagonal is ~0.
using WaveformBook = std::vector<std::optional<Waveform>>;
WaveformBook waveform_book(const OrthoProjectord& p);

/// ||a a^H - b b^H||_F, the phase-blind distance between two unit vectors.
double rank1_distance(const CVector& a, const CVector& b);

/// |X[k]|^2 with X[k] = sum_n w[n] exp(-j 2 pi k n / n_fft), normalized to a
/// unit peak. BadFftSize unless n_fft >= N.
RVector psd(const CVector& w, Index n_fft);
inline RVector psd(const Waveform& w, Index n_fft) { return psd(w.samples, n_fft); }
/// 10 log10 of a linear power vector, floored at -400 dB.
RVector power_db(const RVector& linear);

/// Roots of the polynomial with coefficients c[0] z^m + ... + c[m]; leading and
/// trailing coefficients below 1e-12 of the largest are stripped first.
/// DegeneratePolynomial if every coefficient is ~0.
std::vector<Complex> polynomial_roots(const CVector& coeffs);

/// Zeros of the Z-transform sum_n w[n] z^{-n}.
std::vector<Complex> zeros(const CVector& w);
inline std::vector<Complex> zeros(const Waveform& w) { return zeros(w.samples); }

/// Zeros of the polynomial whose coefficients are the N-point carrier
/// amplitudes W[k] = N^{-1/2} sum_n w[n] exp(-j 2 pi k n / N). For a waveform
/// that uses every carrier with equal power these lie on one circle.
std::vector<Complex> spectral_zeros(const CVector& w);
inline std::vector<Complex> spectral_zeros(const Waveform& w) { return spectral_zeros(w.samples); }

}  // namespace nullcast

#endif  // NULLCAST_SIGNALING_HPP
