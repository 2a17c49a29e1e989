#include "nullcast/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

namespace nullcast {

Rate wilson(long k, long n, double z) {
  if (n <= 0) throw Error(ErrorCode::EmptyInput, "rate over zero observations");
  Rate r;
  r.successes = k;
  r.total = n;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
  const double half = z / (1.0 + z2 / nn) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  r.value = p;
  // The bounds are exactly 0 and 1 at the ends.
  r.lo = k == 0 ? 0.0 : std::max(0.0, centre - half);
  r.hi = k == n ? 1.0 : std::min(1.0, centre + half);
  return r;
}

std::vector<RocPoint> aggregate_roc(const std::vector<RocRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no records to aggregate");
  struct Acc {
    long det = 0, eff = 0, fa = 0, exc = 0;
    Index trials = 0;
  };
  std::map<std::tuple<double, Index, double>, Acc> groups;
  for (const auto& r : records) {
    auto& a = groups[{r.ep_n0_db, r.q, r.p_fa}];
    a.det += r.detected;
    a.eff += r.effective;
    a.fa += r.false_alarms;
    a.exc += r.excess;
    ++a.trials;
  }
  std::vector<RocPoint> out;
  for (const auto& [key, a] : groups) {
    RocPoint pt;
    std::tie(pt.ep_n0_db, pt.q, pt.p_fa) = key;
    pt.p_d = wilson(a.det, a.eff);
    pt.p_md = pt.p_d;
    pt.p_md.successes = a.eff - a.det;
    pt.p_md.value = 1.0 - pt.p_d.value;
    pt.p_md.lo = 1.0 - pt.p_d.hi;
    pt.p_md.hi = 1.0 - pt.p_d.lo;
    pt.p_fa_emp = a.exc > 0 ? wilson(a.fa, a.exc) : Rate{};
    pt.n_trials = a.trials;
    out.push_back(pt);
  }
  return out;
}

CVector simulate_mean_coefficients(const CVector& signal, const RVector& variance, Index q, Rng& rng) {
  if (signal.size() != variance.size()) throw Error(ErrorCode::DimensionMismatch, "one variance per dimension");
  if (q < 1) throw Error(ErrorCode::BadDimensions, "block length must be >= 1");
  CVector u(signal.size());
  for (Index d = 0; d < u.size(); ++d) u(d) = signal(d) + rng.complex_normal(variance(d) / static_cast<double>(q));
  return u;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("NULLCAST_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = count;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

constexpr double kNoiseDensity = 1.0;

// Everything about one trial that does not depend on Ep/N0, Q or P_FA.
struct TrialSetup {
  MismatchGeometry geom;
  SubspaceBasisd tx;
  SubspaceBasisd rx;
  Index column = 0;      // projector column both ends use
  Waveform phi_t;
  CVector sig_r;         // B_R^H phi_T
  CVector ref_r;         // B_R^H of the receiver's own book entry at `column`
  CVector ref_t;         // B_T^H phi_T
  RVector var_r;         // per-dim noise plus interference variance at the receiver
};

TrialSetup make_trial(const ExperimentConfig& cfg, const Rng& trial_rng) {
  TrialSetup s;
  s.geom = build_pairwise(cfg.n, cfg.k0, cfg.kappa_t, cfg.kappa_r, cfg.eps_r, cfg.basis_kind,
                          trial_rng.split(0).next_u64());
  s.tx = s.geom.tx_noise();
  s.rx = s.geom.rx_noise();
  const auto pt = projector_from_basis(s.tx);
  // Ties are broken uniformly at random, as a node with an ambiguous diagonal would.
  const auto sel = select_column(pt);
  Rng pick = trial_rng.split(1);
  s.column = sel.tie_set[pick.below(sel.tie_set.size())];
  s.phi_t = design_waveform(pt, s.column);
  s.sig_r = s.rx.columns().adjoint() * s.phi_t.samples;
  s.ref_t = s.tx.columns().adjoint() * s.phi_t.samples;
  try {
    s.ref_r = s.rx.columns().adjoint() * design_waveform(projector_from_basis(s.rx), s.column).samples;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateColumn) throw;
    s.ref_r = CVector::Zero(s.rx.dim());
  }
  s.var_r = RVector::Constant(s.rx.dim(), kNoiseDensity);
  for (Index j = 0; j < cfg.eps_r; ++j) s.var_r(cfg.k0 + j) += cfg.inr_bar * kNoiseDensity;
  return s;
}

double amplitude(double ep_n0_db) {
  ChannelParams p;
  p.noise_density = kNoiseDensity;
  p.ep_over_n0_db = ep_n0_db;
  return p.gain * std::sqrt(p.pulse_energy());
}

std::vector<std::pair<double, Index>> snr_q_grid(const ExperimentConfig& cfg) {
  std::vector<std::pair<double, Index>> g;
  for (double e : cfg.ep_over_n0_db) {
    for (Index q : cfg.q_list) g.emplace_back(e, q);
  }
  return g;
}

std::vector<bool> threshold(const RVector& stats, double gamma) {
  std::vector<bool> sel(static_cast<std::size_t>(stats.size()));
  for (Index d = 0; d < stats.size(); ++d) sel[static_cast<std::size_t>(d)] = stats(d) > gamma;
  return sel;
}

// Selected counts among the first `k0` entries and among the rest.
std::pair<Index, Index> split_counts(const std::vector<bool>& sel, Index k0) {
  Index in = 0, out = 0;
  for (std::size_t d = 0; d < sel.size(); ++d) {
    if (!sel[d]) continue;
    (static_cast<Index>(d) < k0 ? in : out) += 1;
  }
  return {in, out};
}

template <typename Record>
std::vector<Record> run_trials(const ExperimentConfig& cfg,
                               const std::function<std::vector<Record>(Index, const Rng&)>& trial) {
  const auto count = static_cast<std::size_t>(cfg.trials);
  std::vector<std::vector<Record>> per(count);
  const Rng root(cfg.seed);
  parallel_for(count, [&](std::size_t t) { per[t] = trial(static_cast<Index>(t), root.split(t)); });
  std::vector<Record> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace

std::vector<RocRecord> simulate_rx_identification(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto grid = snr_q_grid(cfg);
  return run_trials<RocRecord>(cfg, [&](Index t, const Rng& tr) {
    const TrialSetup s = make_trial(cfg, tr);
    std::vector<RocRecord> out;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto [ep, q] = grid[g];
      Rng noise = tr.split(2).split(g);
      const CVector u = simulate_mean_coefficients(amplitude(ep) * s.sig_r, s.var_r, q, noise);
      const RVector stats = coherent_statistics(u, s.ref_r);
      for (double p_fa : cfg.p_fa_list) {
        const auto thr = np_threshold(statistic_variance(kNoiseDensity), q, p_fa);
        const auto [in, extra] = split_counts(threshold(stats, thr.gamma), cfg.k0);
        out.push_back({ep, q, p_fa, t, in, cfg.k0, extra, s.rx.dim() - cfg.k0});
      }
    }
    return out;
  });
}

std::vector<ConcurrenceRecord> simulate_concurrence(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto grid = snr_q_grid(cfg);
  return run_trials<ConcurrenceRecord>(cfg, [&](Index t, const Rng& tr) {
    const TrialSetup s = make_trial(cfg, tr);
    const SingletonDictionary tx_dict(s.tx), rx_dict(s.rx);
    const CMatrix cross = s.tx.columns().adjoint() * s.rx.columns();  // B_T^H B_R
    const RMatrix overlap = cross.cwiseAbs2();
    const RVector var_t = RVector::Constant(s.tx.dim(), kNoiseDensity);
    const CVector zero_t = CVector::Zero(s.tx.dim());
    const std::vector<bool> truth = [&] {
      std::vector<bool> v(static_cast<std::size_t>(s.rx.dim()), false);
      for (Index d = 0; d < cfg.k0; ++d) v[static_cast<std::size_t>(d)] = true;
      return v;
    }();

    std::vector<ConcurrenceRecord> out;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto [ep, q] = grid[g];
      const double a = amplitude(ep);
      Rng fwd = tr.split(2).split(g);
      Rng rev = tr.split(3).split(g);
      const CVector u_r = simulate_mean_coefficients(a * s.sig_r, s.var_r, q, fwd);
      const RVector stats_r = coherent_statistics(u_r, s.ref_r);
      const CVector z_t = simulate_mean_coefficients(zero_t, var_t, q, rev);

      SparseSelection last;
      std::vector<bool> last_coop;
      for (double p_fa : cfg.p_fa_list) {
        const auto thr = np_threshold(statistic_variance(kNoiseDensity), q, p_fa);
        SparseSelection rx_sel;
        rx_sel.n = cfg.n;
        if (cfg.ideal_receiver) {
          rx_sel.lambda = truth;
          rx_sel.alpha = s.column;
        } else {
          rx_sel.lambda = threshold(stats_r, thr.gamma);
          rx_sel.alpha = best_column_from_coefficients(s.rx, rx_sel.lambda, u_r);
        }

        // Cooperative: the transmitter decodes the feedback message.
        if (last_coop.empty() || rx_sel.lambda != last.lambda || rx_sel.alpha != last.alpha) {
          const auto f = deserialize(serialize(build_feedback(rx_sel, receiver_filter(rx_dict, rx_sel))));
          last_coop = coop_concur(f, tx_dict).pi;
          last = rx_sel;
        }
        const std::vector<bool>& coop = last_coop;

        // Noncooperative: the receiver answers with P~ e_alpha / ||.|| over its
        // selected dims; the transmitter re-runs the detector on it.
        CVector rev_coeff = CVector::Zero(s.rx.dim());
        if (rx_sel.alpha) {
          double p = 0.0;
          for (Index d = 0; d < s.rx.dim(); ++d) {
            if (!rx_sel.lambda[static_cast<std::size_t>(d)]) continue;
            rev_coeff(d) = std::conj(s.rx.columns()(*rx_sel.alpha, d));
            p += std::norm(rev_coeff(d));
          }
          rev_coeff = p > 1e-12 ? CVector(rev_coeff / std::sqrt(p)) : CVector(CVector::Zero(s.rx.dim()));
        }
        const CVector u_t = a * (cross * rev_coeff) + z_t;
        const std::vector<bool> noncoop = threshold(coherent_statistics(u_t, s.ref_t), thr.gamma);

        ConcurrenceRecord r;
        r.ep_n0_db = ep;
        r.q = q;
        r.p_fa = p_fa;
        r.trial = t;
        std::tie(r.rx_detected, r.rx_false) = split_counts(rx_sel.lambda, cfg.k0);
        std::tie(r.nc_detected, r.nc_false) = split_counts(noncoop, cfg.k0);
        std::tie(r.co_detected, r.co_false) = split_counts(coop, cfg.k0);
        r.chordal_nc = consensus_distance(noncoop, rx_sel.lambda, overlap);
        r.chordal_co = consensus_distance(coop, rx_sel.lambda, overlap);
        out.push_back(r);
      }
    }
    return out;
  });
}

std::vector<DetectRecord> simulate_detection(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto grid = snr_q_grid(cfg);
  return run_trials<DetectRecord>(cfg, [&](Index t, const Rng& tr) {
    const TrialSetup s = make_trial(cfg, tr);
    const auto book = waveform_book(projector_from_basis(s.rx));
    std::vector<DetectRecord> out;
    std::size_t idx = 0;
    for (const auto& [ep, q] : grid) {
      for (Index e = 0; e <= cfg.eps_r; ++e, ++idx) {
        MismatchGeometry g = s.geom;
        g.eps_r = e;
        ChannelParams p;
        p.noise_density = kNoiseDensity;
        p.inr_bar = cfg.inr_bar;
        p.ep_over_n0_db = ep;
        p.tx_power = p.pulse_energy();
        const auto block = simulate_received(g, p, q, s.phi_t, tr.split(2).split(idx).next_u64());
        DetectRecord r;
        r.ep_n0_db = ep;
        r.q = q;
        r.eps_r = e;
        r.trial = t;
        r.correct = detect_waveform(block.frames, book) == s.column;
        r.gamma_unc_db = 10.0 * std::log10(snr_with_uncertainty(p, g).gamma_unc());
        out.push_back(r);
      }
    }
    return out;
  });
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string CsvTable::to_string() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(columns);
  for (const auto& r : rows) line(r);
  return os.str();
}

void write_csv(const CsvTable& table, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  f << table.to_string();
  f.flush();
  if (!f) throw Error(ErrorCode::IoError, "write to " + path + " failed");
}

namespace {

using Params = std::vector<std::string>;

struct Tables {
  ExperimentOutput out;

  Tables(const std::vector<std::string>& params, bool monte_carlo) {
    out.aggregate.columns = params;
    for (const char* c : {"metric", "value", "ci_low", "ci_high", "n_trials"}) out.aggregate.columns.emplace_back(c);
    if (monte_carlo) {
      out.raw.columns = params;
      for (const char* c : {"trial", "metric", "value"}) out.raw.columns.emplace_back(c);
    }
  }

  void add(Params p, const std::string& metric, double value, double lo, double hi, Index n) {
    p.push_back(metric);
    for (double x : {value, lo, hi}) p.push_back(format_number(x));
    p.push_back(std::to_string(n));
    out.aggregate.rows.push_back(std::move(p));
  }
  void add(const Params& p, const std::string& metric, double value) { add(p, metric, value, value, value, 1); }
  void add(const Params& p, const std::string& metric, const Rate& r, Index n) { add(p, metric, r.value, r.lo, r.hi, n); }
  void raw(Params p, Index trial, const std::string& metric, double value) {
    p.push_back(std::to_string(trial));
    p.push_back(metric);
    p.push_back(format_number(value));
    out.raw.rows.push_back(std::move(p));
  }
};

// Mean with a normal-approximation 95% interval.
struct MeanCi {
  double sum = 0.0, sum2 = 0.0;
  Index n = 0;
  void add(double x) {
    sum += x;
    sum2 += x * x;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double half() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sum2 - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
    return kZ95 * std::sqrt(var / static_cast<double>(n));
  }
};

Params point_params(double ep, Index q, double p_fa) {
  return {format_number(ep), std::to_string(q), format_number(p_fa)};
}

ExperimentOutput run_psd(const ExperimentConfig& cfg) {
  Tables tb({"case", "bin", "frequency", "carrier", "occupied"}, false);
  const auto env = generate_environment(cfg.n, cfg.d, cfg.basis_kind, cfg.seed);
  std::vector<std::pair<std::string, UncertaintySpec>> cases{{"perfect", {}}};
  const UncertaintySpec unc{static_cast<std::size_t>(cfg.eps), static_cast<std::size_t>(cfg.delta),
                            static_cast<std::size_t>(cfg.false_alarms)};
  if (unc.xi() > 0 || unc.false_alarms > 0) cases.emplace_back("uncertain", unc);
  const Index n_fft = cfg.n * cfg.fft_oversample;
  for (const auto& [name, spec] : cases) {
    const auto sensed = apply_sensing_uncertainty(env, spec, Rng(cfg.seed).split(1).next_u64());
    const auto w = design_waveform(projector_from_basis(sensed.sensed_noise));
    const RVector db = power_db(psd(w, n_fft));
    for (Index k = 0; k < n_fft; ++k) {
      Index carrier = -1;
      int occupied = -1;
      if (k % cfg.fft_oversample == 0) {
        carrier = k / cfg.fft_oversample;
        const auto& occ = env.signal_indices;
        occupied = std::find(occ.begin(), occ.end(), static_cast<std::size_t>(carrier)) != occ.end() ? 1 : 0;
      }
      tb.add({name, std::to_string(k), format_number(static_cast<double>(k) / static_cast<double>(n_fft)),
              std::to_string(carrier), std::to_string(occupied)},
             "psd_db", db(k));
    }
  }
  return tb.out;
}

ExperimentOutput run_zplane(const ExperimentConfig& cfg) {
  Tables tb({"case", "domain", "index"}, false);
  const auto env = generate_environment(cfg.n, cfg.d, cfg.basis_kind, cfg.seed);
  const std::vector<std::pair<std::string, UncertaintySpec>> cases{
      {"none", {}}, {"maximum", {static_cast<std::size_t>(cfg.d), 0, 0}}};
  for (const auto& [name, spec] : cases) {
    const auto sensed = apply_sensing_uncertainty(env, spec, Rng(cfg.seed).split(1).next_u64());
    const auto w = design_waveform(projector_from_basis(sensed.sensed_noise));
    for (const auto& [domain, z] : {std::pair{std::string("time"), zeros(w)},
                                    std::pair{std::string("spectral"), spectral_zeros(w)}}) {
      for (std::size_t i = 0; i < z.size(); ++i) {
        const Params p{name, domain, std::to_string(i)};
        tb.add(p, "re", z[i].real());
        tb.add(p, "im", z[i].imag());
        tb.add(p, "radius", std::abs(z[i]));
        tb.add(p, "angle_rad", std::arg(z[i]));
      }
    }
  }
  return tb.out;
}

ExperimentOutput run_loss_grid(const ExperimentConfig& cfg) {
  Tables tb({"rho_t", "rho_r"}, false);
  const double k0 = static_cast<double>(cfg.k0);
  for (Index i = 0; i < cfg.grid_steps; ++i) {
    for (Index j = 0; j < cfg.grid_steps; ++j) {
      const double rt = static_cast<double>(i) / static_cast<double>(cfg.grid_steps - 1);
      const double rr = static_cast<double>(j) / static_cast<double>(cfg.grid_steps - 1);
      const Params p{format_number(rt), format_number(rr)};
      tb.add(p, "loss_db", 20.0 * std::log10(mismatch_loss(rt, rr)));
      // A Fourier geometry realizes the point when rho K0 is a whole number of dims.
      const double kt = rt * k0, kr = rr * k0;
      if (std::abs(kt - std::round(kt)) < 1e-9 && std::abs(kr - std::round(kr)) < 1e-9 &&
          cfg.k0 + std::lround(kt) + std::lround(kr) <= cfg.n) {
        const auto g = build_pairwise(cfg.n, cfg.k0, std::lround(kt), std::lround(kr), 0, BasisKind::Fourier, cfg.seed);
        tb.add(p, "loss_db_measured", 20.0 * std::log10(matched_filter_gain(g)));
      }
    }
  }
  return tb.out;
}

ExperimentOutput run_detect_prob(const ExperimentConfig& cfg) {
  Tables tb({"ep_n0_db", "Q", "eps_r"}, true);
  const auto records = simulate_detection(cfg);
  struct Acc {
    long hits = 0, n = 0;
    double gamma_db = 0.0;
  };
  std::map<std::tuple<double, Index, Index>, Acc> groups;
  for (const auto& r : records) {
    auto& a = groups[{r.ep_n0_db, r.q, r.eps_r}];
    a.hits += r.correct ? 1 : 0;
    ++a.n;
    a.gamma_db = r.gamma_unc_db;
    if (cfg.raw) {
      tb.raw({format_number(r.ep_n0_db), std::to_string(r.q), std::to_string(r.eps_r)}, r.trial, "correct",
             r.correct ? 1.0 : 0.0);
    }
  }
  for (const auto& [key, a] : groups) {
    const auto& [ep, q, e] = key;
    const Params p{format_number(ep), std::to_string(q), std::to_string(e)};
    tb.add(p, "gamma_unc_db", a.gamma_db);
    tb.add(p, "p_detect", wilson(a.hits, a.n), a.n);
  }
  return tb.out;
}

void add_roc(Tables& tb, const std::vector<RocRecord>& records, bool with_pd) {
  for (const auto& pt : aggregate_roc(records)) {
    const Params p = point_params(pt.ep_n0_db, pt.q, pt.p_fa);
    if (with_pd) tb.add(p, "p_d", pt.p_d, pt.n_trials);
    tb.add(p, "p_md", pt.p_md, pt.n_trials);
    tb.add(p, "p_fa_emp", pt.p_fa_emp, pt.n_trials);
  }
}

ExperimentOutput run_rx_roc(const ExperimentConfig& cfg) {
  Tables tb({"ep_n0_db", "Q", "p_fa"}, true);
  const auto records = simulate_rx_identification(cfg);
  if (cfg.raw) {
    for (const auto& r : records) {
      const Params p = point_params(r.ep_n0_db, r.q, r.p_fa);
      tb.raw(p, r.trial, "detected", static_cast<double>(r.detected));
      tb.raw(p, r.trial, "false_alarms", static_cast<double>(r.false_alarms));
    }
  }
  add_roc(tb, records, true);
  return tb.out;
}

std::vector<RocRecord> tx_roc(const ExperimentConfig& cfg, const std::vector<ConcurrenceRecord>& recs, bool coop) {
  std::vector<RocRecord> out;
  out.reserve(recs.size());
  for (const auto& r : recs) {
    out.push_back({r.ep_n0_db, r.q, r.p_fa, r.trial, coop ? r.co_detected : r.nc_detected, cfg.k0,
                   coop ? r.co_false : r.nc_false, cfg.kappa_t});
  }
  return out;
}

ExperimentOutput run_concurrence(const ExperimentConfig& cfg) {
  const bool per_scheme = cfg.experiment == Experiment::DofCountTx || cfg.experiment == Experiment::Chordal;
  std::vector<std::string> params{"ep_n0_db", "Q", "p_fa"};
  if (per_scheme) params.insert(params.begin(), "scheme");
  Tables tb(params, true);
  const auto recs = simulate_concurrence(cfg);

  if (!per_scheme) {
    const bool coop = cfg.experiment == Experiment::CrocCoop;
    const auto roc = tx_roc(cfg, recs, coop);
    if (cfg.raw) {
      for (const auto& r : roc) {
        const Params p = point_params(r.ep_n0_db, r.q, r.p_fa);
        tb.raw(p, r.trial, "detected", static_cast<double>(r.detected));
        tb.raw(p, r.trial, "false_alarms", static_cast<double>(r.false_alarms));
      }
    }
    add_roc(tb, roc, false);
    return tb.out;
  }

  const bool dof = cfg.experiment == Experiment::DofCountTx;
  for (const bool coop : {false, true}) {
    const std::string scheme = coop ? "coop" : "noncoop";
    std::map<std::tuple<double, Index, double>, std::pair<MeanCi, MeanCi>> groups;
    for (const auto& r : recs) {
      auto& [m1, m2] = groups[{r.ep_n0_db, r.q, r.p_fa}];
      Params p = point_params(r.ep_n0_db, r.q, r.p_fa);
      p.insert(p.begin(), scheme);
      if (dof) {
        const double eff = static_cast<double>(coop ? r.co_detected : r.nc_detected);
        const double all = eff + static_cast<double>(coop ? r.co_false : r.nc_false);
        m1.add(eff);
        m2.add(all);
        if (cfg.raw) tb.raw(p, r.trial, "effective_dof", eff);
      } else {
        const double d = coop ? r.chordal_co : r.chordal_nc;
        m1.add(d);
        if (cfg.raw) tb.raw(p, r.trial, "chordal_norm", d);
      }
    }
    for (const auto& [key, m] : groups) {
      const auto& [ep, q, p_fa] = key;
      Params p = point_params(ep, q, p_fa);
      p.insert(p.begin(), scheme);
      const auto& [m1, m2] = m;
      if (dof) {
        tb.add(p, "effective_dof", m1.mean(), m1.mean() - m1.half(), m1.mean() + m1.half(), m1.n);
        tb.add(p, "identified_dof", m2.mean(), m2.mean() - m2.half(), m2.mean() + m2.half(), m2.n);
      } else {
        tb.add(p, "chordal_norm", m1.mean(), m1.mean() - m1.half(), m1.mean() + m1.half(), m1.n);
      }
    }
  }
  return tb.out;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  switch (cfg.experiment) {
    case Experiment::Psd: return run_psd(cfg);
    case Experiment::Zplane: return run_zplane(cfg);
    case Experiment::LossGrid: return run_loss_grid(cfg);
    case Experiment::DetectProb: return run_detect_prob(cfg);
    case Experiment::RocRx:
    case Experiment::PmdVsSnr: return run_rx_roc(cfg);
    case Experiment::CrocNoncoop:
    case Experiment::CrocCoop:
    case Experiment::DofCountTx:
    case Experiment::Chordal: return run_concurrence(cfg);
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown experiment");
}

}  // namespace nullcast
