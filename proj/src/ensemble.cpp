#include "qpl/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include "qpl/observables.hpp"
#include "qpl/space.hpp"

namespace qpl {
namespace {

struct ShotResult {
  ShotSummary summary;
  std::vector<double> series;  // row-major [n_rows][n_cols], empty on failure
};

int resolve_worker_count(int requested, int n_traj) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("QPL_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end == env || *end != '\0' || v <= 0 || v > 4096)
        throw std::invalid_argument("QPL_THREADS must be a positive integer");
      n = static_cast<int>(v);
    }
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  return std::clamp(n, 1, std::max(1, n_traj));
}

std::uint64_t checksum_record(const std::vector<double>& record) {
  return fnv1a64(record.data(), record.size() * sizeof(double));
}

// Inclusive row range with r·Δ inside [t_lo, t_hi]; empty() if none.
struct RowWindow {
  std::size_t first = 1, last = 0;
  bool empty() const { return last < first; }
};

RowWindow window_rows(std::size_t n_rows, double dt_row, double t_lo, double t_hi) {
  RowWindow w;
  bool found = false;
  for (std::size_t r = 0; r < n_rows; ++r) {
    const double t = static_cast<double>(r) * dt_row;
    if (t >= t_lo - 1e-9 && t <= t_hi + 1e-9) {
      if (!found) w.first = r;
      w.last = r;
      found = true;
    }
  }
  if (!found) w = RowWindow{};
  return w;
}

struct Windows {
  std::size_t n_rows = 0;
  std::size_t last = 0;          // final row
  std::size_t plateau_end = 0;   // last row with t ≤ ramp.t_off
  RowWindow plateau;             // rows with t in [plateau_begin, plateau_end]
  RowWindow late;                // rows in the last 20 plateau time units
};

Windows make_windows(const SystemParams& p, int decimation, std::size_t n_rows) {
  Windows w;
  w.n_rows = n_rows;
  w.last = n_rows - 1;
  const double dt_row = p.dt * static_cast<double>(decimation);
  const double begin = p.ramp.plateau_begin();
  const double end = p.ramp.plateau_end();
  w.plateau = window_rows(n_rows, dt_row, begin, end);
  w.late = window_rows(n_rows, dt_row, std::max(begin, end - 20.0), end);
  w.plateau_end = w.plateau.empty() ? w.last : w.plateau.last;
  if (w.plateau.empty()) w.plateau = RowWindow{0, w.last};
  if (w.late.empty()) w.late = RowWindow{w.plateau_end, w.plateau_end};
  return w;
}

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

void fill_parity_summary(ShotSummary& s, const Windows& w,
                         const std::vector<double>& mean_col,
                         const std::vector<double>& var_col) {
  s.final_mean_parity = mean_col[w.plateau_end];
  s.parity_sign = sign_of(s.final_mean_parity);
  s.final_var_parity = var_col[w.plateau_end];
  s.postoff_var_parity = var_col[w.last];
}

// Peak per-atom excited population: over every row, and again over plateau
// rows at least one time unit past the latest emission. A click resets the
// jumped site's cavity–atom mode, which rings back up underdamped (decay rate
// (κ²+γ²)/4, frequency ≈ g) and overshoots its quiescent level severalfold;
// the cascade forwards the ring to the downstream site near resonance. One
// unit is ~2.5 mode lifetimes, leaving sub-percent residual overshoot.
void fill_pop_summary(ShotSummary& s, const TrajectoryRecord& rec,
                      const Windows& w, double dt_row) {
  for (std::size_t row = 0; row < rec.n_rows; ++row)
    s.max_pop_e = std::max(s.max_pop_e, std::max(rec.obs_at(row, kObsPopE1),
                                                 rec.obs_at(row, kObsPopE2)));
  for (std::size_t row = w.plateau.first; row <= w.plateau.last; ++row) {
    const double t = static_cast<double>(row) * dt_row;
    bool settling = false;
    for (const JumpEvent& j : rec.jumps)
      if (t > j.t && t < j.t + 1.0) {
        settling = true;
        break;
      }
    if (settling) continue;
    s.max_pop_e_settled =
        std::max(s.max_pop_e_settled, std::max(rec.obs_at(row, kObsPopE1),
                                               rec.obs_at(row, kObsPopE2)));
  }
}

ShotResult run_physical_shot(const OperatorCatalog& catalog, const Ket& v0,
                             std::uint64_t seed, int decimation, const Windows& w) {
  ShotResult r;
  r.summary.seed = seed;
  const TrajectoryRecord rec = simulate(catalog, v0, seed, decimation);
  const std::size_t n_rows = rec.n_rows;
  const int n_cols = kTrajObsCount - 1;  // statistics drop the time column
  r.series.resize(n_rows * n_cols);
  for (std::size_t row = 0; row < n_rows; ++row)
    for (int c = 0; c < n_cols; ++c)
      r.series[row * n_cols + c] = rec.obs_at(row, c + 1);

  std::vector<double> mean_col(n_rows), var_col(n_rows);
  for (std::size_t row = 0; row < n_rows; ++row) {
    mean_col[row] = rec.obs_at(row, kObsMeanZZ);
    var_col[row] = rec.obs_at(row, kObsVarZZ);
  }
  ShotSummary& s = r.summary;
  fill_parity_summary(s, w, mean_col, var_col);

  // Each emission event flips the parity and with it the plateau level of the
  // homodyne rate, so the average restarts after the last event in the window.
  const double dt_row = catalog.params.dt * static_cast<double>(rec.decimation);
  std::size_t rate_first = w.late.first;
  for (const JumpEvent& j : rec.jumps) {
    if (j.t < static_cast<double>(w.late.first) * dt_row ||
        j.t > static_cast<double>(w.late.last) * dt_row)
      continue;
    const std::size_t after =  // first row sampling the post-event state
        static_cast<std::size_t>(std::floor(j.t / dt_row)) + 1;
    rate_first = std::max(rate_first, std::min(after, w.late.last));
  }
  double rate_sum = 0.0;
  for (std::size_t row = rate_first; row <= w.late.last; ++row)
    rate_sum += rec.obs_at(row, kObsHomodyneRate);
  s.plateau_rate_mean = rate_sum / static_cast<double>(w.late.last - rate_first + 1);

  s.n_jumps = static_cast<int>(rec.jumps.size());
  const double pb = catalog.params.ramp.plateau_begin();
  const double pe = catalog.params.ramp.plateau_end();
  for (const JumpEvent& j : rec.jumps)
    if (j.t >= pb - 1e-9 && j.t <= pe + 1e-9) ++s.n_jumps_plateau;

  s.var_xx_late_min = std::numeric_limits<double>::infinity();
  for (std::size_t row = w.late.first; row <= w.late.last; ++row)
    s.var_xx_late_min = std::min(s.var_xx_late_min, rec.obs_at(row, kObsVarXX));
  s.var_xx_postoff = rec.obs_at(w.last, kObsVarXX);
  fill_pop_summary(s, rec, w, dt_row);
  s.bell_plus_final = rec.obs_at(w.last, kObsBellPlus);
  s.bell_minus_final = rec.obs_at(w.last, kObsBellMinus);
  s.max_top_fock_pop = rec.max_top_fock_pop;
  s.record_checksum = checksum_record(rec.dY0);
  return r;
}

ShotResult run_ideal_shot(const SystemParams& params, std::uint64_t seed,
                          int decimation, const Windows& w) {
  ShotResult r;
  r.summary.seed = seed;
  const IdealTrajectory it =
      simulate_ideal(ReducedKet::uniform(), params, seed, decimation);
  const std::size_t n_rows = it.series.t.size();
  r.series.resize(n_rows * 2);
  for (std::size_t row = 0; row < n_rows; ++row) {
    r.series[row * 2 + 0] = it.series.mean_pi[row];
    r.series[row * 2 + 1] = it.series.var_pi[row];
  }
  fill_parity_summary(r.summary, w, it.series.mean_pi, it.series.var_pi);
  r.summary.record_checksum = checksum_record(it.record);
  return r;
}

ShotResult run_cross_shot(const OperatorCatalog& catalog, const Ket& v0,
                          std::uint64_t seed, int decimation, const Windows& w) {
  ShotResult r;
  r.summary.seed = seed;
  const TrajectoryRecord rec = simulate(catalog, v0, seed, decimation);
  r.summary.record_checksum = checksum_record(rec.dY0);
  const ReducedSeries rf =
      run_on_record(ReducedKet::uniform(), rec.dY0, catalog.params, decimation);
  r.summary.driven_checksum = checksum_record(rec.dY0);
  if (r.summary.driven_checksum != r.summary.record_checksum)
    throw std::logic_error("cross-driven shot: record changed while being consumed");
  if (rf.t.size() != rec.n_rows)
    throw std::logic_error("cross-driven shot: filter grids disagree");

  const std::size_t n_rows = rec.n_rows;
  r.series.resize(n_rows * 5);
  std::vector<double> mean_col(n_rows), var_col(n_rows);
  for (std::size_t row = 0; row < n_rows; ++row) {
    const double var_zz = rec.obs_at(row, kObsVarZZ);
    const double fre = fractional_residual_error(var_zz, rf.var_pi[row]);
    r.series[row * 5 + 0] = var_zz;
    r.series[row * 5 + 1] = rec.obs_at(row, kObsMeanZZ);
    r.series[row * 5 + 2] = rf.var_pi[row];
    r.series[row * 5 + 3] = rf.mean_pi[row];
    r.series[row * 5 + 4] = fre;
    mean_col[row] = rec.obs_at(row, kObsMeanZZ);
    var_col[row] = var_zz;
  }
  ShotSummary& s = r.summary;
  fill_parity_summary(s, w, mean_col, var_col);
  for (std::size_t row = 0; row < n_rows; ++row)
    s.max_fre = std::max(s.max_fre, r.series[row * 5 + 4]);
  double fre_sum = 0.0;
  for (std::size_t row = w.plateau.first; row <= w.plateau.last; ++row)
    fre_sum += r.series[row * 5 + 4];
  s.fre_plateau_mean = fre_sum / static_cast<double>(w.plateau.last - w.plateau.first + 1);

  s.n_jumps = static_cast<int>(rec.jumps.size());
  const double pb = catalog.params.ramp.plateau_begin();
  const double pe = catalog.params.ramp.plateau_end();
  for (const JumpEvent& j : rec.jumps)
    if (j.t >= pb - 1e-9 && j.t <= pe + 1e-9) ++s.n_jumps_plateau;
  fill_pop_summary(s, rec, w,
                   catalog.params.dt * static_cast<double>(rec.decimation));
  s.bell_plus_final = rec.obs_at(w.last, kObsBellPlus);
  s.bell_minus_final = rec.obs_at(w.last, kObsBellMinus);
  s.max_top_fock_pop = rec.max_top_fock_pop;
  return r;
}

}  // namespace

std::string to_string(EnsembleMode mode) {
  switch (mode) {
    case EnsembleMode::physical: return "physical";
    case EnsembleMode::ideal: return "ideal";
    case EnsembleMode::cross_driven: return "cross_driven";
  }
  throw std::logic_error("unknown ensemble mode");
}

EnsembleMode ensemble_mode_from_string(const std::string& name) {
  if (name == "physical") return EnsembleMode::physical;
  if (name == "ideal") return EnsembleMode::ideal;
  if (name == "cross_driven") return EnsembleMode::cross_driven;
  throw std::invalid_argument("unknown ensemble mode '" + name +
                              "' (expected physical | ideal | cross_driven)");
}

int EnsembleStats::column(const std::string& id) const {
  for (std::size_t i = 0; i < obs_ids.size(); ++i)
    if (obs_ids[i] == id) return static_cast<int>(i);
  throw std::invalid_argument("ensemble stats have no column '" + id + "'");
}

EnsembleStats run_ensemble(const EnsembleConfig& config) {
  config.params.validate();
  if (config.n_traj < 1)
    throw std::invalid_argument("ensemble needs n_traj >= 1");
  if (config.decimation < 1)
    throw std::invalid_argument("ensemble needs decimation >= 1");

  const SystemParams& p = config.params;
  const std::uint64_t n_steps = p.n_steps();
  const std::size_t n_rows =
      static_cast<std::size_t>(n_steps / static_cast<std::uint64_t>(config.decimation));
  if (n_rows == 0)
    throw std::invalid_argument("ensemble grid has no output rows; lower decimation");
  const Windows windows = make_windows(p, config.decimation, n_rows);

  EnsembleStats stats;
  stats.mode = config.mode;
  stats.params = p;
  stats.params_digest = params_digest(p);
  stats.decimation = config.decimation;
  switch (config.mode) {
    case EnsembleMode::physical: {
      const auto& ids = trajectory_observable_ids();
      stats.obs_ids.assign(ids.begin() + 1, ids.end());
      break;
    }
    case EnsembleMode::ideal:
      stats.obs_ids = {"mean_pi", "var_pi"};
      break;
    case EnsembleMode::cross_driven:
      stats.obs_ids = {"var_zz", "mean_zz", "var_rf_pi", "mean_rf_pi",
                       "fractional_residual_error"};
      break;
  }
  const std::size_t n_cols = stats.obs_ids.size();

  // The big-space catalog and initial state are shared, immutable inputs.
  const bool needs_catalog = config.mode != EnsembleMode::ideal;
  OperatorCatalog catalog;
  Ket v0;
  if (needs_catalog) {
    catalog = build_catalog(p);
    v0 = superposition_initial_state(catalog.space);
  }

  const int n_traj = config.n_traj;
  std::vector<ShotResult> slots(static_cast<std::size_t>(n_traj));
  std::atomic<int> next{0};
  std::atomic<int> failed{0};
  const double fail_limit = 0.01 * static_cast<double>(n_traj);

  auto worker = [&]() {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= n_traj) return;
      if (static_cast<double>(failed.load()) > fail_limit) return;
      const std::uint64_t seed = config.seed_base + static_cast<std::uint64_t>(k);
      ShotResult& slot = slots[static_cast<std::size_t>(k)];
      try {
        switch (config.mode) {
          case EnsembleMode::physical:
            slot = run_physical_shot(catalog, v0, seed, config.decimation, windows);
            break;
          case EnsembleMode::ideal:
            slot = run_ideal_shot(p, seed, config.decimation, windows);
            break;
          case EnsembleMode::cross_driven:
            slot = run_cross_shot(catalog, v0, seed, config.decimation, windows);
            break;
        }
      } catch (const std::exception& e) {
        slot.summary.seed = seed;
        slot.summary.failed = true;
        slot.summary.error = e.what();
        slot.series.clear();
        failed.fetch_add(1);
      }
    }
  };

  const int n_workers = resolve_worker_count(config.n_workers, n_traj);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  stats.n_failed = failed.load();
  if (static_cast<double>(stats.n_failed) > fail_limit) {
    std::string first;
    for (const ShotResult& s : slots)
      if (s.summary.failed) { first = s.summary.error; break; }
    throw std::runtime_error(
        "ensemble aborted: " + std::to_string(stats.n_failed) + " of " +
        std::to_string(n_traj) + " trajectories failed (limit 1%); first failure: " +
        first);
  }

  // Ordered reduction: identical arithmetic for any worker count.
  stats.t.resize(n_rows);
  for (std::size_t row = 0; row < n_rows; ++row)
    stats.t[row] = static_cast<double>(row) *
                   (p.dt * static_cast<double>(config.decimation));
  stats.mean.assign(n_rows * n_cols, 0.0);
  stats.stddev.assign(n_rows * n_cols, 0.0);
  const int n_ok = n_traj - stats.n_failed;
  if (n_ok > 0) {
    for (const ShotResult& s : slots) {
      if (s.summary.failed) continue;
      for (std::size_t i = 0; i < n_rows * n_cols; ++i) stats.mean[i] += s.series[i];
    }
    for (std::size_t i = 0; i < n_rows * n_cols; ++i)
      stats.mean[i] /= static_cast<double>(n_ok);
    if (n_ok > 1) {
      for (const ShotResult& s : slots) {
        if (s.summary.failed) continue;
        for (std::size_t i = 0; i < n_rows * n_cols; ++i) {
          const double d = s.series[i] - stats.mean[i];
          stats.stddev[i] += d * d;
        }
      }
      for (std::size_t i = 0; i < n_rows * n_cols; ++i)
        stats.stddev[i] = std::sqrt(stats.stddev[i] / static_cast<double>(n_ok - 1));
    }
  }
  stats.shots.reserve(slots.size());
  for (ShotResult& s : slots) stats.shots.push_back(std::move(s.summary));
  return stats;
}

MartingaleReport martingale_report(const EnsembleStats& stats) {
  MartingaleReport rep;
  const int n_ok = static_cast<int>(stats.shots.size()) - stats.n_failed;
  rep.sufficient = n_ok >= 2;
  if (!rep.sufficient) return rep;
  const int col = stats.column(stats.mode == EnsembleMode::ideal ? "mean_pi" : "mean_zz");
  const std::size_t n_rows = stats.t.size();
  rep.z.resize(n_rows, 0.0);
  const double m0 = stats.mean_at(0, col);
  const double root_n = std::sqrt(static_cast<double>(n_ok));
  bool ok = true;
  for (std::size_t row = 0; row < n_rows; ++row) {
    const double drift = stats.mean_at(row, col) - m0;
    const double se = stats.stddev_at(row, col) / root_n;
    double z = 0.0;
    if (drift != 0.0)
      z = se > 0.0 ? drift / se : std::copysign(std::numeric_limits<double>::infinity(), drift);
    rep.z[row] = z;
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(z));
    if (!(std::abs(z) < 3.0)) ok = false;
  }
  rep.pass = ok;
  return rep;
}

std::vector<ScalingRow> scaling_study(const SystemParams& base,
                                      const std::vector<double>& g_scales,
                                      const std::vector<double>& alpha_kappa_scales,
                                      int n_traj, std::uint64_t seed_base,
                                      int n_workers) {
  if (!(base.alpha_max > 0.0))
    throw std::invalid_argument(
        "scaling study needs alpha_max > 0: with the probe off no measurement "
        "occurs and the discrepancy is undefined");
  if (n_traj < 1) throw std::invalid_argument("scaling study needs n_traj >= 1");
  for (double s : g_scales)
    if (!(s >= 1.0)) throw std::invalid_argument("scale factors must be >= 1");
  for (double s : alpha_kappa_scales)
    if (!(s >= 1.0)) throw std::invalid_argument("scale factors must be >= 1");

  std::vector<ScalingRow> rows;
  std::map<std::uint64_t, std::pair<double, int>> cache;  // digest → (discrepancy, n_failed)

  auto run_cell = [&](const std::string& branch, double scale, SystemParams p) {
    p.validate();
    ScalingRow row;
    row.branch = branch;
    row.scale = scale;
    row.g = p.g;
    row.alpha_max = p.alpha_max;
    row.kappa2_half = p.kappa2_half;
    row.n_traj = n_traj;
    const std::uint64_t digest = params_digest(p);
    const auto hit = cache.find(digest);
    if (hit != cache.end()) {
      row.discrepancy = hit->second.first;
      row.n_failed = hit->second.second;
    } else {
      EnsembleConfig cfg;
      cfg.mode = EnsembleMode::cross_driven;
      cfg.n_traj = n_traj;
      cfg.seed_base = seed_base;
      cfg.n_workers = n_workers;
      cfg.params = p;
      EnsembleStats stats;
      try {
        stats = run_ensemble(cfg);
      } catch (const std::exception& e) {
        throw std::runtime_error(branch + " branch, scale " + std::to_string(scale) +
                                 ": " + e.what() +
                                 " (if this is truncation leakage, raise fock_dim)");
      }
      const int col = stats.column("fractional_residual_error");
      const Windows w = make_windows(p, cfg.decimation, stats.t.size());
      double sum = 0.0;
      for (std::size_t r = w.plateau.first; r <= w.plateau.last; ++r)
        sum += stats.mean_at(r, col);
      row.discrepancy = sum / static_cast<double>(w.plateau.last - w.plateau.first + 1);
      row.n_failed = stats.n_failed;
      cache.emplace(digest, std::make_pair(row.discrepancy, row.n_failed));
    }
    rows.push_back(row);
  };

  for (double s : g_scales) {
    SystemParams p = base;
    p.g = base.g * s;
    run_cell("g", s, p);
  }
  for (double s : alpha_kappa_scales) {
    SystemParams p = base;
    p.alpha_max = base.alpha_max * std::sqrt(s);
    p.kappa2_half = base.kappa2_half * s;
    p.g = base.g * s * std::sqrt(s);
    run_cell("alpha_kappa", s, p);
  }
  return rows;
}

}  // namespace qpl
