#include "qpl/record_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace qpl {
namespace {

constexpr char kMagic[4] = {'Q', 'P', 'T', 'R'};
constexpr std::uint32_t kVersion = 1;

void put(std::string& out, const void* data, std::size_t n) {
  out.append(static_cast<const char*>(data), n);
}
template <typename T>
void put_value(std::string& out, T v) {
  put(out, &v, sizeof(T));
}

struct Reader {
  explicit Reader(const std::filesystem::path& path) : in(path, std::ios::binary) {
    if (!in) throw std::runtime_error("cannot open record file " + path.string());
  }
  void read(void* data, std::size_t n) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (in.gcount() != static_cast<std::streamsize>(n))
      throw std::runtime_error("record file truncated");
  }
  template <typename T>
  T value() {
    T v{};
    read(&v, sizeof(T));
    return v;
  }
  std::ifstream in;
};

void write_file(const std::filesystem::path& path, const std::string& bytes,
                bool binary) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string sanitize_csv_field(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  return s;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_record(const std::filesystem::path& path, const TrajectoryRecord& rec) {
  if (rec.obs.size() != rec.n_rows * rec.obs_ids.size())
    throw std::invalid_argument("record observable table has inconsistent shape");
  std::string out;
  out.reserve(64 + rec.dY0.size() * sizeof(double) + rec.obs.size() * sizeof(double));
  put(out, kMagic, sizeof kMagic);
  put_value(out, kVersion);
  put_value(out, rec.params_digest);
  put_value(out, rec.seed);
  put_value(out, rec.dt);
  put_value(out, rec.n_steps);
  put_value(out, static_cast<std::uint32_t>(rec.decimation));
  put_value(out, static_cast<std::uint32_t>(rec.obs_ids.size()));
  put_value(out, rec.n_rows);
  put_value(out, static_cast<std::uint64_t>(rec.jumps.size()));
  put_value(out, rec.max_top_fock_pop);
  for (const std::string& id : rec.obs_ids) {
    put_value(out, static_cast<std::uint32_t>(id.size()));
    put(out, id.data(), id.size());
  }
  if (rec.dY0.size() != rec.n_steps)
    throw std::invalid_argument("record dY0 length does not match n_steps");
  put(out, rec.dY0.data(), rec.dY0.size() * sizeof(double));
  for (const JumpEvent& j : rec.jumps) {
    put_value(out, j.t);
    put_value(out, static_cast<std::uint32_t>(j.channel));
  }
  put(out, rec.obs.data(), rec.obs.size() * sizeof(double));
  write_file(path, out, true);
}

TrajectoryRecord read_record(const std::filesystem::path& path) {
  Reader r(path);
  char magic[4];
  r.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error(path.string() + " is not a trajectory record");
  const auto version = r.value<std::uint32_t>();
  if (version != kVersion)
    throw std::runtime_error("unsupported record version " + std::to_string(version));
  TrajectoryRecord rec;
  rec.params_digest = r.value<std::uint64_t>();
  rec.seed = r.value<std::uint64_t>();
  rec.dt = r.value<double>();
  rec.n_steps = r.value<std::uint64_t>();
  rec.decimation = static_cast<int>(r.value<std::uint32_t>());
  const auto n_obs = r.value<std::uint32_t>();
  rec.n_rows = r.value<std::uint64_t>();
  const auto n_jumps = r.value<std::uint64_t>();
  rec.max_top_fock_pop = r.value<double>();
  if (n_obs > 4096) throw std::runtime_error("record header corrupt (n_obs)");
  rec.obs_ids.resize(n_obs);
  for (auto& id : rec.obs_ids) {
    const auto len = r.value<std::uint32_t>();
    if (len > 4096) throw std::runtime_error("record header corrupt (id length)");
    id.resize(len);
    r.read(id.data(), len);
  }
  rec.dY0.resize(rec.n_steps);
  r.read(rec.dY0.data(), rec.dY0.size() * sizeof(double));
  rec.jumps.resize(n_jumps);
  for (auto& j : rec.jumps) {
    j.t = r.value<double>();
    j.channel = static_cast<int>(r.value<std::uint32_t>());
  }
  rec.obs.resize(rec.n_rows * n_obs);
  r.read(rec.obs.data(), rec.obs.size() * sizeof(double));
  char extra;
  r.in.read(&extra, 1);
  if (!r.in.eof()) throw std::runtime_error("record file has trailing bytes");
  return rec;
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& rec) {
  std::string out;
  out += "# schema ";
  out += kTrajectoryCsvSchema;
  out += "\n# params_digest " + hex64(rec.params_digest);
  out += "\n# seed " + std::to_string(rec.seed) + "\n";
  for (std::size_t c = 0; c < rec.obs_ids.size(); ++c) {
    if (c) out += ',';
    out += rec.obs_ids[c];
  }
  out += '\n';
  for (std::uint64_t row = 0; row < rec.n_rows; ++row) {
    for (std::size_t c = 0; c < rec.obs_ids.size(); ++c) {
      if (c) out += ',';
      out += format_double(rec.obs[row * rec.obs_ids.size() + c]);
    }
    out += '\n';
  }
  write_file(path, out, false);
}

void write_jumps_csv(const std::filesystem::path& path, const TrajectoryRecord& rec) {
  std::string out;
  out += "# schema ";
  out += kJumpsCsvSchema;
  out += "\n# params_digest " + hex64(rec.params_digest);
  out += "\n# seed " + std::to_string(rec.seed) + "\n";
  out += "t,atom\n";
  for (const JumpEvent& j : rec.jumps)
    out += format_double(j.t) + "," + std::to_string(j.channel + 1) + "\n";
  write_file(path, out, false);
}

void write_reduced_csv(const std::filesystem::path& path, const ReducedSeries& series,
                       std::uint64_t params_digest, std::uint64_t seed) {
  std::string out;
  out += "# schema ";
  out += kReducedCsvSchema;
  out += "\n# params_digest " + hex64(params_digest);
  out += "\n# seed " + std::to_string(seed) + "\n";
  out += "t,mean_pi,var_pi\n";
  for (std::size_t row = 0; row < series.t.size(); ++row)
    out += format_double(series.t[row]) + "," + format_double(series.mean_pi[row]) +
           "," + format_double(series.var_pi[row]) + "\n";
  write_file(path, out, false);
}

void write_ensemble_csv(const std::filesystem::path& path, const EnsembleStats& stats) {
  std::string out;
  out += "# schema ";
  out += kEnsembleCsvSchema;
  out += "\n# params_digest " + hex64(stats.params_digest);
  out += "\n# mode " + to_string(stats.mode);
  out += "\n# n_traj " + std::to_string(stats.shots.size());
  out += "\n# n_failed " + std::to_string(stats.n_failed) + "\n";
  out += "t";
  for (const std::string& id : stats.obs_ids) out += "," + id + "_mean," + id + "_std";
  out += '\n';
  const std::size_t n_cols = stats.obs_ids.size();
  for (std::size_t row = 0; row < stats.t.size(); ++row) {
    out += format_double(stats.t[row]);
    for (std::size_t c = 0; c < n_cols; ++c) {
      out += "," + format_double(stats.mean[row * n_cols + c]);
      out += "," + format_double(stats.stddev[row * n_cols + c]);
    }
    out += '\n';
  }
  write_file(path, out, false);
}

void write_shots_csv(const std::filesystem::path& path, const EnsembleStats& stats) {
  std::string out;
  out += "# schema ";
  out += kShotsCsvSchema;
  out += "\n# params_digest " + hex64(stats.params_digest);
  out += "\n# mode " + to_string(stats.mode) + "\n";
  out += "seed,failed,parity_sign,final_mean_parity,final_var_parity,"
         "postoff_var_parity,plateau_rate_mean,n_jumps,n_jumps_plateau,max_pop_e,"
         "max_pop_e_settled,var_xx_late_min,var_xx_postoff,bell_plus_final,"
         "bell_minus_final,"
         "max_fre,fre_plateau_mean,max_top_fock_pop,record_checksum,"
         "driven_checksum,error\n";
  for (const ShotSummary& s : stats.shots) {
    out += std::to_string(s.seed);
    out += s.failed ? ",1" : ",0";
    out += "," + std::to_string(s.parity_sign);
    out += "," + format_double(s.final_mean_parity);
    out += "," + format_double(s.final_var_parity);
    out += "," + format_double(s.postoff_var_parity);
    out += "," + format_double(s.plateau_rate_mean);
    out += "," + std::to_string(s.n_jumps);
    out += "," + std::to_string(s.n_jumps_plateau);
    out += "," + format_double(s.max_pop_e);
    out += "," + format_double(s.max_pop_e_settled);
    out += "," + format_double(s.var_xx_late_min);
    out += "," + format_double(s.var_xx_postoff);
    out += "," + format_double(s.bell_plus_final);
    out += "," + format_double(s.bell_minus_final);
    out += "," + format_double(s.max_fre);
    out += "," + format_double(s.fre_plateau_mean);
    out += "," + format_double(s.max_top_fock_pop);
    out += "," + hex64(s.record_checksum);
    out += "," + hex64(s.driven_checksum);
    out += "," + sanitize_csv_field(s.error) + "\n";
  }
  write_file(path, out, false);
}

void write_scaling_csv(const std::filesystem::path& path,
                       const std::vector<ScalingRow>& rows) {
  std::string out;
  out += "# schema ";
  out += kScalingCsvSchema;
  out += "\n";
  out += "branch,scale,g,alpha_max,kappa2_half,discrepancy,n_traj,n_failed\n";
  for (const ScalingRow& r : rows) {
    out += r.branch;
    out += "," + format_double(r.scale);
    out += "," + format_double(r.g);
    out += "," + format_double(r.alpha_max);
    out += "," + format_double(r.kappa2_half);
    out += "," + format_double(r.discrepancy);
    out += "," + std::to_string(r.n_traj);
    out += "," + std::to_string(r.n_failed) + "\n";
  }
  write_file(path, out, false);
}

}  // namespace qpl
