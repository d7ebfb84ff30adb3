// record_io.hpp — serialization: the binary trajectory record and the CSV
// outputs (trajectory, jumps, reduced series, ensemble bands, per-shot
// summaries, scaling table). Every CSV starts with a "# schema <id>" line;
// doubles are written with %.17g so files round-trip exactly.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qpl/ensemble.hpp"
#include "qpl/reduced.hpp"
#include "qpl/sde.hpp"

namespace qpl {

inline constexpr const char* kTrajectoryCsvSchema = "qpl.trajectory.v1";
inline constexpr const char* kJumpsCsvSchema = "qpl.jumps.v1";
inline constexpr const char* kReducedCsvSchema = "qpl.reduced.v1";
inline constexpr const char* kEnsembleCsvSchema = "qpl.ensemble.v1";
inline constexpr const char* kShotsCsvSchema = "qpl.shots.v1";
inline constexpr const char* kScalingCsvSchema = "qpl.scaling.v1";

// Binary record: magic "QPTR", version, header, observable ids, full-rate
// dY0, jump events, decimated observable table. Little-endian throughout.
void write_record(const std::filesystem::path& path, const TrajectoryRecord& rec);
TrajectoryRecord read_record(const std::filesystem::path& path);

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& rec);
void write_jumps_csv(const std::filesystem::path& path, const TrajectoryRecord& rec);
void write_reduced_csv(const std::filesystem::path& path, const ReducedSeries& series,
                       std::uint64_t params_digest, std::uint64_t seed);
void write_ensemble_csv(const std::filesystem::path& path, const EnsembleStats& stats);
void write_shots_csv(const std::filesystem::path& path, const EnsembleStats& stats);
void write_scaling_csv(const std::filesystem::path& path, const std::vector<ScalingRow>& rows);

// %.17g, shared by every writer so numeric text is uniform.
std::string format_double(double x);

}  // namespace qpl
