#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "floq/config.hpp"
#include "floq/filtering.hpp"
#include "floq/monodromy.hpp"
#include "floq/steady_state.hpp"
#include "floq/sweep.hpp"

namespace floq {

using json = nlohmann::ordered_json;

inline constexpr const char* csv_schema = "floq-csv v1";

using CsvCell = std::variant<double, long long, std::string>;

struct CsvTable {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<CsvCell>> rows;

  void add(std::vector<CsvCell> row) { rows.push_back(std::move(row)); }
};

/// Shortest round-trip decimal form; "nan" and "inf" spelled out.
std::string format_double(double v);

std::string to_csv(const CsvTable& table);
/// Writes through a temporary file and renames it into place. Throws Io.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
void write_json(const std::filesystem::path& path, const json& value);

/// Reads back a table written by write_csv; all cells as strings.
struct CsvText {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};
CsvText read_csv(const std::filesystem::path& path);

/// FLOQ_OUTPUT_DIR when set, else output.dir.
std::filesystem::path resolve_output_dir(const RunConfig& cfg);

json to_json(const ChainSpec& chain);
json to_json(const DriveProtocol& drive);
json to_json(const RunConfig& cfg);
json to_json(const SweepPlan& plan);
json metadata(const Trajectory& traj);
json metadata(const QuasienergySpectrum& spectrum);

CsvTable trajectory_table(const Trajectory& traj, const std::vector<double>& fidelity = {});
CsvTable spectrum_table(const std::vector<std::pair<double, const QuasienergySpectrum*>>& points);
CsvTable spectrum_table(double param, const std::vector<SpectrumEntry>& entries, CsvTable table = {});
CsvTable mode_table(const FloquetMode& mode);
CsvTable fbs_table(const FbsReport& report, const std::vector<double>& f_infinity = {});
CsvTable profile_table(const std::vector<double>& populations, double t);
CsvTable filter_spectra_table(const FilterReport& report);
CsvTable sweep_summary_table(const SweepResult& result);
CsvTable convergence_table(const std::vector<ConvergenceRow>& rows);

}  // namespace floq
