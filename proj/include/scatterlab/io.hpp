#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scatterlab/integralgeom.hpp"
#include "scatterlab/revolution.hpp"
#include "scatterlab/scattering.hpp"

namespace scatterlab {

using Json = nlohmann::ordered_json;

// Shortest text that parses back to the same double.
std::string format_real(double x);

Json boundary_vector_json(const BoundaryVector& b);
Json verdict_json(const ExitVerdict& verdict);
Json lens_record_json(const LensRecord& record);
// Columns: elapsed, x_1..x_d, v_1..v_d.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

Json sampling_json(const Sampling& sampling);
Sampling sampling_from_json(const Json& j);

void write_lens_table_csv(std::ostream& out, const LensTable& table);
Json lens_table_sidecar(const LensTable& table);
LensTable read_lens_table(std::istream& csv, const Json& sidecar);
LensTable load_lens_table(const std::string& csv_path, const std::string& sidecar_path);
void save_lens_table(const LensTable& table, const std::string& csv_path, const std::string& sidecar_path);

Json comparison_json(const ComparisonReport& report);
void write_comparison_csv(std::ostream& out, const ComparisonReport& report);

void write_family_scan_csv(std::ostream& out, const FamilyScan& scan);
Json family_scan_json(const FamilyScan& scan);

Json santalo_json(const SantaloEstimate& estimate);
void write_ladder_csv(std::ostream& out, std::span<const TrappedRung> ladder);
Json ladder_json(std::span<const TrappedRung> ladder);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace scatterlab
