#include "scatterlab/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "scatterlab/errors.hpp"

namespace scatterlab {

namespace {

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ExitStatus parse_status(const std::string& s) {
  if (s == "exited") return ExitStatus::Exited;
  if (s == "trapped") return ExitStatus::Trapped;
  if (s == "grazing") return ExitStatus::Grazing;
  throw Error(ErrorCode::Io, "unknown status '" + s + "'");
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw Error(ErrorCode::Io, "bad number '" + s + "'");
  return x;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

void append_vec(std::vector<std::string>& row, const Vec& v) {
  for (int i = 0; i < v.size(); ++i) row.push_back(format_real(v[i]));
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

Json boundary_vector_json(const BoundaryVector& b) {
  return Json{{"u", vec_json(b.point.u)}, {"theta", b.point.theta}, {"direction", vec_json(b.direction)}};
}

Json verdict_json(const ExitVerdict& verdict) {
  Json j{{"status", exit_status_name(verdict.status)}, {"travel_time", verdict.travel_time}};
  if (verdict.status == ExitStatus::Trapped) j["censored_at"] = verdict.travel_time;
  j["exit"] = verdict.exit ? boundary_vector_json(*verdict.exit) : Json(nullptr);
  return j;
}

Json lens_record_json(const LensRecord& r) {
  Json j{{"entry", boundary_vector_json(r.entry)}};
  j.update(verdict_json({r.status, r.exit, r.travel_time}));
  return j;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  if (trajectory.empty()) return;
  const int d = static_cast<int>(trajectory.front().coords.size());
  std::vector<std::string> header{"elapsed"};
  for (int i = 1; i <= d; ++i) header.push_back("x" + std::to_string(i));
  for (int i = 1; i <= d; ++i) header.push_back("v" + std::to_string(i));
  write_row(out, header);
  for (const auto& s : trajectory) {
    std::vector<std::string> row{format_real(s.elapsed)};
    append_vec(row, s.coords);
    append_vec(row, s.velocity);
    write_row(out, row);
  }
}

Json sampling_json(const Sampling& sampling) {
  if (const auto* g = std::get_if<GridSampling>(&sampling)) {
    return Json{{"kind", "grid"},
                {"u", g->u_count},
                {"theta", g->theta_count},
                {"directions", g->direction_count},
                {"tangential", g->tangential_count}};
  }
  const auto& m = std::get<MonteCarloSampling>(sampling);
  return Json{{"kind", "montecarlo"}, {"samples", m.samples}, {"seed", m.seed}};
}

Sampling sampling_from_json(const Json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "grid") {
      return GridSampling{j.at("u").get<int>(), j.at("theta").get<int>(), j.at("directions").get<int>(),
                          j.at("tangential").get<int>()};
    }
    if (kind == "montecarlo") {
      return MonteCarloSampling{j.at("samples").get<std::size_t>(), j.at("seed").get<std::uint64_t>()};
    }
    throw Error(ErrorCode::Io, "unknown sampling kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("malformed sampling block: ") + e.what());
  }
}

void write_lens_table_csv(std::ostream& out, const LensTable& table) {
  const int n = table.boundary.n;
  std::vector<std::string> header{"index"};
  auto vector_columns = [&](const std::string& prefix) {
    for (int i = 1; i <= n; ++i) header.push_back(prefix + "_u" + std::to_string(i));
    header.push_back(prefix + "_theta");
    for (int i = 1; i <= n + 1; ++i) header.push_back(prefix + "_v" + std::to_string(i));
  };
  vector_columns("entry");
  header.push_back("status");
  vector_columns("exit");
  header.push_back("travel_time");
  write_row(out, header);
  for (std::size_t k = 0; k < table.records.size(); ++k) {
    const LensRecord& r = table.records[k];
    std::vector<std::string> row{std::to_string(k)};
    append_vec(row, r.entry.point.u);
    row.push_back(format_real(r.entry.point.theta));
    append_vec(row, r.entry.direction);
    row.push_back(exit_status_name(r.status));
    if (r.exit) {
      append_vec(row, r.exit->point.u);
      row.push_back(format_real(r.exit->point.theta));
      append_vec(row, r.exit->direction);
    } else {
      for (int i = 0; i < 2 * n + 2; ++i) row.emplace_back();
    }
    row.push_back(format_real(r.travel_time));
    write_row(out, row);
  }
}

Json lens_table_sidecar(const LensTable& table) {
  Json j{{"spec_fingerprint", table.spec_fingerprint},
         {"spec", table.spec_description},
         {"boundary", {{"n", table.boundary.n}, {"radius", table.boundary.radius},
                       {"circle_length", table.boundary.circle_length}}},
         {"sampling", sampling_json(table.sampling)},
         {"method", lens_method_name(table.method)},
         {"budget", table.budget},
         {"records", table.records.size()}};
  if (const auto* m = std::get_if<MonteCarloSampling>(&table.sampling)) j["seed"] = m->seed;
  return j;
}

LensTable read_lens_table(std::istream& csv, const Json& sidecar) {
  LensTable table;
  try {
    table.spec_fingerprint = sidecar.at("spec_fingerprint").get<std::string>();
    table.spec_description = sidecar.at("spec").get<std::string>();
    const Json& b = sidecar.at("boundary");
    table.boundary = {b.at("n").get<int>(), b.at("radius").get<double>(), b.at("circle_length").get<double>()};
    table.sampling = sampling_from_json(sidecar.at("sampling"));
    table.method = sidecar.at("method").get<std::string>() == "quadrature" ? LensMethod::Quadrature : LensMethod::Ode;
    table.budget = sidecar.at("budget").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("malformed lens table sidecar: ") + e.what());
  }
  const int n = table.boundary.n;
  const std::size_t columns = static_cast<std::size_t>(1 + 2 * (2 * n + 2) + 2);
  std::string line;
  if (!std::getline(csv, line)) throw Error(ErrorCode::Io, "lens table CSV is empty");
  std::size_t line_no = 1;
  while (std::getline(csv, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != columns) {
      throw Error(ErrorCode::Io, "line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                                     " columns, found " + std::to_string(cells.size()));
    }
    std::size_t c = 1;
    auto read_vector = [&](BoundaryVector& v) {
      v.point.u.resize(n);
      for (int i = 0; i < n; ++i) v.point.u[i] = parse_double(cells[c++]);
      v.point.theta = parse_double(cells[c++]);
      v.direction.resize(n + 1);
      for (int i = 0; i <= n; ++i) v.direction[i] = parse_double(cells[c++]);
    };
    LensRecord r;
    read_vector(r.entry);
    r.status = parse_status(cells[c++]);
    if (cells[c].empty()) {
      c += static_cast<std::size_t>(2 * n + 2);
    } else {
      BoundaryVector e;
      read_vector(e);
      r.exit = e;
    }
    r.travel_time = parse_double(cells[c]);
    table.records.push_back(std::move(r));
  }
  if (sidecar.contains("records") && sidecar["records"].get<std::size_t>() != table.records.size()) {
    throw Error(ErrorCode::Io, "record count does not match the sidecar");
  }
  return table;
}

LensTable load_lens_table(const std::string& csv_path, const std::string& sidecar_path) {
  std::ifstream csv(csv_path);
  if (!csv) throw Error(ErrorCode::Io, "cannot open " + csv_path);
  Json sidecar;
  try {
    sidecar = Json::parse(read_text_file(sidecar_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, sidecar_path + ": " + e.what());
  }
  return read_lens_table(csv, sidecar);
}

void save_lens_table(const LensTable& table, const std::string& csv_path, const std::string& sidecar_path) {
  std::ostringstream csv;
  write_lens_table_csv(csv, table);
  write_text_file(csv_path, csv.str());
  write_text_file(sidecar_path, lens_table_sidecar(table).dump(2) + "\n");
}

Json comparison_json(const ComparisonReport& r) {
  return Json{{"sampling", r.sampling},
              {"fingerprint_a", r.fingerprint_a},
              {"fingerprint_b", r.fingerprint_b},
              {"records", r.records.size()},
              {"compared", r.compared},
              {"status_disagreements", r.status_disagreements},
              {"trapped_vs_exited", r.trapped_vs_exited},
              {"trapped_vs_exited_fraction", r.trapped_vs_exited_fraction()},
              {"censored_agreements", r.censored_agreements},
              {"max_deviation", r.max_deviation()},
              {"max", {{"position", r.max_position}, {"direction", r.max_direction}, {"travel_time", r.max_travel_time}}},
              {"mean",
               {{"position", r.mean_position}, {"direction", r.mean_direction}, {"travel_time", r.mean_travel_time}}}};
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& report) {
  write_row(out, {"index", "status_a", "status_b", "position", "direction", "travel_time"});
  for (const auto& d : report.records) {
    write_row(out, {std::to_string(d.index), exit_status_name(d.status_a), exit_status_name(d.status_b),
                    format_real(d.position), format_real(d.direction), format_real(d.travel_time)});
  }
}

void write_family_scan_csv(std::ostream& out, const FamilyScan& scan) {
  write_row(out, {"shift", "phi", "delta_alpha", "travel_time", "exit_angle"});
  for (const auto& r : scan.rows) {
    write_row(out, {format_real(r.shift), format_real(r.phi), format_real(r.delta_alpha), format_real(r.travel_time),
                    format_real(r.exit_angle)});
  }
}

Json family_scan_json(const FamilyScan& scan) {
  Json shifts = Json::array();
  for (const auto& r : scan.rows) {
    if (shifts.empty() || shifts.back().get<double>() != r.shift) shifts.push_back(r.shift);
  }
  return Json{{"epsilon", scan.base.epsilon},
              {"amplitude", scan.base.amplitude},
              {"entry_end", scan.entry_end},
              {"shifts", shifts},
              {"angles", scan.rows.size() / std::max<std::size_t>(1, shifts.size())},
              {"max_deviation", scan.max_deviation()},
              {"max_delta_alpha", scan.max_delta_alpha},
              {"max_travel_time", scan.max_travel_time},
              {"max_exit_angle", scan.max_exit_angle}};
}

Json santalo_json(const SantaloEstimate& e) {
  return Json{{"estimate", e.volume},         {"stderr", e.standard_error},
              {"N", e.samples},               {"budget", e.budget},
              {"censored", e.censored},       {"censored_fraction", e.censored_fraction},
              {"seed", e.seed},               {"normalization", e.normalization}};
}

void write_ladder_csv(std::ostream& out, std::span<const TrappedRung> ladder) {
  write_row(out, {"budget", "samples", "trapped", "grazing", "fraction", "stderr", "wilson_low", "wilson_high"});
  for (const auto& r : ladder) {
    write_row(out, {format_real(r.budget), std::to_string(r.samples), std::to_string(r.trapped),
                    std::to_string(r.grazing), format_real(r.fraction), format_real(r.standard_error),
                    format_real(r.wilson_low), format_real(r.wilson_high)});
  }
}

Json ladder_json(std::span<const TrappedRung> ladder) {
  Json a = Json::array();
  for (const auto& r : ladder) {
    a.push_back(Json{{"budget", r.budget},
                     {"samples", r.samples},
                     {"trapped", r.trapped},
                     {"grazing", r.grazing},
                     {"fraction", r.fraction},
                     {"stderr", r.standard_error},
                     {"wilson", {r.wilson_low, r.wilson_high}}});
  }
  return a;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace scatterlab
