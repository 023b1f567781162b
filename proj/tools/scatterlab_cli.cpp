#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scatterlab/scatterlab.h"

namespace {

using Json = nlohmann::ordered_json;

struct Failure {
  sl_status status;
  std::string message;
};

void ok(sl_status s) {
  if (s != SL_OK) throw Failure{s, sl_last_error()};
}

// Owns a string handed out by the library.
struct Text {
  char* p = nullptr;
  ~Text() { sl_string_free(p); }
  char** out() { return &p; }
  std::string str() const { return p ? p : ""; }
};

struct Manifold {
  sl_manifold* p = nullptr;
  ~Manifold() { sl_manifold_free(p); }
};

struct Config {
  sl_config* p = nullptr;
  ~Config() { sl_config_free(p); }
};

struct Table {
  sl_lens_table* p = nullptr;
  ~Table() { sl_lens_table_free(p); }
};

struct Common {
  std::string spec;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<long long> samples;
  std::optional<double> budget;
  std::string out;
  std::optional<int> workers;
  std::string format;
};

void add_common(CLI::App* app, Common& c, const std::string& default_format) {
  c.format = default_format;
  app->add_option("--spec", c.spec, "manifold preset name or config file");
  app->add_option("--config", c.config, "experiment config file")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--samples", c.samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
  app->add_option("--budget", c.budget, "trapped budget (travel time)")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "output path (or prefix for paired outputs)");
  app->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1, 1024));
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

// Flags take precedence over the config file, which takes precedence over the defaults.
struct Resolved {
  Config config;
  sl_config_values values{};
  Manifold manifold;

  void load(const Common& c, const char* default_spec) {
    if (!c.config.empty()) {
      ok(sl_config_load(c.config.c_str(), &config.p));
      ok(sl_config_values_get(config.p, &values));
    }
    if (!c.spec.empty()) {
      if (std::filesystem::is_regular_file(c.spec)) {
        Config file;
        ok(sl_config_load(c.spec.c_str(), &file.p));
        ok(sl_config_manifold(file.p, &manifold.p));
      } else {
        ok(sl_manifold_preset(c.spec.c_str(), &manifold.p));
      }
    } else if (config.p && sl_config_manifold(config.p, &manifold.p) == SL_OK) {
    } else {
      ok(sl_manifold_preset(default_spec, &manifold.p));
    }
  }

  std::uint64_t seed(const Common& c) const { return c.seed ? *c.seed : values.has_seed ? values.seed : 1; }
  long long samples(const Common& c, long long fallback) const {
    return c.samples ? *c.samples : values.has_samples ? values.samples : fallback;
  }
  double budget(const Common& c) const { return c.budget ? *c.budget : values.has_budget ? values.budget : 0.0; }
  int workers(const Common& c) const { return c.workers ? *c.workers : values.has_workers ? values.workers : 1; }
  std::string out(const Common& c) const { return !c.out.empty() ? c.out : values.out ? values.out : ""; }
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw Failure{SL_ERR_IO, "cannot write " + path};
}

std::string real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

sl_boundary_vector boundary_vector(const std::vector<double>& entry, const std::vector<double>& dir) {
  if (entry.size() < 2 || entry.size() > SL_MAX_DISC_DIM + 1) {
    throw Failure{SL_ERR_INVALID_ARGUMENT, "--entry needs the boundary point u followed by theta"};
  }
  sl_boundary_vector b{};
  b.n = static_cast<int>(entry.size()) - 1;
  if (dir.size() != entry.size()) {
    throw Failure{SL_ERR_INVALID_ARGUMENT, "--dir needs " + std::to_string(entry.size()) + " components"};
  }
  for (int i = 0; i < b.n; ++i) b.u[i] = entry[static_cast<std::size_t>(i)];
  b.theta = entry.back();
  for (std::size_t i = 0; i < dir.size(); ++i) b.direction[i] = dir[i];
  return b;
}

int method_of(const std::string& m) { return m == "quadrature" ? SL_METHOD_QUADRATURE : SL_METHOD_ODE; }

const char* status_name(int s) { return s == SL_EXITED ? "exited" : s == SL_TRAPPED ? "trapped" : "grazing"; }

std::string record_csv(const sl_lens_record& r) {
  const int n = r.entry.n;
  std::string head = "status,travel_time";
  for (int i = 1; i <= n; ++i) head += ",exit_u" + std::to_string(i);
  head += ",exit_theta";
  for (int i = 1; i <= n + 1; ++i) head += ",exit_v" + std::to_string(i);
  std::string row = std::string(status_name(r.status)) + "," + real(r.travel_time);
  for (int i = 0; i < n; ++i) row += "," + (r.has_exit ? real(r.exit.u[i]) : "");
  row += "," + (r.has_exit ? real(r.exit.theta) : "");
  for (int i = 0; i <= n; ++i) row += "," + (r.has_exit ? real(r.exit.direction[i]) : "");
  return head + "\n" + row + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scatterlab: scattering and lens data experiments on D^n x S^1"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sl_version()));

  // scatter
  Common scatter_c;
  std::vector<double> entry, dir;
  std::string scatter_method = "ode", trajectory_path;
  auto* scatter = app.add_subcommand("scatter", "trace one boundary vector to its exit");
  add_common(scatter, scatter_c, "json");
  scatter->add_option("--entry", entry, "boundary point u_1..u_n,theta")->delimiter(',')->required();
  scatter->add_option("--dir", dir, "direction in the boundary frame")->delimiter(',')->required();
  scatter->add_option("--method", scatter_method, "ode or quadrature")->check(CLI::IsMember({"ode", "quadrature"}));
  scatter->add_option("--trajectory", trajectory_path, "write the trajectory CSV here");

  // lens
  Common lens_c;
  std::vector<int> grid;
  int tangential = 0;
  std::string lens_method = "ode";
  auto* lens = app.add_subcommand("lens", "compute a lens data table");
  add_common(lens, lens_c, "csv");
  lens->add_option("--grid", grid, "grid sizes u,theta,directions")->delimiter(',')->expected(3);
  lens->add_option("--tangential", tangential, "exact tangential directions per boundary node")
      ->check(CLI::NonNegativeNumber);
  lens->add_option("--method", lens_method, "ode or quadrature")->check(CLI::IsMember({"ode", "quadrature"}));

  // compare
  Common compare_c;
  std::string table_a, table_b, family;
  std::vector<double> compare_shifts{-0.5, 0.0, 0.5};
  int compare_angles = 30;
  std::string compare_method = "ode";
  auto* cmp = app.add_subcommand("compare", "compare lens data of two tables or of a bump family");
  add_common(cmp, compare_c, "json");
  cmp->add_option("--a", table_a, "first table prefix (PREFIX.csv + PREFIX.json)");
  cmp->add_option("--b", table_b, "second table prefix");
  cmp->add_option("--family", family, "built-in family")->check(CLI::IsMember({"bump"}));
  cmp->add_option("--shifts", compare_shifts, "family shifts; the first is the reference")->delimiter(',');
  cmp->add_option("--angles", compare_angles, "entry angles per end")->check(CLI::PositiveNumber);
  cmp->add_option("--method", compare_method, "ode or quadrature")->check(CLI::IsMember({"ode", "quadrature"}));

  // clairaut-family
  Common family_c;
  std::vector<double> family_shifts{0.0, -0.5, 0.25, 0.5};
  int family_angles = 30, entry_end = -1;
  auto* fam = app.add_subcommand("clairaut-family", "quadrature scan of the bump family");
  add_common(fam, family_c, "csv");
  fam->add_option("--shifts", family_shifts, "shifts; the base profile's own shift is ignored")->delimiter(',');
  fam->add_option("--angles", family_angles, "entry angles")->check(CLI::PositiveNumber);
  fam->add_option("--entry-end", entry_end, "-1 or 1")->check(CLI::IsMember({-1, 1}));

  // volume
  Common volume_c;
  auto* vol = app.add_subcommand("volume", "Santalo volume estimate");
  add_common(vol, volume_c, "json");

  // trapped
  Common trapped_c;
  std::vector<double> budgets{1e2, 1e3, 1e4};
  auto* trap = app.add_subcommand("trapped", "trapped fraction along a budget ladder");
  add_common(trap, trapped_c, "csv");
  trap->add_option("--budgets", budgets, "budget ladder")->delimiter(',');

  // busemann
  Common busemann_c;
  std::vector<double> base, bdir, point;
  double truncation = 1e3, fd_step = 1e-4;
  bool gradient = false;
  auto* bus = app.add_subcommand("busemann", "Busemann approximation f_t(p) on the universal cover");
  add_common(bus, busemann_c, "json");
  bus->add_option("--base", base, "chart point of V")->delimiter(',')->required();
  bus->add_option("--dir", bdir, "chart components of V")->delimiter(',')->required();
  bus->add_option("--point", point, "probe point p")->delimiter(',')->required();
  bus->add_option("-t,--truncation", truncation, "truncation time")->check(CLI::PositiveNumber);
  bus->add_option("--step", fd_step, "difference step for the gradient")->check(CLI::PositiveNumber);
  bus->add_flag("--gradient", gradient, "also report the gradient norm");

  // selftest
  Common self_c;
  std::vector<int> criteria;
  auto* self = app.add_subcommand("selftest", "run the acceptance suite");
  add_common(self, self_c, "json");
  self->add_option("--criterion", criteria, "criteria to run (default: all)")->check(CLI::Range(1, 9));

  CLI11_PARSE(app, argc, argv);

  try {
    if (scatter->parsed()) {
      Resolved r;
      r.load(scatter_c, "flat-d2s1");
      const sl_boundary_vector b = boundary_vector(entry, dir);
      sl_lens_record rec{};
      Text json, traj;
      ok(sl_scatter(r.manifold.p, &b, r.budget(scatter_c), method_of(scatter_method), &rec, json.out(),
                    trajectory_path.empty() ? nullptr : traj.out()));
      if (!trajectory_path.empty()) emit(trajectory_path, traj.str());
      emit(r.out(scatter_c), scatter_c.format == "json" ? json.str() : record_csv(rec));
      return 0;
    }

    if (lens->parsed()) {
      Resolved r;
      r.load(lens_c, "flat-d2s1");
      sl_sampling s{};
      if (lens_c.samples || (r.values.has_samples && grid.empty())) {
        s.kind = SL_SAMPLING_MONTE_CARLO;
        s.samples = static_cast<std::uint64_t>(r.samples(lens_c, 0));
        s.seed = r.seed(lens_c);
      } else {
        s.kind = SL_SAMPLING_GRID;
        int g[3] = {10, 10, 10};
        if (!grid.empty()) {
          for (int i = 0; i < 3; ++i) g[i] = grid[static_cast<std::size_t>(i)];
        } else if (r.values.has_grid) {
          for (int i = 0; i < 3; ++i) g[i] = r.values.grid[i];
        }
        s.u_count = g[0], s.theta_count = g[1], s.direction_count = g[2], s.tangential_count = tangential;
      }
      const sl_lens_options o{method_of(lens_method), r.budget(lens_c), r.workers(lens_c)};
      Table t;
      ok(sl_lens_table_compute(r.manifold.p, &s, &o, &t.p));
      const std::string out = r.out(lens_c);
      if (!out.empty()) {
        ok(sl_lens_table_save(t.p, (out + ".csv").c_str(), (out + ".json").c_str()));
      } else {
        Text text;
        ok(lens_c.format == "csv" ? sl_lens_table_csv(t.p, text.out()) : sl_lens_table_json(t.p, text.out()));
        emit("", text.str());
      }
      return 0;
    }

    if (cmp->parsed()) {
      Resolved r;
      if (!table_a.empty() || !table_b.empty()) {
        if (table_a.empty() || table_b.empty() || !family.empty()) {
          throw Failure{SL_ERR_INVALID_ARGUMENT, "give either --a and --b, or --family"};
        }
        Table a, b;
        ok(sl_lens_table_load((table_a + ".csv").c_str(), (table_a + ".json").c_str(), &a.p));
        ok(sl_lens_table_load((table_b + ".csv").c_str(), (table_b + ".json").c_str(), &b.p));
        Text json, csv;
        ok(sl_compare(a.p, b.p, json.out(), csv.out(), nullptr));
        emit(r.out(compare_c), compare_c.format == "json" ? json.str() : csv.str());
        return 0;
      }
      if (family.empty()) throw Failure{SL_ERR_INVALID_ARGUMENT, "compare needs --a and --b, or --family"};
      if (compare_shifts.size() < 2) throw Failure{SL_ERR_INVALID_ARGUMENT, "--shifts needs at least two values"};
      r.load(compare_c, "bump");
      sl_bump_profile profile{};
      ok(sl_manifold_profile(r.manifold.p, &profile));
      const sl_sampling s{SL_SAMPLING_GRID, 2, 1, compare_angles, 0, 0, 0};
      const sl_lens_options o{method_of(compare_method), r.budget(compare_c), r.workers(compare_c)};
      std::vector<Table> tables(compare_shifts.size());
      for (std::size_t i = 0; i < compare_shifts.size(); ++i) {
        profile.shift = compare_shifts[i];
        Manifold m;
        ok(sl_manifold_revolution(&profile, &m.p));
        ok(sl_lens_table_compute(m.p, &s, &o, &tables[i].p));
      }
      Json report{{"family", family},
                  {"method", compare_method},
                  {"angles", compare_angles},
                  {"reference_shift", compare_shifts[0]}};
      Json rows = Json::array();
      std::string csv = "shift,max_deviation,status_disagreements,max_position,max_direction,max_travel_time\n";
      double worst = 0.0;
      for (std::size_t i = 1; i < tables.size(); ++i) {
        Text json;
        double dev = 0.0;
        ok(sl_compare(tables[0].p, tables[i].p, json.out(), nullptr, &dev));
        Json c = Json::parse(json.str());
        worst = std::max(worst, dev);
        csv += real(compare_shifts[i]) + "," + real(dev) + "," + c["status_disagreements"].dump() + "," +
               real(c["max"]["position"].get<double>()) + "," + real(c["max"]["direction"].get<double>()) + "," +
               real(c["max"]["travel_time"].get<double>()) + "\n";
        rows.push_back(Json{{"shift", compare_shifts[i]}, {"comparison", std::move(c)}});
      }
      report["max_deviation"] = worst;
      report["comparisons"] = std::move(rows);
      emit(r.out(compare_c), compare_c.format == "json" ? report.dump(2) + "\n" : csv);
      return 0;
    }

    if (fam->parsed()) {
      Resolved r;
      r.load(family_c, "bump");
      sl_bump_profile profile{};
      ok(sl_manifold_profile(r.manifold.p, &profile));
      std::vector<double> angles(static_cast<std::size_t>(family_angles));
      ok(sl_open_angle_grid(family_angles, angles.data()));
      Text csv, json;
      ok(sl_clairaut_family_scan(&profile, family_shifts.data(), family_shifts.size(), angles.data(), angles.size(),
                                 entry_end, r.workers(family_c), csv.out(), json.out(), nullptr));
      const std::string out = r.out(family_c);
      if (!out.empty()) {
        emit(out + ".csv", csv.str());
        emit(out + ".json", json.str());
      } else {
        emit("", family_c.format == "csv" ? csv.str() : json.str());
      }
      return 0;
    }

    if (vol->parsed()) {
      Resolved r;
      r.load(volume_c, "flat-d2s1");
      sl_santalo_estimate e{};
      Text json;
      ok(sl_santalo_volume(r.manifold.p, static_cast<std::uint64_t>(r.samples(volume_c, 100000)), r.seed(volume_c),
                           r.budget(volume_c), r.workers(volume_c), &e, json.out()));
      const std::string csv = "estimate,stderr,N,budget,censored_fraction,seed\n" + real(e.volume) + "," +
                              real(e.standard_error) + "," + std::to_string(e.samples) + "," + real(e.budget) + "," +
                              real(e.censored_fraction) + "," + std::to_string(e.seed) + "\n";
      emit(r.out(volume_c), volume_c.format == "json" ? json.str() : csv);
      return 0;
    }

    if (trap->parsed()) {
      Resolved r;
      r.load(trapped_c, "flat-d2s1");
      Text json, csv;
      ok(sl_trapped_ladder(r.manifold.p, budgets.data(), budgets.size(),
                           static_cast<std::uint64_t>(r.samples(trapped_c, 100000)), r.seed(trapped_c),
                           r.workers(trapped_c), nullptr, json.out(), csv.out()));
      emit(r.out(trapped_c), trapped_c.format == "json" ? json.str() : csv.str());
      return 0;
    }

    if (bus->parsed()) {
      Resolved r;
      r.load(busemann_c, "flat-d2s1");
      const std::size_t d = static_cast<std::size_t>(sl_manifold_disc_dim(r.manifold.p)) + 1;
      if (base.size() != d || bdir.size() != d || point.size() != d) {
        throw Failure{SL_ERR_INVALID_ARGUMENT, "--base, --dir and --point need " + std::to_string(d) + " values"};
      }
      double value = 0.0, norm = 0.0;
      ok(sl_busemann(r.manifold.p, base.data(), bdir.data(), truncation, point.data(), fd_step, &value,
                     gradient ? &norm : nullptr));
      Json j{{"truncation", truncation}, {"value", value}};
      if (gradient) j["gradient_norm"] = norm, j["h"] = fd_step;
      std::string csv = std::string("truncation,value") + (gradient ? ",gradient_norm" : "") + "\n" +
                        real(truncation) + "," + real(value) + (gradient ? "," + real(norm) : "") + "\n";
      emit(r.out(busemann_c), busemann_c.format == "json" ? j.dump(2) + "\n" : csv);
      return 0;
    }

    if (self->parsed()) {
      Resolved r;
      if (!self_c.config.empty()) {
        Config c;
        ok(sl_config_load(self_c.config.c_str(), &c.p));
        ok(sl_config_values_get(c.p, &r.values));
        r.config.p = c.p;
        c.p = nullptr;
      }
      int passed = 0;
      Text report, summary;
      const auto progress = [](int id, int ok_, double seconds, void*) {
        std::fprintf(stderr, "criterion %d %s in %.1f s\n", id, ok_ ? "passed" : "failed", seconds);
      };
      ok(sl_selftest(criteria.empty() ? nullptr : criteria.data(), criteria.size(), r.seed(self_c),
                     r.workers(self_c), progress, nullptr, &passed, report.out(), summary.out()));
      const std::string out = r.out(self_c);
      if (!out.empty()) emit(out, report.str());
      std::cout << summary.str();
      return passed ? 0 : 2;
    }
  } catch (const Failure& f) {
    std::cerr << "error (" << sl_status_name(f.status) << "): " << f.message << '\n';
    return 1;
  }
  return 1;
}
