#include "scatterlab/scatterlab.h"

#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "scatterlab/acceptance.hpp"
#include "scatterlab/config.hpp"
#include "scatterlab/errors.hpp"
#include "scatterlab/io.hpp"

using namespace scatterlab;

struct sl_manifold {
  ManifoldSpec spec;
};

struct sl_config {
  ExperimentConfig config;
};

struct sl_lens_table {
  LensTable table;
};

namespace {

thread_local std::string last_error;

template <class F>
sl_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return SL_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return static_cast<sl_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return SL_ERR_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

char* dup(const std::string& s) {
  char* p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

BoundaryVector to_cpp(const sl_boundary_vector& b) {
  require(b.n >= 1 && b.n <= SL_MAX_DISC_DIM, "boundary vector dimension out of range");
  BoundaryVector v;
  v.point.u = Eigen::Map<const Eigen::VectorXd>(b.u, b.n);
  v.point.theta = b.theta;
  v.direction = Eigen::Map<const Eigen::VectorXd>(b.direction, b.n + 1);
  return v;
}

sl_boundary_vector to_c(const BoundaryVector& v) {
  sl_boundary_vector b{};
  b.n = static_cast<int>(v.point.u.size());
  for (int i = 0; i < b.n; ++i) b.u[i] = v.point.u[i];
  b.theta = v.point.theta;
  for (int i = 0; i <= b.n; ++i) b.direction[i] = v.direction[i];
  return b;
}

sl_lens_record to_c(const LensRecord& r) {
  sl_lens_record out{};
  out.entry = to_c(r.entry);
  out.has_exit = r.exit.has_value();
  if (r.exit) out.exit = to_c(*r.exit);
  out.travel_time = r.travel_time;
  out.status = static_cast<int>(r.status);
  return out;
}

LensMethod method_of(int m) {
  require(m == SL_METHOD_ODE || m == SL_METHOD_QUADRATURE, "unknown lens method");
  return m == SL_METHOD_ODE ? LensMethod::Ode : LensMethod::Quadrature;
}

BumpProfile profile_of(const sl_bump_profile& p) { return BumpProfile{p.shift, p.epsilon, p.amplitude}; }

Vec chart_vector(const sl_manifold* m, const double* x) {
  return Eigen::Map<const Eigen::VectorXd>(x, m->spec.dim());
}

}  // namespace

extern "C" {

const char* sl_last_error(void) { return last_error.c_str(); }

const char* sl_status_name(sl_status status) {
  if (status == SL_OK) return "ok";
  if (status == SL_ERR_INTERNAL) return "internal";
  if (status >= SL_ERR_DOMAIN && status <= SL_ERR_INVALID_ARGUMENT) {
    return error_code_name(static_cast<ErrorCode>(static_cast<int>(status)));
  }
  return "unknown";
}

const char* sl_version(void) { return "0.1.0"; }

void sl_string_free(char* s) { delete[] s; }

sl_status sl_manifold_preset(const char* name, sl_manifold** out) {
  return guard([&] {
    require(name && out, "null argument");
    *out = new sl_manifold{manifold_preset(name)};
  });
}

sl_status sl_manifold_preset_names(char** out) {
  return guard([&] {
    require(out, "null argument");
    std::string s;
    for (const auto& n : manifold_preset_names()) s += n + "\n";
    *out = dup(s);
  });
}

sl_status sl_manifold_flat(int n, double disc_radius, double circle_length, sl_manifold** out) {
  return guard([&] {
    require(out, "null argument");
    *out = new sl_manifold{ManifoldSpec::flat_product(n, disc_radius, circle_length)};
  });
}

sl_status sl_manifold_revolution(const sl_bump_profile* profile, sl_manifold** out) {
  return guard([&] {
    require(profile && out, "null argument");
    *out = new sl_manifold{ManifoldSpec::surface_of_revolution(profile_of(*profile))};
  });
}

void sl_manifold_free(sl_manifold* m) { delete m; }

int sl_manifold_disc_dim(const sl_manifold* m) { return m ? m->spec.disc_dim() : 0; }

sl_status sl_manifold_description(const sl_manifold* m, char** out) {
  return guard([&] {
    require(m && out, "null argument");
    *out = dup(m->spec.description());
  });
}

sl_status sl_manifold_fingerprint(const sl_manifold* m, char** out) {
  return guard([&] {
    require(m && out, "null argument");
    *out = dup(m->spec.fingerprint());
  });
}

sl_status sl_manifold_profile(const sl_manifold* m, sl_bump_profile* out) {
  return guard([&] {
    require(m && out, "null argument");
    const auto* s = std::get_if<SurfaceOfRevolution>(&m->spec.kind());
    if (!s) throw Error(ErrorCode::Contract, "manifold is not a surface of revolution");
    *out = {s->profile.shift, s->profile.epsilon, s->profile.amplitude};
  });
}

sl_status sl_config_parse(const char* text, sl_config** out) {
  return guard([&] {
    require(text && out, "null argument");
    *out = new sl_config{parse_config(text)};
  });
}

sl_status sl_config_load(const char* path, sl_config** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new sl_config{load_config(path)};
  });
}

void sl_config_free(sl_config* c) { delete c; }

sl_status sl_config_values_get(const sl_config* c, sl_config_values* out) {
  return guard([&] {
    require(c && out, "null argument");
    const ExperimentConfig& e = c->config;
    *out = sl_config_values{};
    if (e.seed) out->has_seed = 1, out->seed = *e.seed;
    if (e.samples) out->has_samples = 1, out->samples = *e.samples;
    if (e.budget) out->has_budget = 1, out->budget = *e.budget;
    if (e.workers) out->has_workers = 1, out->workers = *e.workers;
    if (e.grid) {
      out->has_grid = 1;
      for (int i = 0; i < 3; ++i) out->grid[i] = (*e.grid)[static_cast<std::size_t>(i)];
    }
    out->out = e.out ? e.out->c_str() : nullptr;
  });
}

sl_status sl_config_manifold(const sl_config* c, sl_manifold** out) {
  return guard([&] {
    require(c && out, "null argument");
    if (!c->config.manifold) throw Error(ErrorCode::Config, "config does not define a manifold (missing 'kind')");
    *out = new sl_manifold{*c->config.manifold};
  });
}

sl_status sl_scatter(const sl_manifold* m, const sl_boundary_vector* entry, double budget, int method,
                     sl_lens_record* out, char** verdict_json, char** trajectory_csv) {
  return guard([&] {
    require(m && entry, "null argument");
    const BoundaryVector b = to_cpp(*entry);
    const LensRecord r = scattering_map(m->spec, b, budget, method_of(method));
    if (out) *out = to_c(r);
    put(verdict_json, lens_record_json(r).dump(2) + "\n");
    if (trajectory_csv) {
      IntegratorOptions opts;
      opts.record = true;
      const TraceResult t =
          integrate_until_exit(m->spec, b, budget > 0.0 ? budget : m->spec.trapped_budget(), opts);
      std::ostringstream csv;
      write_trajectory_csv(csv, t.trajectory);
      *trajectory_csv = dup(csv.str());
    }
  });
}

sl_status sl_lens_table_compute(const sl_manifold* m, const sl_sampling* sampling, const sl_lens_options* options,
                                sl_lens_table** out) {
  return guard([&] {
    require(m && sampling && out, "null argument");
    Sampling s;
    if (sampling->kind == SL_SAMPLING_GRID) {
      s = GridSampling{sampling->u_count, sampling->theta_count, sampling->direction_count,
                       sampling->tangential_count};
    } else {
      require(sampling->kind == SL_SAMPLING_MONTE_CARLO, "unknown sampling kind");
      s = MonteCarloSampling{static_cast<std::size_t>(sampling->samples), sampling->seed};
    }
    LensTableOptions opts;
    if (options) {
      opts.method = method_of(options->method);
      opts.budget = options->budget;
      opts.workers = options->workers;
    }
    require(opts.workers >= 1, "workers must be >= 1");
    *out = new sl_lens_table{lens_table(m->spec, s, opts)};
  });
}

sl_status sl_lens_table_load(const char* csv_path, const char* sidecar_path, sl_lens_table** out) {
  return guard([&] {
    require(csv_path && sidecar_path && out, "null argument");
    *out = new sl_lens_table{load_lens_table(csv_path, sidecar_path)};
  });
}

sl_status sl_lens_table_save(const sl_lens_table* t, const char* csv_path, const char* sidecar_path) {
  return guard([&] {
    require(t && csv_path && sidecar_path, "null argument");
    save_lens_table(t->table, csv_path, sidecar_path);
  });
}

void sl_lens_table_free(sl_lens_table* t) { delete t; }

size_t sl_lens_table_size(const sl_lens_table* t) { return t ? t->table.records.size() : 0; }

sl_status sl_lens_table_record(const sl_lens_table* t, size_t index, sl_lens_record* out) {
  return guard([&] {
    require(t && out, "null argument");
    require(index < t->table.records.size(), "record index out of range");
    *out = to_c(t->table.records[index]);
  });
}

sl_status sl_lens_table_csv(const sl_lens_table* t, char** out) {
  return guard([&] {
    require(t && out, "null argument");
    std::ostringstream s;
    write_lens_table_csv(s, t->table);
    *out = dup(s.str());
  });
}

sl_status sl_lens_table_sidecar(const sl_lens_table* t, char** out) {
  return guard([&] {
    require(t && out, "null argument");
    *out = dup(lens_table_sidecar(t->table).dump(2) + "\n");
  });
}

sl_status sl_lens_table_json(const sl_lens_table* t, char** out) {
  return guard([&] {
    require(t && out, "null argument");
    Json j = lens_table_sidecar(t->table);
    Json records = Json::array();
    for (const auto& r : t->table.records) records.push_back(lens_record_json(r));
    j["records"] = std::move(records);
    *out = dup(j.dump(2) + "\n");
  });
}

sl_status sl_compare(const sl_lens_table* a, const sl_lens_table* b, char** json, char** csv,
                     double* max_deviation) {
  return guard([&] {
    require(a && b, "null argument");
    const ComparisonReport r = compare(a->table, b->table);
    put(json, comparison_json(r).dump(2) + "\n");
    if (csv) {
      std::ostringstream s;
      write_comparison_csv(s, r);
      *csv = dup(s.str());
    }
    if (max_deviation) *max_deviation = r.max_deviation();
  });
}

sl_status sl_clairaut_family_scan(const sl_bump_profile* base, const double* shifts, size_t shift_count,
                                  const double* angles, size_t angle_count, int entry_end, int workers, char** csv,
                                  char** json, double* max_deviation) {
  return guard([&] {
    require(base && shifts && angles, "null argument");
    require(workers >= 1, "workers must be >= 1");
    const FamilyScan scan = family_invariance_scan(profile_of(*base), {shifts, shift_count}, {angles, angle_count},
                                                   entry_end, workers);
    if (csv) {
      std::ostringstream s;
      write_family_scan_csv(s, scan);
      *csv = dup(s.str());
    }
    put(json, family_scan_json(scan).dump(2) + "\n");
    if (max_deviation) *max_deviation = scan.max_deviation();
  });
}

sl_status sl_open_angle_grid(int count, double* out) {
  return guard([&] {
    require(out && count >= 1, "invalid angle grid");
    const auto g = open_angle_grid(count);
    std::copy(g.begin(), g.end(), out);
  });
}

sl_status sl_santalo_volume(const sl_manifold* m, uint64_t samples, uint64_t seed, double budget, int workers,
                            sl_santalo_estimate* out, char** json) {
  return guard([&] {
    require(m, "null argument");
    require(workers >= 1, "workers must be >= 1");
    SantaloOptions o;
    o.samples = static_cast<std::size_t>(samples);
    o.seed = seed;
    o.budget = budget;
    o.workers = workers;
    const SantaloEstimate e = santalo_volume(m->spec, o);
    if (out) {
      *out = {e.volume, e.standard_error, e.samples, e.budget, e.censored, e.censored_fraction, e.seed,
              e.normalization};
    }
    put(json, santalo_json(e).dump(2) + "\n");
  });
}

sl_status sl_trapped_ladder(const sl_manifold* m, const double* budgets, size_t count, uint64_t samples,
                            uint64_t seed, int workers, sl_trapped_rung* out, char** json, char** csv) {
  return guard([&] {
    require(m && budgets, "null argument");
    require(workers >= 1, "workers must be >= 1");
    const auto ladder = trapped_ladder(m->spec, {budgets, count}, static_cast<std::size_t>(samples), seed, workers);
    for (std::size_t i = 0; out && i < ladder.size(); ++i) {
      const TrappedRung& r = ladder[i];
      out[i] = {r.budget, r.samples, r.trapped, r.grazing, r.fraction, r.standard_error, r.wilson_low, r.wilson_high};
    }
    put(json, ladder_json(ladder).dump(2) + "\n");
    if (csv) {
      std::ostringstream s;
      write_ladder_csv(s, ladder);
      *csv = dup(s.str());
    }
  });
}

sl_status sl_busemann(const sl_manifold* m, const double* base, const double* direction, double t,
                      const double* point, double h, double* value, double* gradient_norm) {
  return guard([&] {
    require(m && base && direction && point, "null argument");
    const BusemannFunction f(m->spec, TangentVector{ChartPoint{chart_vector(m, base)}, chart_vector(m, direction)}, t);
    const ChartPoint p{chart_vector(m, point)};
    if (value) *value = f(p);
    if (gradient_norm) {
      require(h > 0.0, "difference step must be positive");
      *gradient_norm = f.gradient_norm(p, h);
    }
  });
}

sl_status sl_selftest(const int* criteria, size_t count, uint64_t seed, int workers, sl_progress_fn progress,
                      void* user, int* all_passed, char** report_json, char** summary) {
  return guard([&] {
    require(workers >= 1, "workers must be >= 1");
    std::vector<int> ids;
    if (criteria) {
      ids.assign(criteria, criteria + count);
    } else {
      for (int k = 1; k <= kCriterionCount; ++k) ids.push_back(k);
    }
    AcceptanceOptions o;
    o.seed = seed;
    o.workers = workers;
    if (progress) o.progress = [&](int id, bool passed, double seconds) { progress(id, passed, seconds, user); };
    const auto results = run_acceptance(ids, o);
    bool ok = true;
    std::string lines;
    for (const auto& r : results) {
      ok = ok && r.passed();
      lines += summary_line(r) + "\n";
    }
    if (all_passed) *all_passed = ok;
    put(report_json, acceptance_report(results, o).dump(2) + "\n");
    put(summary, lines);
  });
}

}  // extern "C"
