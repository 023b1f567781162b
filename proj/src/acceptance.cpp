#include "scatterlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "scatterlab/config.hpp"
#include "scatterlab/errors.hpp"
#include "scatterlab/oracles.hpp"

namespace scatterlab {

namespace {

constexpr double kFamilyShifts[] = {-0.5, 0.25, 0.5};

BumpProfile family_base() { return BumpProfile{0.0, 0.2, 0.05}; }

BumpProfile family_member(double shift) {
  BumpProfile p = family_base();
  p.shift = shift;
  return p;
}

// Independent stream per (criterion, part) so criteria never share samples by accident.
std::uint64_t sub_seed(std::uint64_t seed, int criterion, int part) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(criterion), static_cast<std::uint32_t>(part)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

void check_le(CriterionResult& r, std::string name, double value, double limit, bool required = true) {
  r.checks.push_back({std::move(name), value, limit, value <= limit, required});
}

BoundaryVector revolution_vector(int end, double alpha, double phi) {
  Vec u(1), d(2);
  u << end;
  d << -end * std::cos(phi), std::sin(phi);
  return BoundaryVector{BoundaryPoint{u, alpha}, d};
}

// --- 1 ---------------------------------------------------------------------------------

void flat_oracle_equivalence(CriterionResult& r, const AcceptanceOptions& o) {
  for (int n : {2, 3}) {
    const ManifoldSpec spec = ManifoldSpec::flat_product(n);
    LensTableOptions opts;
    opts.workers = o.workers;
    const LensTable ode = lens_table(spec, MonteCarloSampling{10000, sub_seed(o.seed, 1, n)}, opts);
    LensTable oracle = ode;
    for (auto& rec : oracle.records) rec = flat_oracle_scatter(ode.boundary, rec.entry, ode.budget);
    const ComparisonReport c = compare(ode, oracle);
    const std::string tag = "D" + std::to_string(n) + "xS1 ";
    check_le(r, tag + "status disagreements", static_cast<double>(c.status_disagreements), 0.0);
    check_le(r, tag + "exit position", c.max_position, 1e-8);
    check_le(r, tag + "exit direction", c.max_direction, 1e-8);
    check_le(r, tag + "travel time", c.max_travel_time, 1e-8);
    r.details[tag + "comparison"] = comparison_json(c);
  }
}

// --- 2 ---------------------------------------------------------------------------------

void family_invariance(CriterionResult& r, const AcceptanceOptions& o) {
  const std::vector<double> shifts{0.0, kFamilyShifts[0], kFamilyShifts[1], kFamilyShifts[2]};
  const std::vector<double> angles = open_angle_grid(30);
  double quadrature = 0.0;
  for (int end : {-1, 1}) {
    const FamilyScan scan = family_invariance_scan(family_base(), shifts, angles, end, o.workers);
    quadrature = std::max(quadrature, scan.max_deviation());
    r.details["quadrature scan, entry end " + std::to_string(end)] = family_scan_json(scan);
  }
  check_le(r, "quadrature max deviation", quadrature, 1e-9);

  LensTableOptions opts;
  opts.workers = o.workers;
  const GridSampling grid{2, 1, 30, 0};
  const LensTable base = lens_table(ManifoldSpec::surface_of_revolution(family_base()), grid, opts);
  double ode = 0.0;
  std::size_t disagreements = 0;
  for (double s : kFamilyShifts) {
    const LensTable t = lens_table(ManifoldSpec::surface_of_revolution(family_member(s)), grid, opts);
    const ComparisonReport c = compare(base, t);
    ode = std::max(ode, c.max_deviation());
    disagreements += c.status_disagreements;
    r.details["ode shift " + format_real(s)] = comparison_json(c);
  }
  check_le(r, "ODE status disagreements", static_cast<double>(disagreements), 0.0);
  check_le(r, "ODE max deviation", ode, 1e-4);
}

// --- 3 ---------------------------------------------------------------------------------

void clairaut_conservation(CriterionResult& r, const AcceptanceOptions& o) {
  const std::vector<double> shifts{0.0, kFamilyShifts[0], kFamilyShifts[1], kFamilyShifts[2]};
  constexpr std::size_t kPerMember = 250;
  std::vector<double> drift(shifts.size() * kPerMember, 0.0);
  std::vector<char> exited(drift.size(), 0);
  for (std::size_t m = 0; m < shifts.size(); ++m) {
    const BumpProfile profile = family_member(shifts[m]);
    const ManifoldSpec spec = ManifoldSpec::surface_of_revolution(profile);
    IntegratorOptions opts;
    opts.record = true;
    for_each_sample(MonteCarloSampling{kPerMember, sub_seed(o.seed, 3, static_cast<int>(m))}, spec.boundary_type(),
                    o.workers, [&](std::size_t i, const BoundaryVector& b) {
                      const int end = b.point.u[0] > 0.0 ? 1 : -1;
                      const double c = clairaut_data(profile, entry_angle(b), end).constant;
                      const TraceResult t = integrate_until_exit(spec, b, spec.trapped_budget(), opts);
                      double worst = 0.0;
                      for (const auto& s : t.trajectory) {
                        worst = std::max(worst, std::abs(clairaut_invariant(profile, s.coords, s.velocity) - c));
                      }
                      drift[m * kPerMember + i] = worst;
                      exited[m * kPerMember + i] = t.verdict.status == ExitStatus::Exited;
                    });
  }
  double worst = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < drift.size(); ++i) {
    worst = std::max(worst, drift[i]);
    count += static_cast<std::size_t>(exited[i]);
  }
  r.details["traces"] = drift.size();
  r.details["exited"] = count;
  check_le(r, "max |F^2 alpha' - c|", worst, 1e-8);
}

// --- 4 ---------------------------------------------------------------------------------

void reversibility(CriterionResult& r, const AcceptanceOptions& o) {
  constexpr std::size_t kTarget = 1000;
  constexpr std::size_t kDrawn = 1200;
  const auto names = manifold_preset_names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    const ManifoldSpec spec = manifold_preset(names[k]);
    const BoundaryType boundary = spec.boundary_type();
    std::vector<LensRecord> forward(kDrawn);
    for_each_sample(MonteCarloSampling{kDrawn, sub_seed(o.seed, 4, static_cast<int>(k))}, boundary, o.workers,
                    [&](std::size_t i, const BoundaryVector& b) { forward[i] = scattering_map(spec, b); });
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < kDrawn && picked.size() < kTarget; ++i) {
      if (forward[i].status == ExitStatus::Exited) picked.push_back(i);
    }
    std::vector<double> position(picked.size()), direction(picked.size()), travel(picked.size());
    std::vector<char> failed(picked.size(), 0);
    parallel_for(picked.size(), o.workers, [&](std::size_t j) {
      const LensRecord& f = forward[picked[j]];
      const BoundaryVector back{f.exit->point, -f.exit->direction};
      const LensRecord b = scattering_map(spec, back);
      if (b.status != ExitStatus::Exited) {
        failed[j] = 1;
        return;
      }
      position[j] = boundary_distance(boundary, b.exit->point, f.entry.point);
      direction[j] = vector_angle(-b.exit->direction, f.entry.direction);
      travel[j] = std::abs(b.travel_time - f.travel_time);
    });
    const auto max_of = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
    const std::string tag = names[k] + " ";
    check_le(r, tag + "exited samples short of 1000", static_cast<double>(kTarget - picked.size()), 0.0);
    check_le(r, tag + "reverse traces not exiting", static_cast<double>(std::count(failed.begin(), failed.end(), 1)),
             0.0);
    check_le(r, tag + "position", max_of(position), 1e-6);
    check_le(r, tag + "direction", max_of(direction), 1e-6);
    check_le(r, tag + "travel time", max_of(travel), 1e-6, false);
  }
}

// --- 5 ---------------------------------------------------------------------------------

struct FlatCurve {
  double a0, a1, th0, th1, psi0, psi1, b0, b1;

  BoundaryVector operator()(double s) const {
    const double a = a0 + a1 * s, psi = psi0 + psi1 * s, beta = b0 + b1 * s;
    Vec u(2), tangent(2), d(3);
    u << std::cos(a), std::sin(a);
    tangent << -std::sin(a), std::cos(a);
    d.head(2) = -std::cos(psi) * u + std::sin(psi) * std::cos(beta) * tangent;
    d[2] = std::sin(psi) * std::sin(beta);
    return BoundaryVector{BoundaryPoint{u, th0 + th1 * s}, d};
  }
};

struct RevolutionCurve {
  int end;
  double al0, al1, phi0, phi1;

  BoundaryVector operator()(double s) const { return revolution_vector(end, al0 + al1 * s, phi0 + phi1 * s); }
};

void first_variation_residual(CriterionResult& r, const AcceptanceOptions& o) {
  constexpr std::size_t kPerSpec = 50;
  std::mt19937_64 rng(sub_seed(o.seed, 5, 0));
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * ud(rng); };
  std::vector<FlatCurve> flat(kPerSpec);
  std::vector<RevolutionCurve> rev(kPerSpec);
  for (auto& c : flat) {
    c = {uni(0, kTwoPi), uni(-1, 1), uni(0, kTwoPi), uni(-1, 1), uni(0.1, 1.2), uni(-0.5, 0.5), uni(0, kTwoPi),
         uni(-1, 1)};
  }
  for (auto& c : rev) c = {ud(rng) < 0.5 ? -1 : 1, uni(0, kTwoPi), uni(-1, 1), uni(-1.2, 1.2), uni(-0.5, 0.5)};

  const ManifoldSpec flat_spec = manifold_preset("flat-d2s1");
  const ManifoldSpec bump_spec = manifold_preset("bump");
  std::vector<double> residual(2 * kPerSpec, 0.0);
  std::vector<std::string> errors(2 * kPerSpec);
  parallel_for(residual.size(), o.workers, [&](std::size_t i) {
    try {
      residual[i] = i < kPerSpec ? first_variation(flat_spec, flat[i], 0.0).residual
                                 : first_variation(bump_spec, rev[i - kPerSpec], 0.0).residual;
    } catch (const Error& e) {
      residual[i] = std::numeric_limits<double>::infinity();
      errors[i] = e.what();
    }
  });
  const double flat_max = *std::max_element(residual.begin(), residual.begin() + kPerSpec);
  const double bump_max = *std::max_element(residual.begin() + kPerSpec, residual.end());
  std::size_t failures = 0;
  for (const auto& e : errors) failures += !e.empty();
  check_le(r, "curves without a derivative", static_cast<double>(failures), 0.0);
  check_le(r, "flat-d2s1 residual", flat_max, 1e-5);
  check_le(r, "bump residual", bump_max, 1e-5);
}

// --- 6 ---------------------------------------------------------------------------------

void santalo(CriterionResult& r, const AcceptanceOptions& o) {
  SantaloOptions flat;
  flat.samples = 1'000'000;
  flat.seed = sub_seed(o.seed, 6, 0);
  flat.budget = 1e4;
  flat.workers = o.workers;
  const SantaloEstimate e = santalo_volume(ManifoldSpec::flat_product(2), flat);
  const double truth = oracles::flat_product_volume(2, 1.0, kTwoPi);
  r.details["flat-d2s1"] = santalo_json(e);
  r.details["flat-d2s1 volume"] = truth;
  check_le(r, "flat-d2s1 relative error", std::abs(e.volume - truth) / truth, 0.01);

  SantaloOptions family = flat;
  family.samples = 100'000;
  family.seed = sub_seed(o.seed, 6, 1);
  const SantaloEstimate cylinder = santalo_volume(ManifoldSpec::flat_product(1), family);
  r.details["flat-cylinder"] = santalo_json(cylinder);
  const SantaloEstimate g0 = santalo_volume(ManifoldSpec::surface_of_revolution(family_base()), family);
  r.details["bump shift 0"] = santalo_json(g0);
  const double analytic = oracles::revolution_santalo_volume(family_base());
  r.details["bump boundary-reachable volume"] = analytic;
  r.details["bump area"] = oracles::revolution_area(family_base());

  auto sigmas = [](const SantaloEstimate& a, const SantaloEstimate& b) {
    const double se = std::hypot(a.standard_error, b.standard_error);
    const double diff = std::abs(a.volume - b.volume);
    return se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  };
  check_le(r, "bump shift 0 vs flat cylinder (combined SE)", sigmas(g0, cylinder), 3.0);
  for (double s : kFamilyShifts) {
    const SantaloEstimate es = santalo_volume(ManifoldSpec::surface_of_revolution(family_member(s)), family);
    r.details["bump shift " + format_real(s)] = santalo_json(es);
    check_le(r, "bump shift " + format_real(s) + " vs flat cylinder (combined SE)", sigmas(es, cylinder), 3.0);
    check_le(r, "bump shift " + format_real(s) + " vs shift 0 (combined SE)", sigmas(es, g0), 3.0, false);
  }
  const double se = std::max(g0.standard_error, 1e-12);
  check_le(r, "bump shift 0 vs boundary-reachable volume (SE)", std::abs(g0.volume - analytic) / se, 3.0, false);
}

// --- 7 ---------------------------------------------------------------------------------

void trapped_decay(CriterionResult& r, const AcceptanceOptions& o) {
  const std::vector<double> budgets{1e2, 1e3, 1e4};
  const auto ladder =
      trapped_ladder(ManifoldSpec::flat_product(2), budgets, 1'000'000, sub_seed(o.seed, 7, 0), o.workers);
  r.details["ladder"] = ladder_json(ladder);
  Json oracle = Json::array();
  for (const auto& rung : ladder) {
    const double exact = oracles::flat_trapped_tail(rung.budget);
    const double brute = oracles::flat_trapped_tail_bruteforce(rung.budget);
    // Binomial standard error at the true tail probability.
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(rung.samples));
    oracle.push_back(Json{{"budget", rung.budget}, {"exact", exact}, {"bruteforce", brute}, {"stderr", se}});
    const std::string tag = "T=" + format_real(rung.budget) + " ";
    check_le(r, tag + "|fraction - bruteforce| / SE", std::abs(rung.fraction - brute) / se, 3.0);
    check_le(r, tag + "|fraction - exact| / SE", std::abs(rung.fraction - exact) / se, 3.0, false);
  }
  r.details["oracle"] = oracle;
  double increases = 0.0;
  for (std::size_t i = 1; i < ladder.size(); ++i) increases += ladder[i].fraction > ladder[i - 1].fraction;
  check_le(r, "ladder increases", increases, 0.0);
  check_le(r, "last minus first fraction", ladder.back().fraction - ladder.front().fraction,
           -std::numeric_limits<double>::min());
}

// --- 8 ---------------------------------------------------------------------------------

TangentVector unit_vector(const ManifoldSpec& spec, const Vec& x, const Vec& direction) {
  return TangentVector{ChartPoint{x}, direction / std::sqrt(spec.norm_squared(x, direction))};
}

void busemann_checks(CriterionResult& r, const AcceptanceOptions& o) {
  const ManifoldSpec spec = manifold_preset("perturbed-d2s1");
  const double t = 1e3;
  Vec d(3);
  d << std::cos(0.3), std::sin(0.3), 0.4;
  const BusemannFunction v(spec, unit_vector(spec, Vec::Zero(3), d), t);
  const Vec e = v.ray_direction();
  Vec eh = e.head(2).normalized();
  Vec perp(2);
  perp << -eh[1], eh[0];

  std::mt19937_64 rng(sub_seed(o.seed, 8, 0));
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  // Exterior probes downstream of the core, so minimizing segments to the far ray stay flat.
  std::vector<ChartPoint> probes;
  while (probes.size() < 100) {
    const double rad = 1.2 + 1.8 * ud(rng), ang = kTwoPi * ud(rng);
    Vec x(3);
    x << rad * std::cos(ang), rad * std::sin(ang), -1.0 + 2.0 * ud(rng);
    if (x.head(2).dot(eh) >= 0.2 * rad) probes.push_back(ChartPoint{x});
  }
  std::vector<double> grad(probes.size());
  parallel_for(probes.size(), o.workers, [&](std::size_t i) { grad[i] = v.gradient_norm(probes[i]); });
  double worst = 0.0;
  for (double g : grad) worst = std::max(worst, std::abs(g - 1.0));
  check_le(r, "max ||grad f_t| - 1| over 100 exterior probes", worst, 1e-3);

  Vec wx(3);
  wx.head(2) = 1.5 * eh + 0.2 * perp;
  wx[2] = 0.0;
  // The finite-t difference drifts by O(offset * spread / t); the longer truncation keeps that
  // well below the tolerance for a probe set of diameter 4.
  const double t_parallel = 1e4;
  const BusemannFunction vp(spec, unit_vector(spec, Vec::Zero(3), d), t_parallel);
  const BusemannFunction w(spec, TangentVector{ChartPoint{wx}, vp.ray_direction()}, t_parallel);
  std::vector<ChartPoint> set;
  for (int i = 0; i < 20; ++i) {
    const double rad = (i < 10 ? 0.9 : 2.0) * std::sqrt(ud(rng)), ang = kTwoPi * ud(rng);
    Vec x(3);
    x << rad * std::cos(ang), rad * std::sin(ang), -0.5 + ud(rng);
    set.push_back(ChartPoint{x});
  }
  std::vector<double> diff(set.size());
  parallel_for(set.size(), o.workers, [&](std::size_t i) { diff[i] = vp(set[i]) - w(set[i]); });
  const auto [lo, hi] = std::minmax_element(diff.begin(), diff.end());
  r.details["parallel difference"] = Json{{"min", *lo}, {"max", *hi}, {"probes", set.size()}, {"truncation", t_parallel}};
  check_le(r, "spread of f_t^V - f_t^W (parallel)", *hi - *lo, 1e-3);

  const ManifoldSpec flat = manifold_preset("flat-d2s1");
  struct Config {
    Vec v, w;
  };
  std::vector<Config> configs;
  while (configs.size() < 20) {
    const double av = kTwoPi * ud(rng), aw = kTwoPi * ud(rng);
    if (angle_distance(av, aw, kTwoPi) < 0.5 || angle_distance(av, aw + kPi, kTwoPi) < 0.5) continue;
    Vec cv(3), cw(3);
    cv << std::cos(av), std::sin(av), 0.2 + 0.6 * ud(rng);
    cw << std::cos(aw), std::sin(aw), 0.2 + 0.6 * ud(rng);
    configs.push_back({cv.normalized(), cw.normalized()});
  }
  std::vector<LevelSetProbe> level(configs.size());
  parallel_for(configs.size(), o.workers, [&](std::size_t i) {
    const BusemannFunction fv(flat, TangentVector{ChartPoint{Vec::Zero(3)}, configs[i].v}, t);
    const BusemannFunction fw(flat, TangentVector{ChartPoint{Vec::Zero(3)}, configs[i].w}, t);
    level[i] = level_set_extrema_probe(fv, fw, 0.0);
  });
  double failed = 0.0, excess = 0.0;
  for (const auto& p : level) {
    failed += !p.passed;
    excess = std::max({excess, p.interior_max - p.boundary_max, p.boundary_min - p.interior_min});
  }
  r.details["level set worst excess"] = excess;
  check_le(r, "level-set configurations failing (of 20)", failed, 0.0);
}

using Runner = void (*)(CriterionResult&, const AcceptanceOptions&);

constexpr Runner kRunners[] = {flat_oracle_equivalence, family_invariance, clairaut_conservation,
                               reversibility,           first_variation_residual, santalo,
                               trapped_decay,           busemann_checks};
constexpr double kTimeLimits[] = {60.0, 30.0, 0.0, 0.0, 0.0, 600.0, 0.0, 0.0, 0.0};
constexpr const char* kTitles[] = {"flat oracle equivalence",    "bump-family scattering invariance",
                                   "Clairaut conservation",      "reversibility",
                                   "first-variation residual",   "Santalo volume",
                                   "trapped-set decay",          "Busemann checks",
                                   "determinism"};

CriterionResult timed(int id, const AcceptanceOptions& o, const std::function<void(CriterionResult&)>& body) {
  CriterionResult r;
  r.id = id;
  r.title = criterion_title(id);
  r.time_limit = kTimeLimits[id - 1];
  const auto start = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (o.progress) o.progress(id, r.passed(), r.seconds);
  return r;
}

std::vector<CriterionResult> run_plain(const std::vector<int>& ids, const AcceptanceOptions& o) {
  std::vector<CriterionResult> out;
  for (int id : ids) out.push_back(run_criterion(id, o));
  return out;
}

void determinism(CriterionResult& r, const AcceptanceOptions& o, const std::vector<CriterionResult>* first) {
  const std::vector<int> ids{1, 2, 3, 4, 5, 6, 7, 8};
  AcceptanceOptions quiet = o;
  quiet.progress = nullptr;
  std::vector<CriterionResult> a;
  int workers_a = o.workers;
  if (first) {
    a = *first;
  } else {
    quiet.workers = 1;
    workers_a = 1;
    a = run_plain(ids, quiet);
  }
  const int workers_b = workers_a == 1 ? std::max(2, o.workers) : 1;
  quiet.workers = workers_b;
  const auto b = run_plain(ids, quiet);
  quiet.workers = workers_a;
  const std::string ra = acceptance_report(a, quiet).dump(2);
  const std::string rb = acceptance_report(b, quiet).dump(2);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    differing += acceptance_report({a[i]}, quiet).dump() != acceptance_report({b[i]}, quiet).dump();
  }
  r.details["workers"] = {workers_a, workers_b};
  r.details["report bytes"] = ra.size();
  check_le(r, "criteria with differing reports", static_cast<double>(differing), 0.0);
  check_le(r, "report bytes differ", ra == rb ? 0.0 : 1.0, 0.0);
}

}  // namespace

bool CriterionResult::checks_passed() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed || !c.required; });
}

const char* criterion_title(int id) {
  if (id < 1 || id > kCriterionCount) throw Error(ErrorCode::InvalidArgument, "no criterion " + std::to_string(id));
  return kTitles[id - 1];
}

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
  criterion_title(id);
  if (id == 9) return timed(9, options, [&](CriterionResult& r) { determinism(r, options, nullptr); });
  return timed(id, options, [&](CriterionResult& r) { kRunners[id - 1](r, options); });
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& options) {
  for (int id : ids) criterion_title(id);
  std::vector<CriterionResult> out;
  for (int id : ids) {
    if (id != 9) out.push_back(run_criterion(id, options));
  }
  if (std::find(ids.begin(), ids.end(), 9) == ids.end()) return out;
  std::vector<CriterionResult> first;
  for (int k = 1; k <= 8; ++k) {
    const auto it = std::find_if(out.begin(), out.end(), [k](const CriterionResult& c) { return c.id == k; });
    if (it == out.end()) break;
    first.push_back(*it);
  }
  const bool reuse = first.size() == 8;
  out.push_back(timed(9, options, [&](CriterionResult& r) { determinism(r, options, reuse ? &first : nullptr); }));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

Json acceptance_report(const std::vector<CriterionResult>& results, const AcceptanceOptions& options) {
  Json criteria = Json::array();
  for (const auto& r : results) {
    Json checks = Json::array();
    for (const auto& c : r.checks) {
      checks.push_back(
          Json{{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"passed", c.passed}, {"required", c.required}});
    }
    Json j{{"id", r.id}, {"title", r.title}, {"checks_passed", r.checks_passed()}, {"checks", checks}};
    if (r.time_limit > 0.0) j["time_limit_seconds"] = r.time_limit;
    if (!r.error.empty()) j["error"] = r.error;
    j["details"] = r.details;
    criteria.push_back(std::move(j));
  }
  return Json{{"seed", options.seed}, {"criteria", criteria}};
}

std::string summary_line(const CriterionResult& r) {
  std::string line = std::string(r.passed() ? "PASS" : "FAIL") + "  criterion " + std::to_string(r.id) + "  " + r.title;
  if (!r.error.empty()) return line + "  error: " + r.error;
  const Check* worst = nullptr;
  for (const auto& c : r.checks) {
    if (c.required && !c.passed) {
      worst = &c;
      break;
    }
  }
  if (worst) line += "  [" + worst->name + " = " + format_real(worst->value) + ", limit " + format_real(worst->limit) + "]";
  if (!r.within_time()) line += "  [runtime over " + format_real(r.time_limit) + " s]";
  return line;
}

}  // namespace scatterlab
