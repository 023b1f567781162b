#include "scatterlab/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scatterlab/errors.hpp"
#include "scatterlab/revolution.hpp"

namespace scatterlab {

namespace {

void check_boundary_vector(const BoundaryType& boundary, const BoundaryVector& b) {
  if (b.point.u.size() != boundary.n || b.direction.size() != boundary.n + 1) {
    throw Error(ErrorCode::Identification, "boundary vector does not match the boundary type");
  }
  if (!(std::abs(b.direction.norm() - 1.0) <= 1e-9)) {
    throw Error(ErrorCode::Contract, "boundary vector is not unit");
  }
}

LensRecord grazing_record(const BoundaryVector& b) { return {b, b, 0.0, ExitStatus::Grazing}; }

LensRecord from_trace(const BoundaryVector& b, const TraceResult& r) {
  return {b, r.verdict.exit, r.verdict.travel_time, r.verdict.status};
}

double resolve_budget(const ManifoldSpec& spec, double budget) {
  return budget > 0.0 ? budget : spec.trapped_budget();
}

}  // namespace

LensRecord flat_oracle_scatter(const BoundaryType& boundary, const BoundaryVector& b, double budget,
                               double grazing_tol) {
  check_boundary_vector(boundary, b);
  const int n = boundary.n;
  const double c = normal_component(b);
  if (c < -grazing_tol) throw Error(ErrorCode::Contract, "flat oracle needs an inward vector");
  if (c < grazing_tol) return grazing_record(b);

  const Vec vh = b.direction.head(n);
  const double speed = vh.norm();
  const Vec dir = vh / speed;
  const double chord = 2.0 * boundary.radius * c / speed;
  const double tt = chord / speed;
  if (tt > budget) return {b, std::nullopt, budget, ExitStatus::Trapped};

  BoundaryVector exit;
  exit.point.u = b.point.u + (chord / boundary.radius) * dir;
  exit.point.u.normalize();
  exit.point.theta = reduce_angle(b.point.theta + b.direction[n] * tt, boundary.circle_length);
  exit.direction = b.direction;
  return {b, exit, tt, ExitStatus::Exited};
}

const char* lens_method_name(LensMethod method) {
  return method == LensMethod::Ode ? "ode" : "quadrature";
}

LensRecord scattering_map(const ManifoldSpec& spec, const BoundaryVector& b, double budget, LensMethod method,
                          const IntegratorOptions& options) {
  const double limit = resolve_budget(spec, budget);
  if (method == LensMethod::Quadrature) {
    const auto* rev = std::get_if<SurfaceOfRevolution>(&spec.kind());
    if (!rev) throw Error(ErrorCode::InvalidArgument, "quadrature scattering needs a surface of revolution");
    check_boundary_vector(spec.boundary_type(), b);
    LensRecord r = clairaut_scatter(rev->profile, b, options.grazing_tol);
    if (r.status == ExitStatus::Exited && r.travel_time > limit) return {b, std::nullopt, limit, ExitStatus::Trapped};
    return r;
  }
  return from_trace(b, integrate_until_exit(spec, b, limit, options));
}

LensTable lens_table(const ManifoldSpec& spec, const Sampling& sampling, const LensTableOptions& options) {
  if (options.method == LensMethod::Quadrature && !std::holds_alternative<SurfaceOfRevolution>(spec.kind())) {
    throw Error(ErrorCode::InvalidArgument, "quadrature lens tables need a surface of revolution");
  }
  LensTable table;
  table.sampling = sampling;
  table.boundary = spec.boundary_type();
  table.spec_fingerprint = spec.fingerprint();
  table.spec_description = spec.description();
  table.method = options.method;
  table.budget = resolve_budget(spec, options.budget);
  table.records.resize(sample_count(sampling, table.boundary));
  for_each_sample(sampling, table.boundary, options.workers, [&](std::size_t i, const BoundaryVector& b) {
    if (options.method == LensMethod::Quadrature) {
      try {
        table.records[i] = scattering_map(spec, b, table.budget, LensMethod::Quadrature, options.integrator);
        return;
      } catch (const Error& e) {
        // Past the quadrature cap the record is traced instead.
        if (e.code() != ErrorCode::NearGrazing) throw;
      }
    }
    table.records[i] = scattering_map(spec, b, table.budget, LensMethod::Ode, options.integrator);
  });
  return table;
}

double vector_angle(const Vec& a, const Vec& b) {
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

double boundary_distance(const BoundaryType& boundary, const BoundaryPoint& a, const BoundaryPoint& b) {
  const double sphere = boundary.radius * vector_angle(a.u, b.u);
  const double fiber = angle_distance(a.theta, b.theta, boundary.circle_length);
  return std::hypot(sphere, fiber);
}

double ComparisonReport::max_deviation() const {
  return std::max({max_position, max_direction, max_travel_time});
}

double ComparisonReport::trapped_vs_exited_fraction() const {
  return records.empty() ? 0.0 : static_cast<double>(trapped_vs_exited) / static_cast<double>(records.size());
}

ComparisonReport compare(const LensTable& a, const LensTable& b) {
  const std::string sa = describe(a.sampling);
  const std::string sb = describe(b.sampling);
  if (sa != sb || a.records.size() != b.records.size()) {
    throw Error(ErrorCode::SamplingMismatch, "lens tables use different samplings: " + sa + " vs " + sb);
  }
  if (!(a.boundary == b.boundary)) {
    throw Error(ErrorCode::Identification, "lens tables have different boundary types");
  }
  ComparisonReport report;
  report.sampling = sa;
  report.fingerprint_a = a.spec_fingerprint;
  report.fingerprint_b = b.spec_fingerprint;
  report.records.reserve(a.records.size());
  double sum_pos = 0.0, sum_dir = 0.0, sum_tt = 0.0;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const LensRecord& ra = a.records[i];
    const LensRecord& rb = b.records[i];
    RecordDeviation dev;
    dev.index = i;
    dev.status_a = ra.status;
    dev.status_b = rb.status;
    if (ra.status != rb.status) {
      ++report.status_disagreements;
      const bool te = (ra.status == ExitStatus::Trapped && rb.status == ExitStatus::Exited) ||
                      (ra.status == ExitStatus::Exited && rb.status == ExitStatus::Trapped);
      if (te) ++report.trapped_vs_exited;
    } else if (ra.status == ExitStatus::Trapped) {
      ++report.censored_agreements;
    } else {
      dev.position = boundary_distance(a.boundary, ra.exit->point, rb.exit->point);
      dev.direction = vector_angle(ra.exit->direction, rb.exit->direction);
      dev.travel_time = std::abs(ra.travel_time - rb.travel_time);
      ++report.compared;
      sum_pos += dev.position;
      sum_dir += dev.direction;
      sum_tt += dev.travel_time;
      report.max_position = std::max(report.max_position, dev.position);
      report.max_direction = std::max(report.max_direction, dev.direction);
      report.max_travel_time = std::max(report.max_travel_time, dev.travel_time);
    }
    report.records.push_back(dev);
  }
  if (report.compared > 0) {
    const double k = static_cast<double>(report.compared);
    report.mean_position = sum_pos / k;
    report.mean_direction = sum_dir / k;
    report.mean_travel_time = sum_tt / k;
  }
  return report;
}

FirstVariation first_variation(const ManifoldSpec& spec, const BoundaryCurve& curve, double s, double h,
                               LensMethod method, const IntegratorOptions& options) {
  const int n = spec.disc_dim();
  const double period = spec.circle_length();
  const double r = spec.disc_radius();
  LensRecord rec[3];
  const double at[3] = {s - h, s, s + h};
  for (int k = 0; k < 3; ++k) {
    rec[k] = scattering_map(spec, curve(at[k]), 0.0, method, options);
    if (rec[k].status != ExitStatus::Exited) {
      throw Error(ErrorCode::NotDifferentiable,
                  std::string("geodesic is ") + exit_status_name(rec[k].status) + " at s = " + std::to_string(at[k]));
    }
  }
  auto chart_velocity = [&](const BoundaryPoint& lo, const BoundaryPoint& hi) {
    Vec v(n + 1);
    v.head(n) = r * (hi.u - lo.u) / (2.0 * h);
    double dtheta = std::remainder(hi.theta - lo.theta, period);
    v[n] = dtheta / (2.0 * h);
    return v;
  };
  const Vec c_entry = chart_velocity(rec[0].entry.point, rec[2].entry.point);
  const Vec c_exit = chart_velocity(rec[0].exit->point, rec[2].exit->point);
  const auto inner = [&](const BoundaryVector& b, const Vec& w) {
    const EmbeddedBoundaryVector e = boundary_embed(spec, b, 0.0);
    const Vec g = spec.metric_diagonal(e.vector.base.coords);
    return e.vector.components.cwiseProduct(g).dot(w);
  };

  FirstVariation out;
  out.length_derivative = (rec[2].travel_time - rec[0].travel_time) / (2.0 * h);
  out.boundary_term = inner(*rec[1].exit, c_exit) - inner(rec[1].entry, c_entry);
  out.residual = std::abs(out.length_derivative - out.boundary_term);
  return out;
}

}  // namespace scatterlab
