#include "scatterlab/revolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "scatterlab/errors.hpp"

namespace scatterlab {

namespace {

int end_sign(double u) { return u < 0.0 ? -1 : 1; }

double minimum_profile(const BumpProfile& p) {
  if (p.amplitude >= 0.0) return 1.0;
  // A negative amplitude dips at u = 0, i.e. t = -shift.
  const double center = std::clamp(-p.shift, -1.0, 1.0);
  return p.value(center);
}

template <class F>
double integrate_piecewise(F f, std::span<const double> breaks, double tolerance) {
  using boost::math::quadrature::gauss_kronrod;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] <= breaks[i]) continue;
    sum += gauss_kronrod<double, 31>::integrate(f, breaks[i], breaks[i + 1], 20, tolerance);
  }
  return sum;
}

}  // namespace

ClairautData clairaut_data(const BumpProfile& profile, double phi, int entry_end) {
  if (entry_end != -1 && entry_end != 1) throw Error(ErrorCode::InvalidArgument, "entry end must be -1 or +1");
  ClairautData d;
  const double fe = profile.value(entry_end);
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  d.constant = fe * s;
  d.one_minus_abs = fe * c * c / (1.0 + std::abs(s));
  d.entry_end = entry_end;
  d.t_direction = -entry_end;
  return d;
}

ClairautExit clairaut_exit(const BumpProfile& profile, double phi, int entry_end, double tolerance) {
  if (!(std::abs(phi) < 0.5 * kPi)) {
    throw Error(ErrorCode::Contract, "entry angle must lie in (-pi/2, pi/2)");
  }
  if (std::abs(std::sin(phi)) > kNearGrazingCap) {
    throw Error(ErrorCode::NearGrazing, "|sin phi| = " + std::to_string(std::abs(std::sin(phi))) +
                                            " exceeds the quadrature cap 0.999");
  }
  const ClairautData data = clairaut_data(profile, phi, entry_end);
  const double c = data.constant;
  const double ac = std::abs(c);
  if (minimum_profile(profile) <= ac) {
    throw Error(ErrorCode::TurningPoint, "profile dips below the Clairaut constant; turning points are unsupported");
  }

  // Integrate in u = shift + t so that every member of a shifted family sees the same nodes
  // on the bump. F - |c| = (h(u) - h(u_entry)) + (F(entry) - |c|).
  const double he = profile.bump(profile.shift + entry_end);
  const auto gap = [&](double u) { return (profile.bump(u) - he) + data.one_minus_abs; };
  const auto root = [&](double u) {
    const double f = 1.0 + profile.bump(u);
    return std::sqrt(gap(u) * (f + ac));
  };
  const double lo = profile.shift - 1.0, hi = profile.shift + 1.0;
  const double eps = std::abs(profile.epsilon);
  const double breaks[] = {lo, std::clamp(-eps, lo, hi), std::clamp(0.0, lo, hi), std::clamp(eps, lo, hi), hi};

  ClairautExit out;
  out.travel_time = integrate_piecewise([&](double u) { return (1.0 + profile.bump(u)) / root(u); }, breaks,
                                        tolerance * 1e-2);
  out.delta_alpha = c == 0.0 ? 0.0
                             : integrate_piecewise([&](double u) { return c / ((1.0 + profile.bump(u)) * root(u)); },
                                                   breaks, tolerance * 1e-2);
  out.exit_angle = std::asin(c / profile.value(-entry_end));
  return out;
}

double entry_angle(const BoundaryVector& b) {
  const int e = end_sign(b.point.u[0]);
  return std::atan2(b.direction[1], -e * b.direction[0]);
}

LensRecord clairaut_scatter(const BumpProfile& profile, const BoundaryVector& b, double grazing_tol) {
  if (b.point.u.size() != 1 || b.direction.size() != 2) {
    throw Error(ErrorCode::Identification, "revolution boundary vectors have one end coordinate and two components");
  }
  const double cn = normal_component(b);
  if (cn < -grazing_tol) throw Error(ErrorCode::Contract, "start vector points outward");
  if (cn < grazing_tol) return {b, b, 0.0, ExitStatus::Grazing};
  const int e = end_sign(b.point.u[0]);
  const ClairautExit q = clairaut_exit(profile, entry_angle(b), e);
  BoundaryVector exit;
  exit.point.u = Vec::Constant(1, -e);
  exit.point.theta = reduce_angle(b.point.theta + q.delta_alpha, kTwoPi);
  exit.direction.resize(2);
  exit.direction << -e * std::cos(q.exit_angle), std::sin(q.exit_angle);
  return {b, exit, q.travel_time, ExitStatus::Exited};
}

double clairaut_invariant(const BumpProfile& profile, const Vec& x, const Vec& v) {
  const double f = profile.value(x[0]);
  return f * f * v[1];
}

double gaussian_curvature(const BumpProfile& profile, double t) { return -profile.d2(t) / profile.value(t); }

double non_isometry_witness(const BumpProfile& a, const BumpProfile& b, int samples) {
  double direct = 0.0, reflected = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = -1.0 + 2.0 * i / (samples - 1);
    const double ka = gaussian_curvature(a, t);
    direct = std::max(direct, std::abs(ka - gaussian_curvature(b, t)));
    reflected = std::max(reflected, std::abs(ka - gaussian_curvature(b, -t)));
  }
  return std::min(direct, reflected);
}

std::vector<double> open_angle_grid(int count) {
  std::vector<double> out;
  for (int j = 0; j < count; ++j) out.push_back(-0.5 * kPi + kPi * (j + 0.5) / count);
  return out;
}

double FamilyScan::max_deviation() const { return std::max({max_delta_alpha, max_travel_time, max_exit_angle}); }

FamilyScan family_invariance_scan(const BumpProfile& base, std::span<const double> shifts,
                                  std::span<const double> angles, int entry_end, int workers) {
  if (shifts.empty() || angles.empty()) throw Error(ErrorCode::InvalidArgument, "scan needs shifts and angles");
  std::vector<BumpProfile> profiles;
  for (double s : shifts) {
    BumpProfile p = base;
    p.shift = s;
    ManifoldSpec::surface_of_revolution(p);  // validates the shift
    profiles.push_back(p);
  }
  FamilyScan scan;
  scan.base = base;
  scan.entry_end = entry_end;
  const std::size_t na = angles.size();
  scan.rows.resize(profiles.size() * na);
  parallel_for(scan.rows.size(), workers, [&](std::size_t k) {
    const BumpProfile& p = profiles[k / na];
    const double phi = angles[k % na];
    const ClairautExit q = clairaut_exit(p, phi, entry_end);
    scan.rows[k] = {p.shift, phi, q.delta_alpha, q.travel_time, q.exit_angle};
  });
  for (std::size_t j = 0; j < na; ++j) {
    const FamilyScanRow& first = scan.rows[j];
    double da[2] = {first.delta_alpha, first.delta_alpha};
    double tt[2] = {first.travel_time, first.travel_time};
    double ea[2] = {first.exit_angle, first.exit_angle};
    for (std::size_t i = 1; i < profiles.size(); ++i) {
      const FamilyScanRow& r = scan.rows[i * na + j];
      da[0] = std::min(da[0], r.delta_alpha), da[1] = std::max(da[1], r.delta_alpha);
      tt[0] = std::min(tt[0], r.travel_time), tt[1] = std::max(tt[1], r.travel_time);
      ea[0] = std::min(ea[0], r.exit_angle), ea[1] = std::max(ea[1], r.exit_angle);
    }
    scan.max_delta_alpha = std::max(scan.max_delta_alpha, da[1] - da[0]);
    scan.max_travel_time = std::max(scan.max_travel_time, tt[1] - tt[0]);
    scan.max_exit_angle = std::max(scan.max_exit_angle, ea[1] - ea[0]);
  }
  return scan;
}

}  // namespace scatterlab
