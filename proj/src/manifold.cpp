#include "scatterlab/manifold.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

#include "scatterlab/errors.hpp"

namespace scatterlab {

namespace {

std::string num(double value) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate_flat(const FlatProduct& f) {
  if (f.n < 1 || f.n + 1 > kMaxDim) {
    throw Error(ErrorCode::Config, "n must satisfy 1 <= n <= " + std::to_string(kMaxDim - 1));
  }
  if (!(f.disc_radius > 0.0) || !std::isfinite(f.disc_radius)) {
    throw Error(ErrorCode::Config, "disc_radius must be positive");
  }
  if (!(f.circle_length > 0.0) || !std::isfinite(f.circle_length)) {
    throw Error(ErrorCode::Config, "circle_length must be positive");
  }
}

void validate_profile(const BumpProfile& p) {
  if (!(p.epsilon > 0.0 && p.epsilon < 0.25)) {
    throw Error(ErrorCode::Config,
                "bump.epsilon = " + num(p.epsilon) + " violates 0 < epsilon < 1/4");
  }
  if (!(p.amplitude >= 0.0) || !std::isfinite(p.amplitude)) {
    throw Error(ErrorCode::Config, "bump.amplitude must be >= 0 (the bump is positive on its support)");
  }
  const double limit = 1.0 - 2.0 * p.epsilon;
  if (!(std::abs(p.shift) < limit)) {
    throw Error(ErrorCode::Config, "bump.shift = " + num(p.shift) +
                                       " violates s in (-1 + 2 epsilon, 1 - 2 epsilon) = (" +
                                       num(-limit) + ", " + num(limit) + ")");
  }
}

void validate_perturbation(const FlatProduct& base, const ConformalBump& c) {
  if (c.center.size() != base.n) {
    throw Error(ErrorCode::Config, "perturbation.center must have n = " + std::to_string(base.n) +
                                       " components");
  }
  if (!(std::abs(c.amplitude) <= 0.5)) {
    throw Error(ErrorCode::Config,
                "perturbation.amplitude must satisfy |amplitude| <= 0.5 (positive definiteness margin)");
  }
  if (!(c.radius > 0.0)) {
    throw Error(ErrorCode::Config, "perturbation.radius must be positive");
  }
  if (c.center.norm() + c.radius > base.disc_radius - 0.05) {
    throw Error(ErrorCode::Config,
                "perturbation support must stay at distance >= 0.05 from the boundary: "
                "|center| + radius <= disc_radius - 0.05");
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Profiles

double BumpProfile::bump(double u) const {
  const double e2 = epsilon * epsilon;
  const double q = e2 - u * u;
  if (amplitude == 0.0 || q <= 0.0) return 0.0;
  return amplitude * std::exp(1.0 - e2 / q);
}

double BumpProfile::bump_d1(double u) const {
  const double e2 = epsilon * epsilon;
  const double q = e2 - u * u;
  if (amplitude == 0.0 || q <= 0.0) return 0.0;
  return bump(u) * (-2.0 * e2 * u / (q * q));
}

double BumpProfile::bump_d2(double u) const {
  const double e2 = epsilon * epsilon;
  const double q = e2 - u * u;
  if (amplitude == 0.0 || q <= 0.0) return 0.0;
  const double g1 = -2.0 * e2 * u / (q * q);
  const double g1_prime = -2.0 * e2 * (q + 4.0 * u * u) / (q * q * q);
  return bump(u) * (g1 * g1 + g1_prime);
}

double ConformalBump::value(const Vec& xh) const {
  const double r2 = radius * radius;
  const double q = r2 - (xh - center).squaredNorm();
  if (amplitude == 0.0 || q <= 0.0) return 0.0;
  return amplitude * std::exp(1.0 - r2 / q);
}

Vec ConformalBump::gradient(const Vec& xh) const {
  const double r2 = radius * radius;
  const Vec diff = xh - center;
  const double q = r2 - diff.squaredNorm();
  if (amplitude == 0.0 || q <= 0.0) return Vec::Zero(xh.size());
  return value(xh) * (-2.0 * r2 / (q * q)) * diff;
}

// ---------------------------------------------------------------------------------------------
// ManifoldSpec

ManifoldSpec::ManifoldSpec(Kind kind, double trapped_budget) : kind_(std::move(kind)) {
  std::visit(overloaded{
                 [](const FlatProduct& f) { validate_flat(f); },
                 [](const SurfaceOfRevolution& s) { validate_profile(s.profile); },
                 [](const PerturbedProduct& p) {
                   validate_flat(p.base);
                   validate_perturbation(p.base, p.perturbation);
                 },
             },
             kind_);
  if (!std::isfinite(trapped_budget)) {
    throw Error(ErrorCode::Config, "trapped_budget must be finite");
  }
  trapped_budget_ = trapped_budget > 0.0 ? trapped_budget : 1000.0 * diameter();
}

ManifoldSpec ManifoldSpec::flat_product(int n, double disc_radius, double circle_length) {
  return ManifoldSpec(FlatProduct{n, disc_radius, circle_length});
}

ManifoldSpec ManifoldSpec::surface_of_revolution(const BumpProfile& profile) {
  return ManifoldSpec(SurfaceOfRevolution{profile});
}

ManifoldSpec ManifoldSpec::perturbed_product(const FlatProduct& base, const ConformalBump& perturbation) {
  return ManifoldSpec(PerturbedProduct{base, perturbation});
}

std::string ManifoldSpec::kind_name() const {
  return std::visit(overloaded{
                        [](const FlatProduct&) { return std::string("flat"); },
                        [](const SurfaceOfRevolution&) { return std::string("revolution"); },
                        [](const PerturbedProduct&) { return std::string("perturbed"); },
                    },
                    kind_);
}

bool ManifoldSpec::is_flat() const {
  return std::visit(overloaded{
                        [](const FlatProduct&) { return true; },
                        [](const SurfaceOfRevolution& s) { return s.profile.amplitude == 0.0; },
                        [](const PerturbedProduct& p) { return p.perturbation.amplitude == 0.0; },
                    },
                    kind_);
}

int ManifoldSpec::disc_dim() const {
  return std::visit(overloaded{
                        [](const FlatProduct& f) { return f.n; },
                        [](const SurfaceOfRevolution&) { return 1; },
                        [](const PerturbedProduct& p) { return p.base.n; },
                    },
                    kind_);
}

double ManifoldSpec::disc_radius() const {
  return std::visit(overloaded{
                        [](const FlatProduct& f) { return f.disc_radius; },
                        [](const SurfaceOfRevolution&) { return 1.0; },
                        [](const PerturbedProduct& p) { return p.base.disc_radius; },
                    },
                    kind_);
}

double ManifoldSpec::circle_length() const {
  return std::visit(overloaded{
                        [](const FlatProduct& f) { return f.circle_length; },
                        [](const SurfaceOfRevolution&) { return kTwoPi; },
                        [](const PerturbedProduct& p) { return p.base.circle_length; },
                    },
                    kind_);
}

BoundaryType ManifoldSpec::boundary_type() const {
  return BoundaryType{disc_dim(), disc_radius(), circle_length()};
}

double ManifoldSpec::diameter() const {
  const double r = disc_radius();
  const double half = 0.5 * circle_length();
  return std::sqrt(4.0 * r * r + half * half);
}

std::string ManifoldSpec::description() const {
  std::ostringstream out;
  out << "kind=" << kind_name() << ";n=" << disc_dim() << ";disc_radius=" << num(disc_radius())
      << ";circle_length=" << num(circle_length());
  if (const auto* s = std::get_if<SurfaceOfRevolution>(&kind_)) {
    out << ";bump.amplitude=" << num(s->profile.amplitude) << ";bump.epsilon=" << num(s->profile.epsilon)
        << ";bump.shift=" << num(s->profile.shift);
  }
  if (const auto* p = std::get_if<PerturbedProduct>(&kind_)) {
    out << ";perturbation.amplitude=" << num(p->perturbation.amplitude)
        << ";perturbation.radius=" << num(p->perturbation.radius) << ";perturbation.center=";
    for (int i = 0; i < p->perturbation.center.size(); ++i) {
      out << (i ? "," : "") << num(p->perturbation.center[i]);
    }
  }
  out << ";trapped_budget=" << num(trapped_budget_);
  return out.str();
}

std::string ManifoldSpec::fingerprint() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a(description())));
  return buf;
}

Vec ManifoldSpec::metric_diagonal(const Vec& x) const {
  const int d = dim();
  Vec g = Vec::Ones(d);
  if (const auto* s = std::get_if<SurfaceOfRevolution>(&kind_)) {
    const double f = s->profile.value(x[0]);
    g[1] = f * f;
  } else if (const auto* p = std::get_if<PerturbedProduct>(&kind_)) {
    g.setConstant(1.0 + p->perturbation.value(x.head(p->base.n)));
  }
  return g;
}

Mat ManifoldSpec::metric(const Vec& x) const {
  return metric_diagonal(x).asDiagonal();
}

Christoffel ManifoldSpec::christoffel(const Vec& x) const {
  const int d = dim();
  Christoffel gamma(d);
  if (const auto* s = std::get_if<SurfaceOfRevolution>(&kind_)) {
    const double f = s->profile.value(x[0]);
    const double fp = s->profile.d1(x[0]);
    gamma(0, 1, 1) = -f * fp;
    gamma(1, 0, 1) = fp / f;
    gamma(1, 1, 0) = fp / f;
  } else if (const auto* p = std::get_if<PerturbedProduct>(&kind_)) {
    const int n = p->base.n;
    const Vec xh = x.head(n);
    const double conformal = 1.0 + p->perturbation.value(xh);
    // g = e^{2 phi} delta with d phi = d psi / (2 (1 + psi)); phi does not depend on theta.
    Vec dphi = Vec::Zero(d);
    dphi.head(n) = p->perturbation.gradient(xh) / (2.0 * conformal);
    for (int k = 0; k < d; ++k) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          double value = 0.0;
          if (k == i) value += dphi[j];
          if (k == j) value += dphi[i];
          if (i == j) value -= dphi[k];
          gamma(k, i, j) = value;
        }
      }
    }
  }
  return gamma;
}

Vec ManifoldSpec::acceleration(const Vec& x, const Vec& v) const {
  const int d = dim();
  if (const auto* s = std::get_if<SurfaceOfRevolution>(&kind_)) {
    Vec a(2);
    const double f = s->profile.value(x[0]);
    const double fp = s->profile.d1(x[0]);
    a[0] = f * fp * v[1] * v[1];
    a[1] = -2.0 * (fp / f) * v[0] * v[1];
    return a;
  }
  if (const auto* p = std::get_if<PerturbedProduct>(&kind_)) {
    const int n = p->base.n;
    const Vec xh = x.head(n);
    const double psi = p->perturbation.value(xh);
    if (psi == 0.0) return Vec::Zero(d);
    Vec dphi = Vec::Zero(d);
    dphi.head(n) = p->perturbation.gradient(xh) / (2.0 * (1.0 + psi));
    return v.squaredNorm() * dphi - 2.0 * dphi.dot(v) * v;
  }
  return Vec::Zero(d);
}

double ManifoldSpec::norm_squared(const Vec& x, const Vec& v) const {
  return (metric_diagonal(x).array() * v.array() * v.array()).sum();
}

double ManifoldSpec::boundary_function(const Vec& x) const {
  const double r = disc_radius();
  return x.head(disc_dim()).squaredNorm() - r * r;
}

double ManifoldSpec::step_cap(const Vec& x) const {
  const double far = 8.0 * std::max(1.0, disc_radius());
  if (const auto* s = std::get_if<SurfaceOfRevolution>(&kind_)) {
    if (s->profile.amplitude == 0.0) return far;
    const auto [lo, hi] = s->profile.support();
    const double t = x[0];
    const double gap = t < lo ? lo - t : (t > hi ? t - hi : 0.0);
    return std::min(far, std::max(0.5 * s->profile.epsilon, gap));
  }
  if (const auto* p = std::get_if<PerturbedProduct>(&kind_)) {
    const auto& c = p->perturbation;
    if (c.amplitude == 0.0) return far;
    const double gap = (x.head(p->base.n) - c.center).norm() - c.radius;
    return std::min(far, std::max(0.25 * c.radius, gap));
  }
  return far;
}

bool ManifoldSpec::in_domain(const Vec& x, Model model) const {
  if (x.size() != dim() || !x.allFinite()) return false;
  if (model == Model::UniversalCover) return true;
  const double r = disc_radius();
  return x.head(disc_dim()).squaredNorm() <= r * r * (1.0 + 1e-12);
}

// ---------------------------------------------------------------------------------------------
// Free operations

double reduce_angle(double angle, double period) {
  double r = std::fmod(angle, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

double angle_distance(double a, double b, double period) {
  const double d = std::abs(reduce_angle(a, period) - reduce_angle(b, period));
  return std::min(d, period - d);
}

namespace {

void require_domain(const ManifoldSpec& spec, const ChartPoint& p, Model model) {
  if (!spec.in_domain(p.coords, model)) {
    throw Error(ErrorCode::Domain, "chart point outside the domain of " + spec.kind_name() + " manifold");
  }
}

}  // namespace

Mat metric_at(const ManifoldSpec& spec, const ChartPoint& p, Model model) {
  require_domain(spec, p, model);
  return spec.metric(p.coords);
}

Christoffel christoffel_at(const ManifoldSpec& spec, const ChartPoint& p, Model model) {
  require_domain(spec, p, model);
  return spec.christoffel(p.coords);
}

Christoffel christoffel_finite_difference(const ManifoldSpec& spec, const Vec& x, double h) {
  const int d = spec.dim();
  // dg[l](i, j) = d g_ij / d x^l
  std::array<Mat, kMaxDim> dg;
  for (int l = 0; l < d; ++l) {
    Vec xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    dg[l] = (spec.metric(xp) - spec.metric(xm)) / (2.0 * h);
  }
  const Mat ginv = spec.metric(x).inverse();
  Christoffel gamma(d);
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        double sum = 0.0;
        for (int l = 0; l < d; ++l) {
          sum += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        }
        gamma(k, i, j) = 0.5 * sum;
      }
    }
  }
  return gamma;
}

double normal_component(const BoundaryVector& b) {
  return -b.point.u.dot(b.direction.head(b.point.u.size()));
}

Orientation orientation_of(const BoundaryVector& b, double grazing_tol) {
  const double c = normal_component(b);
  if (std::abs(c) < grazing_tol) return Orientation::Tangential;
  return c > 0.0 ? Orientation::Inward : Orientation::Outward;
}

ChartPoint boundary_chart_point(const ManifoldSpec& spec, const BoundaryPoint& p) {
  const int n = spec.disc_dim();
  if (p.u.size() != n) {
    throw Error(ErrorCode::Identification, "boundary point has " + std::to_string(p.u.size()) +
                                               " disc components but the manifold boundary is S^" +
                                               std::to_string(n - 1) + " x S^1");
  }
  if (std::abs(p.u.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::Domain, "boundary point u must be a unit vector");
  }
  ChartPoint c;
  c.coords.resize(n + 1);
  c.coords.head(n) = spec.disc_radius() * p.u;
  c.coords[n] = reduce_angle(p.theta, spec.circle_length());
  return c;
}

EmbeddedBoundaryVector boundary_embed(const ManifoldSpec& spec, const BoundaryVector& b,
                                      double grazing_tol) {
  const int n = spec.disc_dim();
  if (b.direction.size() != n + 1) {
    throw Error(ErrorCode::Identification, "boundary vector has " + std::to_string(b.direction.size()) +
                                               " components, expected " + std::to_string(n + 1));
  }
  EmbeddedBoundaryVector out;
  out.vector.base = boundary_chart_point(spec, b.point);
  const Vec scale = spec.metric_diagonal(out.vector.base.coords).cwiseSqrt();
  out.vector.components = b.direction.cwiseQuotient(scale);
  out.inward_normal = Vec::Zero(n + 1);
  out.inward_normal.head(n) = -b.point.u;
  out.inward_normal = out.inward_normal.cwiseQuotient(scale);
  out.orientation = orientation_of(b, grazing_tol);
  return out;
}

BoundaryVector boundary_from_chart(const ManifoldSpec& spec, const Vec& x, const Vec& v) {
  const int n = spec.disc_dim();
  BoundaryVector b;
  const Vec xh = x.head(n);
  b.point.u = xh / xh.norm();
  b.point.theta = reduce_angle(x[n], spec.circle_length());
  Vec w = v.cwiseProduct(spec.metric_diagonal(x).cwiseSqrt());
  b.direction = w / w.norm();
  return b;
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Contract: return "contract";
    case ErrorCode::Identification: return "identification";
    case ErrorCode::Integration: return "integration";
    case ErrorCode::NoConnection: return "no-connection";
    case ErrorCode::NotDifferentiable: return "not-differentiable";
    case ErrorCode::NearGrazing: return "near-grazing";
    case ErrorCode::TurningPoint: return "turning-point";
    case ErrorCode::Config: return "config";
    case ErrorCode::SamplingMismatch: return "sampling-mismatch";
    case ErrorCode::Io: return "io";
    case ErrorCode::InvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

}  // namespace scatterlab
