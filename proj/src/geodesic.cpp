#include "scatterlab/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "scatterlab/errors.hpp"

namespace scatterlab {

namespace {

using State = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2 * kMaxDim, 1>;

// Dormand-Prince 5(4) tableau with Hairer's dense output coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

class GeodesicStepper {
 public:
  GeodesicStepper(const ManifoldSpec& spec, const IntegratorOptions& opt)
      : spec_(spec), opt_(opt), d_(spec.dim()) {}

  State derivative(const State& y) const {
    State f(2 * d_);
    f.head(d_) = y.tail(d_);
    f.tail(d_) = spec_.acceleration(y.head(d_), y.tail(d_));
    return f;
  }

  // One trial step from y0 (with FSAL derivative k1). Returns the scaled error norm.
  double attempt(const State& y0, const State& k1, double h) {
    k_[0] = k1;
    k_[1] = derivative(y0 + h * (a21 * k_[0]));
    k_[2] = derivative(y0 + h * (a31 * k_[0] + a32 * k_[1]));
    k_[3] = derivative(y0 + h * (a41 * k_[0] + a42 * k_[1] + a43 * k_[2]));
    k_[4] = derivative(y0 + h * (a51 * k_[0] + a52 * k_[1] + a53 * k_[2] + a54 * k_[3]));
    k_[5] = derivative(y0 + h * (a61 * k_[0] + a62 * k_[1] + a63 * k_[2] + a64 * k_[3] + a65 * k_[4]));
    y1_ = y0 + h * (a71 * k_[0] + a73 * k_[2] + a74 * k_[3] + a75 * k_[4] + a76 * k_[5]);
    k_[6] = derivative(y1_);
    const State err = h * (e1 * k_[0] + e3 * k_[2] + e4 * k_[3] + e5 * k_[4] + e6 * k_[5] + e7 * k_[6]);
    double sum = 0.0;
    for (int i = 0; i < err.size(); ++i) {
      const double scale = opt_.atol + opt_.rtol * std::max(std::abs(y0[i]), std::abs(y1_[i]));
      const double r = err[i] / scale;
      sum += r * r;
    }
    h_ = h;
    y0_ = y0;
    return std::sqrt(sum / static_cast<double>(err.size()));
  }

  const State& result() const { return y1_; }
  const State& last_derivative() const { return k_[6]; }

  // Continuous extension on the last attempted step, theta in [0, 1].
  State dense(double theta) const {
    const State ydiff = y1_ - y0_;
    const State bspl = h_ * k_[0] - ydiff;
    const State r4 = ydiff - h_ * k_[6] - bspl;
    const State r5 = h_ * (d1 * k_[0] + d3 * k_[2] + d4 * k_[3] + d5 * k_[4] + d6 * k_[5] + d7 * k_[6]);
    const double t1 = 1.0 - theta;
    return y0_ + theta * (ydiff + t1 * (bspl + theta * (r4 + t1 * r5)));
  }

  static double next_factor(double err) {
    if (err == 0.0) return 5.0;
    return std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
  }

 private:
  const ManifoldSpec& spec_;
  const IntegratorOptions& opt_;
  int d_;
  std::array<State, 7> k_;
  State y0_, y1_;
  double h_ = 0.0;
};

State pack(const Vec& x, const Vec& v) {
  State y(x.size() + v.size());
  y.head(x.size()) = x;
  y.tail(v.size()) = v;
  return y;
}

double step_limit(const ManifoldSpec& spec, const IntegratorOptions& opt, const Vec& x) {
  const double cap = spec.step_cap(x);
  return opt.max_step > 0.0 ? std::min(cap, opt.max_step) : cap;
}

void check_unit(const ManifoldSpec& spec, const Vec& x, const Vec& v, const IntegratorOptions& opt) {
  if (v.size() != spec.dim() || x.size() != spec.dim()) {
    throw Error(ErrorCode::Contract, "start vector has the wrong dimension");
  }
  const double e = spec.norm_squared(x, v);
  if (!(std::abs(e - 1.0) <= opt.unit_tol)) {
    throw Error(ErrorCode::Contract, "start vector is not unit: g(V,V) = " + std::to_string(e));
  }
}

// Every metric in scope is independent of theta, so p = g_theta_theta * theta' is a first
// integral alongside the energy; both are restored after each step. Near-grazing chords have
// TT ~ 1 / |v_h|, so the horizontal energy is rebuilt from its initial value plus the change of
// g_theta_theta, never as 1 - p^2 / g_theta_theta, which cancels catastrophically there.
struct FirstIntegrals {
  double momentum = 0.0;
  double g_vertical = 1.0;  // g_theta_theta at the start
  double horizontal = 0.0;  // horizontal energy at the start
};

FirstIntegrals first_integrals(const ManifoldSpec& spec, const State& y) {
  const int d = spec.dim();
  const int n = spec.disc_dim();
  const Vec g = spec.metric_diagonal(y.head(d));
  FirstIntegrals f;
  f.momentum = g[n] * y[d + n];
  f.g_vertical = g[n];
  for (int i = 0; i < n; ++i) f.horizontal += g[i] * y[d + i] * y[d + i];
  return f;
}

// Returns true when the state changed.
bool project(const ManifoldSpec& spec, State& y, const FirstIntegrals& f) {
  const int d = spec.dim();
  const int n = spec.disc_dim();
  const Vec g = spec.metric_diagonal(y.head(d));
  const State before = y;
  y[d + n] = f.momentum / g[n];
  double horizontal = 0.0;
  for (int i = 0; i < n; ++i) horizontal += g[i] * y[d + i] * y[d + i];
  const double target =
      f.horizontal + f.momentum * f.momentum * (g[n] - f.g_vertical) / (g[n] * f.g_vertical);
  if (target <= 0.0) {
    y.segment(d, n).setZero();
    y[d + n] = std::copysign(1.0 / std::sqrt(g[n]), f.momentum);
  } else if (horizontal > 0.0) {
    y.segment(d, n) *= std::sqrt(target / horizontal);
  }
  return y != before;
}

// Shared driver. `first_cap` bounds the first step (boundary starts). When `detect_exit` is
// false the loop runs until `until` exactly.
struct DriveResult {
  State y;
  double elapsed = 0.0;
  bool exited = false;
  double max_drift = 0.0;
  std::size_t steps = 0;
};

DriveResult drive(const ManifoldSpec& spec, const IntegratorOptions& opt, State y, double until,
                  bool detect_exit, double first_cap, bool reduce, Trajectory* traj) {
  const int d = spec.dim();
  const int n = spec.disc_dim();
  const double period = spec.circle_length();
  GeodesicStepper stepper(spec, opt);
  State k1 = stepper.derivative(y);
  const FirstIntegrals integrals = first_integrals(spec, y);
  DriveResult out;
  double t = 0.0;
  double h = std::min(step_limit(spec, opt, y.head(d)), first_cap);
  if (traj) traj->push_back({0.0, y.head(d), y.tail(d)});

  while (true) {
    const double remaining = until - t;
    if (remaining <= std::max(opt.min_step, 4.0 * std::numeric_limits<double>::epsilon() * until)) break;
    h = std::min({h, remaining, step_limit(spec, opt, y.head(d))});
    if (out.steps >= opt.max_steps) {
      throw Error(ErrorCode::Integration, "step limit exceeded at t = " + std::to_string(t));
    }
    const double err = stepper.attempt(y, k1, h);
    if (!std::isfinite(err) || err > 1.0) {
      h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      if (h < opt.min_step) {
        throw Error(ErrorCode::Integration, "step size underflow at t = " + std::to_string(t));
      }
      continue;
    }
    ++out.steps;
    State y1 = stepper.result();
    State k7 = stepper.last_derivative();

    if (detect_exit && spec.boundary_function(y1.head(d)) > 0.0) {
      // Bisect the crossing on the dense output, then land on it with an exact step.
      double lo = 0.0, hi = 1.0;
      while ((hi - lo) * h > opt.event_tol) {
        const double mid = 0.5 * (lo + hi);
        if (spec.boundary_function(stepper.dense(mid).head(d)) > 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      const double h_event = 0.5 * (lo + hi) * h;
      if (h_event > 0.0) {
        stepper.attempt(y, k1, h_event);
        y = stepper.result();
      }
      t += h_event;
      out.max_drift = std::max(out.max_drift, std::abs(spec.norm_squared(y.head(d), y.tail(d)) - 1.0));
      project(spec, y, integrals);
      out.exited = true;
      if (traj) traj->push_back({t, y.head(d), y.tail(d)});
      break;
    }

    t += h;
    out.max_drift = std::max(out.max_drift, std::abs(spec.norm_squared(y1.head(d), y1.tail(d)) - 1.0));
    if (project(spec, y1, integrals)) k7 = stepper.derivative(y1);
    if (reduce) y1[n] = reduce_angle(y1[n], period);
    y = y1;
    k1 = k7;
    if (traj) traj->push_back({t, y.head(d), y.tail(d)});
    h *= GeodesicStepper::next_factor(err);
  }
  if (!out.exited) t = until;
  out.y = y;
  out.elapsed = t;
  return out;
}

}  // namespace

const char* exit_status_name(ExitStatus status) {
  switch (status) {
    case ExitStatus::Exited: return "exited";
    case ExitStatus::Trapped: return "trapped";
    case ExitStatus::Grazing: return "grazing";
  }
  return "unknown";
}

TraceResult integrate_until_exit(const ManifoldSpec& spec, const BoundaryVector& start, double budget,
                                 const IntegratorOptions& options) {
  if (!(budget > 0.0)) throw Error(ErrorCode::Contract, "budget must be positive");
  const EmbeddedBoundaryVector emb = boundary_embed(spec, start, options.grazing_tol);
  const Vec& x0 = emb.vector.base.coords;
  const Vec& v0 = emb.vector.components;
  check_unit(spec, x0, v0, options);

  TraceResult out;
  const double c = normal_component(start);
  if (emb.orientation == Orientation::Outward) {
    throw Error(ErrorCode::Contract, "start vector points outward: <V, eta+> = " + std::to_string(c));
  }
  if (emb.orientation == Orientation::Tangential) {
    out.verdict = {ExitStatus::Grazing, start, 0.0};
    out.final_state = {emb.vector.base, v0, 0.0};
    if (options.record) out.trajectory.push_back({0.0, x0, v0});
    return out;
  }

  // Every family in scope is flat within 0.05 of the boundary (or has TT >= 2), so the chord
  // from a boundary start lasts at least 2 R <V, eta+>; half of that keeps the first step inside.
  const DriveResult r = drive(spec, options, pack(x0, v0), budget, true, c * spec.disc_radius(), true,
                              options.record ? &out.trajectory : nullptr);
  const int d = spec.dim();
  out.steps = r.steps;
  out.max_energy_drift = r.max_drift;
  out.final_state = {ChartPoint{r.y.head(d)}, r.y.tail(d), r.elapsed};
  if (r.exited) {
    out.verdict = {ExitStatus::Exited, boundary_from_chart(spec, r.y.head(d), r.y.tail(d)), r.elapsed};
  } else {
    out.verdict = {ExitStatus::Trapped, std::nullopt, budget};
  }
  return out;
}

TraceResult integrate_until_exit(const ManifoldSpec& spec, const TangentVector& start, double budget,
                                 const IntegratorOptions& options) {
  if (!(budget > 0.0)) throw Error(ErrorCode::Contract, "budget must be positive");
  const Vec& x0 = start.base.coords;
  const Vec& v0 = start.components;
  check_unit(spec, x0, v0, options);
  const double f0 = spec.boundary_function(x0);
  const double r = spec.disc_radius();
  if (std::abs(f0) <= 1e-12 * r * r) {
    return integrate_until_exit(spec, boundary_from_chart(spec, x0, v0), budget, options);
  }
  if (f0 > 0.0) throw Error(ErrorCode::Domain, "start point lies outside the manifold");

  TraceResult out;
  Vec x = x0;
  x[spec.disc_dim()] = reduce_angle(x[spec.disc_dim()], spec.circle_length());
  const DriveResult res = drive(spec, options, pack(x, v0), budget, true,
                                std::numeric_limits<double>::infinity(), true,
                                options.record ? &out.trajectory : nullptr);
  const int d = spec.dim();
  out.steps = res.steps;
  out.max_energy_drift = res.max_drift;
  out.final_state = {ChartPoint{res.y.head(d)}, res.y.tail(d), res.elapsed};
  if (res.exited) {
    out.verdict = {ExitStatus::Exited, boundary_from_chart(spec, res.y.head(d), res.y.tail(d)),
                   res.elapsed};
  } else {
    out.verdict = {ExitStatus::Trapped, std::nullopt, budget};
  }
  return out;
}

GeodesicState integrate_for(const ManifoldSpec& spec, const TangentVector& start, double time,
                            Model model, const IntegratorOptions& options, Trajectory* trajectory) {
  if (!(time >= 0.0)) throw Error(ErrorCode::Contract, "integration time must be non-negative");
  const Vec& x0 = start.base.coords;
  const Vec& v0 = start.components;
  check_unit(spec, x0, v0, options);
  const bool reduce = model == Model::Compact;
  Vec x = x0;
  if (reduce) x[spec.disc_dim()] = reduce_angle(x[spec.disc_dim()], spec.circle_length());
  const DriveResult r = drive(spec, options, pack(x, v0), time, false,
                              std::numeric_limits<double>::infinity(), reduce, trajectory);
  const int d = spec.dim();
  Vec v = r.y.tail(d);
  v /= std::sqrt(spec.norm_squared(r.y.head(d), v));
  return {ChartPoint{r.y.head(d)}, v, r.elapsed};
}

// ---------------------------------------------------------------------------------------------
// Shooting

namespace {

// Deterministic, roughly uniform directions on S^{d-1}.
std::vector<Vec> spread_directions(int d, int count) {
  std::vector<Vec> dirs;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    Vec w = Vec::Zero(d);
    if (d == 1) {
      w[0] = i % 2 == 0 ? 1.0 : -1.0;
    } else if (d == 2) {
      const double a = kTwoPi * (i + 0.5) / count;
      w << std::cos(a), std::sin(a);
    } else {
      // Fibonacci points on S^2 embedded in the first three axes, tilted into the rest.
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * i;
      w[0] = rad * std::cos(phi);
      w[1] = rad * std::sin(phi);
      w[d - 1] = z;
      for (int k = 2; k < d - 1; ++k) w[k] = 0.25 * std::sin(phi * (k + 1));
      w.normalize();
    }
    dirs.push_back(w);
  }
  return dirs;
}

class Shooter {
 public:
  Shooter(const ManifoldSpec& spec, const Vec& p, const ConnectOptions& opt)
      : spec_(spec), p_(p), opt_(opt) {}

  // Endpoint of the geodesic with initial velocity w after time |w|_g (unwrapped angle).
  Vec endpoint(const Vec& w) const {
    const double len = std::sqrt(spec_.norm_squared(p_, w));
    if (len == 0.0) return p_;
    const TangentVector start{ChartPoint{p_}, w / len};
    return integrate_for(spec_, start, len, Model::UniversalCover, opt_.integrator).position.coords;
  }

 private:
  const ManifoldSpec& spec_;
  Vec p_;
  const ConnectOptions& opt_;
};

}  // namespace

Connection connect(const ManifoldSpec& spec, const ChartPoint& p, const ChartPoint& q, int winding,
                   Model model, const ConnectOptions& options) {
  const int d = spec.dim();
  const int n = spec.disc_dim();
  if (!spec.in_domain(p.coords, model) || !spec.in_domain(q.coords, model)) {
    throw Error(ErrorCode::Domain, "connect endpoints must lie in the chart domain");
  }
  const double period = spec.circle_length();
  Vec x_p = p.coords;
  Vec target = q.coords;
  if (model == Model::Compact) {
    x_p[n] = reduce_angle(x_p[n], period);
    target[n] = reduce_angle(target[n], period);
  }
  target[n] += winding * period;

  const Vec delta = target - x_p;
  const double chart_len = delta.norm();
  Connection out;
  out.winding = winding;
  if (chart_len == 0.0) {
    out.initial_direction = Vec::Zero(d);
    out.initial_direction[n] = 1.0 / std::sqrt(spec.metric_diagonal(x_p)[n]);
    return out;
  }

  // Roundoff along a long geodesic grows with its length, so the tolerance is relative.
  const double tol = options.tolerance * std::max(1.0, chart_len);
  Shooter shoot(spec, x_p, options);
  std::vector<Vec> guesses{delta};
  for (const Vec& dir : spread_directions(d, options.starts - 1)) guesses.push_back(chart_len * dir);

  for (int s = 0; s < static_cast<int>(guesses.size()); ++s) {
    Vec w = guesses[s];
    Vec r = shoot.endpoint(w) - target;
    double rn = r.norm();
    int iter = 0;
    bool ok = rn < tol;
    for (; !ok && iter < options.max_iterations; ++iter) {
      const double step = options.fd_step * std::max(1.0, w.norm());
      Mat jac(d, d);
      const Vec base = r + target;
      for (int j = 0; j < d; ++j) {
        Vec wj = w;
        wj[j] += step;
        jac.col(j) = (shoot.endpoint(wj) - base) / step;
      }
      const Vec dw = jac.colPivHouseholderQr().solve(-r);
      if (!dw.allFinite()) break;
      bool accepted = false;
      for (double lambda = 1.0; lambda >= 1.0 / 256; lambda *= 0.5) {
        const Vec trial = w + lambda * dw;
        if (spec.norm_squared(x_p, trial) <= 0.0) continue;
        const Vec rt = shoot.endpoint(trial) - target;
        if (rt.norm() < (1.0 - 1e-4 * lambda) * rn) {
          w = trial;
          r = rt;
          rn = rt.norm();
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      ok = rn < tol;
    }
    if (ok) {
      const double len = std::sqrt(spec.norm_squared(x_p, w));
      out.initial_direction = w / len;
      out.length = len;
      out.start_index = s;
      out.iterations = iter;
      out.residual = rn;
      return out;
    }
  }
  throw Error(ErrorCode::NoConnection, "shooting did not converge from " +
                                           std::to_string(guesses.size()) + " starts (winding " +
                                           std::to_string(winding) + ")");
}

double distance(const ManifoldSpec& spec, const ChartPoint& p, const ChartPoint& q,
                std::span<const int> windings, Model model, const ConnectOptions& options) {
  if (model == Model::UniversalCover) return connect(spec, p, q, 0, model, options).length;
  if (windings.empty()) throw Error(ErrorCode::InvalidArgument, "distance needs at least one winding");
  double best = std::numeric_limits<double>::infinity();
  std::optional<Error> last;
  for (int k : windings) {
    try {
      best = std::min(best, connect(spec, p, q, k, model, options).length);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoConnection) throw;
      last = e;
    }
  }
  if (!std::isfinite(best)) throw *last;
  return best;
}

}  // namespace scatterlab
