#include "symito/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "symito/numeric.hpp"
#include "symito/quadrature.hpp"
#include "symito/rng.hpp"

namespace symito {
namespace {

bool finite(double x) { return std::isfinite(x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void ProcessSpec::validate() const {
  require(finite(sigma2) && finite(alpha) && finite(scale) && finite(delta) &&
              finite(rate) && finite(x0) && finite(y0),
          "process spec: non-finite parameter");
  require(sigma2 >= 0.0, "process spec: sigma2 must be nonnegative");
  switch (kind) {
    case ProcessKind::BrownianMotion:
      break;
    case ProcessKind::TruncatedAlphaStable:
    case ProcessKind::BrownianPlusJumps:
      require(alpha > 0.0 && alpha < 2.0,
              "process spec: alpha must lie in (0, 2)");
      require(scale > 0.0, "process spec: scale must be positive");
      require(delta > 0.0, "process spec: delta must be positive");
      if (kind == ProcessKind::TruncatedAlphaStable)
        require(sigma2 == 0.0,
                "process spec: pure-jump kind cannot carry sigma2 > 0");
      else
        require(sigma2 > 0.0,
                "process spec: brownian_plus_jumps needs sigma2 > 0");
      break;
    case ProcessKind::CompoundPoissonSymmetric:
      require(sigma2 == 0.0,
              "process spec: pure-jump kind cannot carry sigma2 > 0");
      require(rate >= 0.0, "process spec: rate must be nonnegative");
      require(delta >= 0.0, "process spec: delta must be nonnegative");
      switch (jump_dist.kind) {
        case JumpDistKind::TwoPoint:
          require(jump_dist.a > 0.0, "process spec: two-point size must be > 0");
          break;
        case JumpDistKind::UniformSymmetric:
          require(jump_dist.a >= 0.0 && jump_dist.b > jump_dist.a,
                  "process spec: uniform radii need 0 <= a < b");
          break;
        case JumpDistKind::GaussianSymmetric:
          require(jump_dist.a > 0.0, "process spec: gaussian sd must be > 0");
          break;
      }
      break;
    case ProcessKind::Diffusion2D:
      require(a11 > 0.0 && a22 > 0.0 && a11 * a22 - a12 * a12 > 0.0,
              "process spec: diffusion matrix must be SPD");
      break;
  }
}

ProcessSpec ProcessSpec::brownian(double sigma2, double x0) {
  ProcessSpec s;
  s.kind = ProcessKind::BrownianMotion;
  s.sigma2 = sigma2;
  s.x0 = x0;
  return s;
}

ProcessSpec ProcessSpec::truncated_stable(double alpha, double scale,
                                          double delta, double x0) {
  ProcessSpec s;
  s.kind = ProcessKind::TruncatedAlphaStable;
  s.sigma2 = 0.0;
  s.alpha = alpha;
  s.scale = scale;
  s.delta = delta;
  s.x0 = x0;
  return s;
}

ProcessSpec ProcessSpec::compound_poisson(double rate, JumpDist dist,
                                          double delta, double x0) {
  ProcessSpec s;
  s.kind = ProcessKind::CompoundPoissonSymmetric;
  s.sigma2 = 0.0;
  s.rate = rate;
  s.jump_dist = dist;
  s.delta = delta;
  s.x0 = x0;
  return s;
}

ProcessSpec ProcessSpec::brownian_plus_jumps(double sigma2, double alpha,
                                             double scale, double delta,
                                             double x0) {
  ProcessSpec s;
  s.kind = ProcessKind::BrownianPlusJumps;
  s.sigma2 = sigma2;
  s.alpha = alpha;
  s.scale = scale;
  s.delta = delta;
  s.x0 = x0;
  return s;
}

ProcessSpec ProcessSpec::diffusion2d(double a11, double a12, double a22,
                                     double x0, double y0) {
  ProcessSpec s;
  s.kind = ProcessKind::Diffusion2D;
  s.sigma2 = 0.0;
  s.a11 = a11;
  s.a12 = a12;
  s.a22 = a22;
  s.x0 = x0;
  s.y0 = y0;
  return s;
}

LevyMeasure levy_measure(const ProcessSpec& spec) {
  LevyMeasure m;
  m.delta = spec.delta;
  switch (spec.kind) {
    case ProcessKind::BrownianMotion:
    case ProcessKind::Diffusion2D:
      return m;
    case ProcessKind::TruncatedAlphaStable:
    case ProcessKind::BrownianPlusJumps: {
      const double c = spec.scale;
      const double a = spec.alpha;
      m.upper = std::numeric_limits<double>::infinity();
      m.density = [c, a](double y) { return c * std::pow(y, -1.0 - a); };
      m.tail_alpha = a;
      m.tail_scale = c;
      m.intensity = 2.0 * c * std::pow(spec.delta, -a) / a;
      return m;
    }
    case ProcessKind::CompoundPoissonSymmetric: {
      const double lam = spec.rate;
      const JumpDist& d = spec.jump_dist;
      switch (d.kind) {
        case JumpDistKind::TwoPoint:
          if (d.a > spec.delta && lam > 0.0) {
            m.atoms.push_back({d.a, 0.5 * lam});
            m.intensity = lam;
          }
          m.upper = spec.delta;  // no density part
          return m;
        case JumpDistKind::UniformSymmetric: {
          const double lo = std::max(d.a, spec.delta);
          if (lo < d.b && lam > 0.0) {
            const double h = 0.5 * lam / (d.b - d.a);
            m.upper = d.b;
            m.density = [h](double) { return h; };
            m.intensity = 2.0 * h * (d.b - lo);
            m.delta = lo;
          }
          return m;
        }
        case JumpDistKind::GaussianSymmetric: {
          const double sd = d.a;
          if (lam > 0.0) {
            m.upper = spec.delta + 12.0 * sd;  // negligible mass beyond
            m.density = [lam, sd](double y) {
              const double z = y / sd;
              return lam * std::exp(-0.5 * z * z) /
                     (sd * std::sqrt(2.0 * kPi));
            };
            m.intensity = 2.0 * lam * (1.0 - norm_cdf(spec.delta / sd));
          }
          return m;
        }
      }
      return m;
    }
  }
  return m;
}

namespace {

/// Draws one jump size from the normalized truncated measure.
double sample_jump_size(const ProcessSpec& spec, const LevyMeasure& m,
                        Rng& rng) {
  const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
  switch (spec.kind) {
    case ProcessKind::TruncatedAlphaStable:
    case ProcessKind::BrownianPlusJumps: {
      // one-sided tail is Pareto: P(Y > y | Y > delta) = (y/delta)^(-alpha)
      const double u = rng.uniform01();
      return sign * spec.delta * std::pow(u, -1.0 / spec.alpha);
    }
    case ProcessKind::CompoundPoissonSymmetric:
      switch (spec.jump_dist.kind) {
        case JumpDistKind::TwoPoint:
          return sign * spec.jump_dist.a;
        case JumpDistKind::UniformSymmetric:
          return sign * rng.uniform(m.delta, spec.jump_dist.b);
        case JumpDistKind::GaussianSymmetric: {
          // rejection below the truncation cutoff
          for (;;) {
            const double g = spec.jump_dist.a * rng.normal();
            if (std::abs(g) > spec.delta) return g;
          }
        }
      }
      return 0.0;
    default:
      return 0.0;
  }
}

}  // namespace

double SamplePath::left_limit(std::size_t i, int c) const {
  if (const JumpRecord* r = jump_record_at(i)) return r->left[c];
  return value(i, c);
}

double SamplePath::jump_at(std::size_t i, int c) const {
  if (const JumpRecord* r = jump_record_at(i)) return r->size[c];
  return 0.0;
}

const JumpRecord* SamplePath::jump_record_at(std::size_t i) const {
  const auto it = std::lower_bound(
      jumps.begin(), jumps.end(), static_cast<std::int64_t>(i),
      [](const JumpRecord& r, std::int64_t idx) { return r.index < idx; });
  if (it != jumps.end() && it->index == static_cast<std::int64_t>(i)) return &*it;
  return nullptr;
}

SamplePath SamplePath::window(std::size_t from, std::size_t n_steps) const {
  if (from + n_steps > steps())
    throw std::invalid_argument("window: range exceeds path length");
  SamplePath w;
  w.dim = dim;
  w.dt = dt;
  w.seed = seed;
  w.binning_warning = binning_warning;
  w.values.assign(values.begin() + from * dim,
                  values.begin() + (from + n_steps + 1) * dim);
  w.cont_increments.assign(cont_increments.begin() + from * dim,
                           cont_increments.begin() + (from + n_steps) * dim);
  for (const JumpRecord& j : jumps) {
    if (j.index > static_cast<std::int64_t>(from) &&
        j.index <= static_cast<std::int64_t>(from + n_steps)) {
      JumpRecord r = j;
      r.index -= static_cast<std::int64_t>(from);
      w.jumps.push_back(r);
    }
  }
  return w;
}

SamplePath simulate_path(const ProcessSpec& spec, double horizon, double dt,
                         std::uint64_t seed) {
  spec.validate();
  require(finite(horizon) && finite(dt) && horizon > 0.0 && dt > 0.0,
          "simulate_path: horizon and dt must be positive");
  require(dt < horizon, "simulate_path: dt must be smaller than horizon");
  const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
  require(n >= 2, "simulate_path: need horizon/dt >= 2");

  const int dim = spec.dim();
  SamplePath path;
  path.dim = dim;
  path.dt = dt;
  path.seed = seed;

  Rng rng(seed);
  const LevyMeasure lm = levy_measure(spec);

  // Jump times first: Poisson arrivals binned to grid points; a collision
  // pushes the later jump to the next free point.
  std::vector<std::pair<std::size_t, double>> jump_sizes;
  if (spec.has_jumps() && !lm.empty()) {
    path.binning_warning = lm.intensity * dt > 0.1;
    double t = rng.exponential(lm.intensity);
    std::size_t last_used = 0;
    while (t <= horizon) {
      auto g = static_cast<std::size_t>(std::ceil(t / dt));
      g = std::max<std::size_t>(g, 1);
      if (g <= last_used) g = last_used + 1;
      if (g > n) break;
      last_used = g;
      jump_sizes.emplace_back(g, sample_jump_size(spec, lm, rng));
      t += rng.exponential(lm.intensity);
    }
  }

  // Continuous channel.
  path.cont_increments.assign(n * dim, 0.0);
  if (dim == 1) {
    if (spec.sigma2 > 0.0) {
      const double s = std::sqrt(spec.sigma2 * dt);
      for (std::size_t i = 0; i < n; ++i)
        path.cont_increments[i] = s * rng.normal();
    }
  } else {
    // Cholesky factor of the diffusion matrix; increments ~ N(0, a*dt).
    const double l11 = std::sqrt(spec.a11);
    const double l21 = spec.a12 / l11;
    const double l22 = std::sqrt(spec.a22 - l21 * l21);
    const double sdt = std::sqrt(dt);
    for (std::size_t i = 0; i < n; ++i) {
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      path.cont_increments[2 * i] = sdt * l11 * z1;
      path.cont_increments[2 * i + 1] = sdt * (l21 * z1 + l22 * z2);
    }
  }

  // Assembly: values by cumulative sums so the closure invariant is exact.
  path.values.assign((n + 1) * dim, 0.0);
  path.values[0] = spec.x0;
  if (dim == 2) path.values[1] = spec.y0;
  auto jump_it = jump_sizes.begin();
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < dim; ++c) {
      path.values[(i + 1) * dim + c] =
          path.values[i * dim + c] + path.cont_increments[i * dim + c];
    }
    if (jump_it != jump_sizes.end() && jump_it->first == i + 1) {
      JumpRecord rec;
      rec.index = static_cast<std::int64_t>(i + 1);
      rec.left = {path.values[(i + 1) * dim], dim == 2 ? path.values[(i + 1) * dim + 1] : 0.0};
      rec.size = {jump_it->second, 0.0};
      path.values[(i + 1) * dim] += jump_it->second;
      path.jumps.push_back(rec);
      ++jump_it;
    }
  }
  return path;
}

namespace {

/// Density-part integral of h over (lo, hi) against the one-sided density.
/// converged reports quadrature convergence when requested; integrands with
/// mere jump discontinuities may exhaust the subdivision depth harmlessly,
/// so only callers with smoothness preconditions should enforce it.
double density_integral(const LevyMeasure& m,
                        const std::function<double(double)>& h, double lo,
                        double hi, double rel_tol, bool* converged = nullptr) {
  if (!m.density) return 0.0;
  lo = std::max(lo, m.delta);
  hi = std::min(hi, m.upper);
  if (!(lo < hi)) return 0.0;
  QuadratureResult res;
  if (m.tail_alpha > 0.0) {
    // Pure power law: substitute the one-sided tail-mass coordinate
    // v = (y/lo)^(-alpha). The Levy weight disappears, the domain becomes
    // (v_hi, 1] and the integrand h(lo * v^(-1/alpha)) is as smooth as h,
    // so the quadrature never fights the multi-decade density.
    const double alpha = m.tail_alpha;
    const double c = m.tail_scale;
    const double v_hi =
        std::isfinite(hi) ? std::pow(hi / lo, -alpha) : 0.0;
    const auto g = [&](double v) { return h(lo * std::pow(v, -1.0 / alpha)); };
    res = integrate(g, v_hi, 1.0, rel_tol);
    res.value *= c * std::pow(lo, -alpha) / alpha;
  } else {
    const auto f = [&](double y) { return h(y) * m.density(y); };
    res = integrate(f, lo, hi, rel_tol);
  }
  if (converged) *converged = res.converged;
  return res.value;
}

}  // namespace

double levy_tail_integral(const ProcessSpec& spec,
                          const std::function<double(double)>& g, double eps,
                          double r, double rel_tol) {
  if (!(eps > 0.0) || !(eps < r))
    throw std::domain_error("levy_tail_integral: need 0 < eps < r");
  const LevyMeasure m = levy_measure(spec);
  if (m.empty()) return 0.0;
  const auto both = [&](double y) { return g(y) + g(-y); };
  bool converged = true;
  double out = density_integral(m, both, eps, r, rel_tol, &converged);
  for (const LevyMeasure::Atom& a : m.atoms)
    if (a.y > eps && a.y < r) out += a.mass * both(a.y);
  if (!std::isfinite(out) || !converged)
    throw std::domain_error(
        "levy_tail_integral: integrand is not integrable on the region");
  return out;
}

double compensator_integrand(const ProcessSpec& spec,
                             const FunctionDescriptor& u,
                             const FunctionDescriptor& F, double x,
                             double lo_cut, double hi_cut, double rel_tol) {
  const LevyMeasure m = levy_measure(spec);
  if (m.empty() || F.form() == FunctionForm::Constant) return 0.0;
  if (u.is_identity() && F.form() == FunctionForm::Identity) return 0.0;  // odd

  const double fx = F(u(x));
  if (u.is_identity()) {
    // The jump-size region is exactly {lo_cut < |z| < hi_cut}.
    const double lo = std::max(lo_cut, m.delta);
    const auto h = [&](double z) { return (F(x + z) - fx) + (F(x - z) - fx); };
    double out = density_integral(m, h, lo, hi_cut, rel_tol);
    for (const LevyMeasure::Atom& a : m.atoms)
      if (a.y > lo_cut && a.y < hi_cut) out += a.mass * h(a.y);
    if (!std::isfinite(out))
      throw std::runtime_error("compensator quadrature did not converge");
    return out;
  }

  const double ux = u(x);
  const auto g = [&](double z) {
    const double d = u(x + z) - ux;
    const double ad = std::abs(d);
    if (ad <= lo_cut || ad >= hi_cut) return 0.0;
    return F(u(x + z)) - fx;
  };
  const auto h = [&](double z) { return g(z) + g(-z); };
  double out = density_integral(m, h, m.delta,
                                std::numeric_limits<double>::infinity(),
                                rel_tol);
  for (const LevyMeasure::Atom& a : m.atoms) out += a.mass * h(a.y);
  if (!std::isfinite(out))
    throw std::runtime_error("compensator quadrature did not converge");
  return out;
}

CompensatorTable::CompensatorTable(const ProcessSpec& spec,
                                   const FunctionDescriptor& u,
                                   const FunctionDescriptor& F, double lo_cut,
                                   double hi_cut, double x_lo, double x_hi,
                                   std::size_t nodes)
    : spec_(spec), u_(u), f_(F), lo_cut_(lo_cut), hi_cut_(hi_cut) {
  zero_ = !spec.has_jumps() || levy_measure(spec).empty() ||
          F.form() == FunctionForm::Constant ||
          (u.is_identity() && F.form() == FunctionForm::Identity);
  if (zero_) return;
  if (!(x_hi > x_lo) || nodes < 2)
    throw std::invalid_argument("CompensatorTable: bad state range");
  x_lo_ = x_lo;
  dx_ = (x_hi - x_lo) / static_cast<double>(nodes - 1);
  table_.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i)
    table_[i] = compensator_integrand(spec, u, F, x_lo_ + dx_ * i, lo_cut_,
                                      hi_cut_);
}

double CompensatorTable::operator()(double x) const {
  if (zero_) return 0.0;
  const double pos = (x - x_lo_) / dx_;
  if (pos < 0.0 || pos > static_cast<double>(table_.size() - 1))
    return compensator_integrand(spec_, u_, f_, x, lo_cut_, hi_cut_);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= table_.size()) return table_.back();
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * table_[i] + w * table_[i + 1];
}

double s_epsilon(const ProcessSpec& spec, const FunctionDescriptor& u,
                 double eps, const StateWindow& window) {
  if (!(eps > 0.0)) throw std::domain_error("s_epsilon: eps must be positive");
  const LevyMeasure m = levy_measure(spec);
  if (m.empty()) return 0.0;

  if (u.is_identity()) {
    // The region is exactly {delta < |y| < eps}.
    double out = 0.0;
    for (const LevyMeasure::Atom& a : m.atoms)
      if (a.y < eps) out += 2.0 * a.mass * a.y * a.y;
    if (eps <= m.delta) return out;
    if (m.tail_alpha > 0.0) {
      // closed form: 2c (eps^(2-a) - delta^(2-a)) / (2-a)
      const double a = m.tail_alpha;
      out += 2.0 * m.tail_scale *
             (std::pow(eps, 2.0 - a) - std::pow(m.delta, 2.0 - a)) /
             (2.0 - a);
      return out;
    }
    out += density_integral(m, [](double y) { return 2.0 * y * y; }, m.delta,
                            eps, 1e-12);
    return out;
  }

  // General u: indicator folded into the integrand, supremum over a sampled
  // compact state window.
  double sup = 0.0;
  for (int i = 0; i < window.samples; ++i) {
    const double x =
        window.lo + (window.hi - window.lo) * i /
                        std::max(1, window.samples - 1);
    const double ux = u(x);
    const auto h = [&](double y) {
      const double d = u(x + y) - ux;
      return (std::abs(d) < eps) ? d * d : 0.0;
    };
    double v = density_integral(m, [&](double y) { return h(y) + h(-y); },
                                m.delta, std::numeric_limits<double>::infinity(),
                                1e-10);
    for (const LevyMeasure::Atom& a : m.atoms) v += a.mass * (h(a.y) + h(-a.y));
    sup = std::max(sup, v);
  }
  return sup;
}

}  // namespace symito
