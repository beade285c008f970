#include "symito/path_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "symito/numeric.hpp"

namespace symito {

double AfPath::at_time(double t) const {
  for (std::size_t j = 0; j < eval_idx.size(); ++j)
    if (std::abs(time_at(j) - t) <= 0.5 * parent->dt) return values[j];
  throw std::invalid_argument("AfPath::at_time: t is not an eval point");
}

std::vector<std::size_t> full_grid(const SamplePath& path) {
  std::vector<std::size_t> g(path.steps() + 1);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = i;
  return g;
}

std::vector<std::size_t> sqrt_grid(std::size_t n_steps) {
  const auto m = static_cast<std::size_t>(
      std::max(1.0, std::floor(std::sqrt(static_cast<double>(n_steps)))));
  return uniform_grid(n_steps, m);
}

std::vector<std::size_t> uniform_grid(std::size_t n_steps,
                                      std::size_t segments) {
  segments = std::max<std::size_t>(1, std::min(segments, n_steps));
  std::vector<std::size_t> g;
  g.reserve(segments + 1);
  g.push_back(0);
  for (std::size_t j = 1; j <= segments; ++j) {
    const auto idx = static_cast<std::size_t>(
        std::llround(static_cast<double>(j) * static_cast<double>(n_steps) /
                     static_cast<double>(segments)));
    if (idx > g.back()) g.push_back(idx);
  }
  return g;
}

std::size_t grid_index(const SamplePath& path, double t) {
  const auto k = static_cast<std::size_t>(std::llround(t / path.dt));
  if (k > path.steps() || std::abs(path.time_at(k) - t) > 1e-9 * std::max(1.0, t))
    throw std::invalid_argument("time is not on the path grid");
  return k;
}

std::vector<std::size_t> checkpoint_grid(const SamplePath& path,
                                         std::span<const double> times) {
  std::vector<std::size_t> g{0};
  for (double t : times) {
    const std::size_t k = grid_index(path, t);
    if (k > g.back()) g.push_back(k);
  }
  return g;
}

AfPath ito_integral(std::span<const double> f_left, const AfPath& integrator) {
  if (f_left.size() + 1 != integrator.points())
    throw std::invalid_argument(
        "ito_integral: integrand grid does not match integrator grid");
  AfPath out;
  out.parent = integrator.parent;
  out.eval_idx = integrator.eval_idx;
  out.values.resize(integrator.points());
  KahanSum acc;
  out.values[0] = 0.0;
  for (std::size_t j = 0; j + 1 < integrator.points(); ++j) {
    acc.add(f_left[j] * (integrator.values[j + 1] - integrator.values[j]));
    out.values[j + 1] = acc.value();
  }
  return out;
}

FukushimaParts fukushima_decompose(const SamplePath& path,
                                   const FunctionDescriptor& u,
                                   const ProcessSpec& spec,
                                   const CompensatorTable* table) {
  if (path.dim != 1)
    throw std::invalid_argument("fukushima_decompose: 1-d paths only");
  const std::size_t n = path.steps();
  FukushimaParts parts;
  for (AfPath* af : {&parts.m_uc, &parts.m_uj, &parts.n_u}) {
    af->parent = &path;
    af->eval_idx = full_grid(path);
    af->values.assign(n + 1, 0.0);
  }

  const bool jumps = spec.has_jumps() && !levy_measure(spec).empty();
  // For the identity map the compensator integrand is odd, so it vanishes
  // against the symmetric measure.
  const bool comp_zero = !jumps || u.is_identity();
  KahanSum cont, raw, comp;
  const double u0 = u(path.value(0));
  for (std::size_t i = 0; i < n; ++i) {
    const double x = path.value(i);
    cont.add(u.derivative(x) * path.increment(i));
    if (jumps && !comp_zero) {
      const double c = table ? (*table)(x)
                             : compensator_integrand(
                                   spec, u, FunctionDescriptor::identity(), x,
                                   0.0, std::numeric_limits<double>::infinity());
      comp.add(c * path.dt);
    }
    if (const JumpRecord* r = path.jump_record_at(i + 1))
      raw.add(u(path.value(i + 1)) - u(r->left[0]));
    parts.m_uc.values[i + 1] = cont.value();
    parts.m_uj.values[i + 1] = raw.value() - comp.value();
    parts.n_u.values[i + 1] = (u(path.value(i + 1)) - u0) -
                              parts.m_uc.values[i + 1] -
                              parts.m_uj.values[i + 1];
  }
  return parts;
}

AfPath quadratic_variation(const AfPath& m, QvMode mode,
                           const FunctionDescriptor& u,
                           const ProcessSpec& spec) {
  AfPath out;
  out.parent = m.parent;
  out.eval_idx = m.eval_idx;
  out.values.assign(m.points(), 0.0);
  KahanSum acc;
  if (mode == QvMode::Realized) {
    for (std::size_t j = 0; j + 1 < m.points(); ++j) {
      const double d = m.values[j + 1] - m.values[j];
      acc.add(d * d);
      out.values[j + 1] = acc.value();
    }
    return out;
  }
  const SamplePath& path = *m.parent;
  if (path.dim != 1)
    throw std::invalid_argument("quadratic_variation: 1-d paths only");
  for (std::size_t j = 0; j + 1 < m.points(); ++j) {
    for (std::size_t i = m.eval_idx[j]; i < m.eval_idx[j + 1]; ++i) {
      const double du = u.derivative(path.value(i));
      acc.add(du * du * spec.sigma2 * path.dt);
    }
    out.values[j + 1] = acc.value();
  }
  return out;
}

EnergyEstimate energy_estimate(
    const std::function<AfPath(const SamplePath&)>& builder,
    const ProcessSpec& spec, double t, int n_paths, double dt,
    std::uint64_t seed_base, StartProtocol start, double burn_in) {
  if (n_paths < 2)
    throw std::invalid_argument("energy_estimate: need at least 2 paths");
  if (!(t > 0.0)) throw std::invalid_argument("energy_estimate: t must be > 0");
  std::vector<double> samples(static_cast<std::size_t>(n_paths));
  const double horizon =
      start == StartProtocol::StationaryWindow ? burn_in + t : t;
  for (int p = 0; p < n_paths; ++p) {
    SamplePath path = simulate_path(spec, horizon, dt,
                                    seed_base + static_cast<std::uint64_t>(p));
    if (start == StartProtocol::StationaryWindow) {
      const std::size_t b = grid_index(path, burn_in);
      path = path.window(b, path.steps() - b);
    }
    const AfPath af = builder(path);
    const double m_t = af.values.back();
    samples[static_cast<std::size_t>(p)] = m_t * m_t / (2.0 * t);
  }
  const SummaryStats s = summarize(samples);
  return {s.mean, s.se, n_paths};
}

}  // namespace symito
