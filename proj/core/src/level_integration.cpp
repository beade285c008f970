#include "symito/level_integration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "symito/numeric.hpp"
#include "symito/quadrature.hpp"

namespace symito {

LevelGrid::LevelGrid(std::vector<double> levels) : z(std::move(levels)) {
  if (z.size() < 2) throw std::invalid_argument("LevelGrid: need >= 2 levels");
  for (std::size_t i = 0; i + 1 < z.size(); ++i)
    if (!(z[i] < z[i + 1]))
      throw std::invalid_argument("LevelGrid: levels must strictly increase");
}

LevelGrid LevelGrid::uniform(double lo, double hi, std::size_t cells) {
  if (!(lo < hi) || cells == 0)
    throw std::invalid_argument("LevelGrid::uniform: bad range");
  std::vector<double> z(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i)
    z[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
  return LevelGrid(std::move(z));
}

LevelGrid LevelGrid::spanning(const SamplePath& path,
                              const FunctionDescriptor& u, std::size_t cells) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i <= path.steps(); ++i) {
    const double v = u(path.value(i));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo < hi)) {  // constant path
    lo -= 0.5;
    hi += 0.5;
  }
  const double h = (hi - lo) / static_cast<double>(cells);
  return uniform(lo - h, hi + h, cells);
}

ElementaryFunction::ElementaryFunction(LevelGrid g, std::vector<double> c)
    : grid(std::move(g)), coeff(std::move(c)) {
  if (coeff.size() != grid.cells())
    throw std::invalid_argument(
        "ElementaryFunction: need one coefficient per grid cell");
}

ElementaryFunction ElementaryFunction::constant_on(LevelGrid g, double c) {
  std::vector<double> coeff(g.cells(), c);
  return ElementaryFunction(std::move(g), std::move(coeff));
}

double ElementaryFunction::operator()(double x) const {
  // value on (z_i, z_{i+1}]; zero outside
  if (x <= grid.z.front() || x > grid.z.back()) return 0.0;
  const std::size_t i =
      std::lower_bound(grid.z.begin(), grid.z.end(), x) - grid.z.begin();
  return coeff[i - 1];
}

double integrate_levels_elementary(const ElementaryFunction& f,
                                   const SamplePath& path,
                                   const FunctionDescriptor& u, double t) {
  const std::size_t k = grid_index(path, t);
  const std::vector<std::size_t> eval = {0, k};
  const LevelGammaField field =
      gamma_levels(path, u, f.grid.z, std::span<const std::size_t>(eval));
  KahanSum acc;
  for (std::size_t i = 0; i < f.grid.cells(); ++i)
    acc.add(f.coeff[i] * (field.at(i + 1, 1) - field.at(i, 1)));
  return acc.value();
}

double integrate_levels(const FunctionDescriptor& f, const SamplePath& path,
                        const FunctionDescriptor& u, double t) {
  const std::size_t k = grid_index(path, t);
  const std::vector<std::size_t> eval = {0, k};
  return gamma(MafBuilder::weighted(f, u), path, eval).values[1];
}

double integrate_levels_fn(const std::function<double(double)>& f,
                           const SamplePath& path, const FunctionDescriptor& u,
                           double t) {
  const std::size_t k = grid_index(path, t);
  const std::vector<std::size_t> eval = {0, k};
  const MafBuilder b = MafBuilder::custom(
      [&](double x) { return f(u(x)) * u.derivative(x); });
  return gamma(b, path, eval).values[1];
}

double UDensity::operator()(double x) const {
  if (closed_form) return sigma2;
  if (z.empty() || x <= z.front() || x > z.back()) return 0.0;
  const std::size_t i = std::upper_bound(z.begin(), z.end(), x) - z.begin();
  return value[i - 1];
}

UDensity u_density(const ProcessSpec& spec, const FunctionDescriptor& u,
                   const UDensityConfig& cfg) {
  UDensity out;
  if (u.is_identity()) {
    out.closed_form = true;
    out.sigma2 = spec.sigma2;
    return out;
  }
  // Ratio estimator on the state axis (the visiting law cancels), pushed
  // forward through u onto the level axis with Lebesgue cell weights.
  const int sb = cfg.state_bins;
  const double w = cfg.state_halfwidth;
  const double dx = 2.0 * w / sb;
  out.z.resize(cfg.z_bins + 1);
  for (int i = 0; i <= cfg.z_bins; ++i)
    out.z[i] = cfg.z_lo + (cfg.z_hi - cfg.z_lo) * i / cfg.z_bins;
  const double dz = (cfg.z_hi - cfg.z_lo) / cfg.z_bins;

  std::vector<std::vector<double>> per_path(cfg.n_paths);
  for (int p = 0; p < cfg.n_paths; ++p) {
    SamplePath path =
        simulate_path(spec, cfg.horizon, cfg.dt, cfg.seed + p);
    std::vector<double> occ(sb, 0.0), wocc(sb, 0.0);
    for (std::size_t i = 0; i < path.steps(); ++i) {
      const double x = path.value(i);
      if (x <= -w || x >= w) continue;
      const int b = static_cast<int>((x + w) / dx);
      const double du = u.derivative(x);
      occ[b] += cfg.dt;
      wocc[b] += du * du * spec.sigma2 * cfg.dt;
    }
    std::vector<double> U(cfg.z_bins, 0.0);
    for (int b = 0; b < sb; ++b) {
      if (occ[b] <= 0.0) continue;
      const double xc = -w + (b + 0.5) * dx;
      const double rho = wocc[b] / occ[b];
      const double z = u(xc);
      if (z <= cfg.z_lo || z > cfg.z_hi) continue;
      const int zb = std::min(cfg.z_bins - 1,
                              static_cast<int>((z - cfg.z_lo) / dz));
      U[zb] += rho * dx / dz;
    }
    per_path[p] = std::move(U);
  }
  out.value.assign(cfg.z_bins, 0.0);
  out.se.assign(cfg.z_bins, 0.0);
  for (int zb = 0; zb < cfg.z_bins; ++zb) {
    std::vector<double> vals(cfg.n_paths);
    for (int p = 0; p < cfg.n_paths; ++p) vals[p] = per_path[p][zb];
    const SummaryStats s = summarize(vals);
    out.value[zb] = s.mean;
    out.se[zb] = s.se;
  }
  return out;
}

double norm_k(const std::function<double(double)>& f, const ProcessSpec& spec,
              const FunctionDescriptor& u, int k, const UDensity* density) {
  if (k < 1) throw std::invalid_argument("norm_k: k must be >= 1");
  const double K = static_cast<double>(k);
  if (u.is_identity()) {
    const auto g = [&](double z) {
      const double v = f(z);
      return v * v * spec.sigma2;
    };
    const QuadratureResult r = integrate(g, -K, K, 1e-9, 1e-13);
    if (!std::isfinite(r.value) ||
        (!r.converged && r.error > 0.5 * std::abs(r.value)))
      return std::numeric_limits<double>::infinity();
    return std::sqrt(std::max(0.0, r.value));
  }
  UDensity local;
  if (!density) {
    local = u_density(spec, u);
    density = &local;
  }
  // trapezoid against the binned density
  KahanSum acc;
  for (std::size_t i = 0; i + 1 < density->z.size(); ++i) {
    const double a = std::max(density->z[i], -K);
    const double b = std::min(density->z[i + 1], K);
    if (a >= b) continue;
    const double mid = 0.5 * (a + b);
    const double v = f(mid);
    acc.add(v * v * density->value[i] * (b - a));
  }
  if (!std::isfinite(acc.value()))
    return std::numeric_limits<double>::infinity();
  return std::sqrt(std::max(0.0, acc.value()));
}

double metric_bracket(const std::function<double(double)>& f,
                      const std::function<double(double)>& g,
                      const ProcessSpec& spec, const FunctionDescriptor& u,
                      int k_max, const UDensity* density) {
  if (k_max < 1) throw std::invalid_argument("metric_bracket: k_max >= 1");
  const auto diff = [&](double z) { return f(z) - g(z); };
  UDensity local;
  if (!density && !u.is_identity()) {
    local = u_density(spec, u);
    density = &local;
  }
  double out = 0.0;
  for (int k = 1; k <= k_max; ++k)
    out += std::pow(2.0, -k) * std::min(1.0, norm_k(diff, spec, u, k, density));
  return out;
}

double Elementary2::operator()(double x, double y) const {
  double v = 0.0;
  for (std::size_t i = 0; i < boxes.size(); ++i)
    if (boxes[i].contains(x, y)) v += coeff[i];
  return v;
}

namespace {

/// Gamma at a set of 2-d levels sharing the forward/backward pass.
std::vector<double> gamma_corners_2d(const SamplePath& path,
                                     std::span<const std::array<double, 2>> corners,
                                     int component, std::size_t k) {
  std::vector<KahanSum> acc(corners.size());
  for (std::size_t i = 0; i < k; ++i) {
    const double c = path.increment(i, component);
    const double xf = path.value(i, 0), yf = path.value(i, 1);
    const double xb = path.left_limit(i + 1, 0), yb = path.left_limit(i + 1, 1);
    for (std::size_t q = 0; q < corners.size(); ++q) {
      const double ind_f =
          (xf <= corners[q][0] && yf <= corners[q][1]) ? 1.0 : 0.0;
      const double ind_b =
          (xb <= corners[q][0] && yb <= corners[q][1]) ? 1.0 : 0.0;
      acc[q].add(0.5 * (ind_b - ind_f) * c);
    }
  }
  std::vector<double> out(corners.size());
  for (std::size_t q = 0; q < corners.size(); ++q) out[q] = acc[q].value();
  return out;
}

}  // namespace

double box_increment(const std::function<double(double, double)>& phi,
                     const Box2& box) {
  return phi(box.hi[0], box.hi[1]) - phi(box.lo[0], box.hi[1]) -
         phi(box.hi[0], box.lo[1]) + phi(box.lo[0], box.lo[1]);
}

double integrate_levels_multidim(const Elementary2& f, const SamplePath& path2,
                                 int component, double t) {
  if (path2.dim != 2)
    throw std::invalid_argument("integrate_levels_multidim: need a 2-d path");
  const std::size_t k = grid_index(path2, t);
  std::vector<std::array<double, 2>> corners;
  corners.reserve(4 * f.boxes.size());
  for (const Box2& b : f.boxes) {
    corners.push_back({b.hi[0], b.hi[1]});
    corners.push_back({b.lo[0], b.hi[1]});
    corners.push_back({b.hi[0], b.lo[1]});
    corners.push_back({b.lo[0], b.lo[1]});
  }
  const std::vector<double> g = gamma_corners_2d(path2, corners, component, k);
  KahanSum acc;
  for (std::size_t i = 0; i < f.boxes.size(); ++i)
    acc.add(f.coeff[i] *
            (g[4 * i] - g[4 * i + 1] - g[4 * i + 2] + g[4 * i + 3]));
  return acc.value();
}

double integrate_levels_multidim_fn(
    const std::function<double(double, double)>& f, const SamplePath& path2,
    int component, double t) {
  if (path2.dim != 2)
    throw std::invalid_argument("integrate_levels_multidim: need a 2-d path");
  const std::size_t k = grid_index(path2, t);
  const std::vector<std::size_t> eval = {0, k};
  return gamma(MafBuilder::custom2(f, component), path2, eval).values[1];
}

}  // namespace symito
