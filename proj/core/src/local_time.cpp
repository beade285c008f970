#include "symito/local_time.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "symito/numeric.hpp"

namespace symito {

namespace {

/// Level above everything u reaches on the path (left limits included), so
/// that Z^{sentinel} = M^{u,c} exactly and the top row of a batched level
/// pass doubles as cN^u = Gamma(M^{u,c}).
double saturating_level(const SamplePath& path, const FunctionDescriptor& u,
                        double at_least) {
  double hi = at_least;
  for (std::size_t i = 0; i <= path.steps(); ++i)
    hi = std::max(hi, u(path.value(i)));
  for (const JumpRecord& j : path.jumps) hi = std::max(hi, u(j.left[0]));
  return hi + 1.0;
}

}  // namespace

AfPath local_time(const SamplePath& path, const FunctionDescriptor& u,
                  double a, std::span<const std::size_t> eval_idx,
                  const ProcessSpec& spec) {
  if (path.dim != 1)
    throw std::invalid_argument("local_time: 1-d paths only");
  AfPath out;
  out.parent = &path;
  out.eval_idx.assign(eval_idx.begin(), eval_idx.end());
  out.values.assign(eval_idx.size(), 0.0);
  if (!spec.has_continuous()) return out;  // no continuous part, L == 0

  // One batched pass: Gamma^a and, from the saturated sentinel level,
  // cN^u = Gamma(M^{u,c}) for the Stieltjes correction.
  const std::vector<double> levels = {a, saturating_level(path, u, a)};
  const LevelGammaField field = gamma_levels(path, u, levels, eval_idx);
  std::vector<double> ind(eval_idx.size() - 1);
  for (std::size_t j = 0; j + 1 < eval_idx.size(); ++j)
    ind[j] = u(path.value(eval_idx[j])) <= a ? 1.0 : 0.0;
  AfPath ncu;
  ncu.parent = &path;
  ncu.eval_idx = out.eval_idx;
  ncu.values.assign(eval_idx.size(), 0.0);
  for (std::size_t j = 0; j < eval_idx.size(); ++j)
    ncu.values[j] = field.at(1, j);
  const AfPath corr = ito_integral(ind, ncu);
  for (std::size_t j = 0; j < out.values.size(); ++j)
    out.values[j] = -2.0 * field.at(0, j) + 2.0 * corr.values[j];
  return out;
}

LocalTimeField local_time_field(const SamplePath& path,
                                const FunctionDescriptor& u,
                                std::span<const double> levels,
                                std::span<const std::size_t> eval_idx,
                                const ProcessSpec& spec) {
  LocalTimeField field;
  field.levels.assign(levels.begin(), levels.end());
  field.eval_idx.assign(eval_idx.begin(), eval_idx.end());
  field.data.assign(levels.size() * eval_idx.size(), 0.0);
  if (!spec.has_continuous()) return field;

  std::vector<double> ext(levels.begin(), levels.end());
  ext.push_back(saturating_level(path, u, ext.back()));
  const LevelGammaField g = gamma_levels(path, u, ext, eval_idx);
  AfPath ncu;
  ncu.parent = &path;
  ncu.eval_idx = field.eval_idx;
  ncu.values.assign(eval_idx.size(), 0.0);
  for (std::size_t j = 0; j < eval_idx.size(); ++j)
    ncu.values[j] = g.at(levels.size(), j);

  // corr[l][j] = sum_{segments < j} 1{u(left) <= z_l} * d(cN^u); binned by
  // the segment's left u-value and accumulated as a level prefix.
  const std::size_t L = levels.size();
  const std::size_t m = eval_idx.size();
  std::vector<double> corr_bin(L + 1, 0.0);
  std::vector<double> corr(L, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (j > 0) {
      const double dn = ncu.values[j] - ncu.values[j - 1];
      const double uv = u(path.value(eval_idx[j - 1]));
      const std::size_t b =
          std::lower_bound(levels.begin(), levels.end(), uv) - levels.begin();
      if (b < L + 1) corr_bin[b] += dn;
      double run = 0.0;
      for (std::size_t l = 0; l < L; ++l) {
        run += corr_bin[l];
        corr[l] = run;
      }
    }
    for (std::size_t l = 0; l < L; ++l)
      field.data[l * m + j] = -2.0 * g.at(l, j) + 2.0 * corr[l];
  }
  return field;
}

OccupationPair occupation_check(const SamplePath& path,
                                const FunctionDescriptor& u,
                                const std::function<double(double)>& f,
                                double t, const ProcessSpec& spec,
                                std::size_t level_cells) {
  const std::size_t k = grid_index(path, t);
  OccupationPair out;

  const LevelGrid grid = LevelGrid::spanning(path, u, level_cells);
  const std::vector<std::size_t> eval = {0, k};
  const LocalTimeField field =
      local_time_field(path, u, grid.z, eval, spec);
  KahanSum lhs;
  for (std::size_t i = 0; i + 1 < grid.z.size(); ++i) {
    const double dz = grid.z[i + 1] - grid.z[i];
    lhs.add(0.5 * dz *
            (f(grid.z[i]) * field.at(i, 1) + f(grid.z[i + 1]) * field.at(i + 1, 1)));
  }
  out.lhs = lhs.value();

  KahanSum rhs;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = path.value(i);
    const double du = u.derivative(x);
    rhs.add(f(u(x)) * du * du * spec.sigma2 * path.dt);
  }
  out.rhs = rhs.value();
  return out;
}

KernelEstimate kernel_local_time_oracle(const SamplePath& path,
                                        const FunctionDescriptor& u, double a,
                                        double h, double t,
                                        const ProcessSpec& spec) {
  if (!(h > 0.0))
    throw std::invalid_argument("kernel_local_time_oracle: h must be > 0");
  const std::size_t k = grid_index(path, t);
  KernelEstimate out;
  double lo = path.value(0), hi = lo;
  KahanSum acc;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = path.value(i);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    if (std::abs(u(x) - a) < h) {
      const double du = u.derivative(x);
      acc.add(du * du * spec.sigma2 * path.dt);
    }
  }
  out.value = acc.value() / (2.0 * h);
  const double typical =
      std::sqrt(spec.sigma2 * path.dt) * u.derivative_bound(lo, hi);
  out.bandwidth_warning = h < 2.0 * typical;
  return out;
}

double support_check(const SamplePath& path, const FunctionDescriptor& u,
                     double a, double t, const ProcessSpec& spec,
                     std::size_t eval_segments) {
  const std::size_t k = grid_index(path, t);
  const std::vector<std::size_t> eval = uniform_grid(k, eval_segments);
  const AfPath lt = local_time(path, u, a, eval, spec);
  KahanSum acc;
  for (std::size_t j = 0; j + 1 < eval.size(); ++j) {
    const double d = u(path.value(eval[j])) - a;
    const double d2 = d * d;
    acc.add(d2 * d2 * (lt.values[j + 1] - lt.values[j]));
  }
  return acc.value();
}

double integrate_levels_localtime(const std::function<double(double)>& f,
                                  const SamplePath& path,
                                  const FunctionDescriptor& u, double t,
                                  const ProcessSpec& spec) {
  (void)spec;  // vanishes from the right-hand side; kept for interface parity
  const std::size_t k = grid_index(path, t);
  const double level_term = integrate_levels_fn(f, path, u, t);
  // Stieltjes term against cN^u on the default reporting grid.
  std::vector<std::size_t> eval = sqrt_grid(k);
  if (eval.back() != k) eval.push_back(k);
  const AfPath ncu = gamma(MafBuilder::cont_part(u), path, eval);
  std::vector<double> f_left(eval.size() - 1);
  for (std::size_t j = 0; j + 1 < eval.size(); ++j)
    f_left[j] = f(u(path.value(eval[j])));
  const AfPath stieltjes = ito_integral(f_left, ncu);
  return level_term - stieltjes.values.back();
}

}  // namespace symito
