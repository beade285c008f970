#include "symito/nakao.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "symito/numeric.hpp"

namespace symito {

MafBuilder MafBuilder::cont_part(FunctionDescriptor u) {
  MafBuilder b;
  b.kind = Kind::ContPart;
  b.u = std::move(u);
  return b;
}

MafBuilder MafBuilder::level_indicator(FunctionDescriptor u, double a) {
  MafBuilder b;
  b.kind = Kind::LevelIndicator;
  b.u = std::move(u);
  b.level = a;
  return b;
}

MafBuilder MafBuilder::level_indicator2(double a1, double a2, int component) {
  MafBuilder b;
  b.kind = Kind::LevelIndicator2;
  b.level = a1;
  b.level2 = a2;
  b.component = component;
  return b;
}

MafBuilder MafBuilder::weighted(FunctionDescriptor f, FunctionDescriptor u) {
  MafBuilder b;
  b.kind = Kind::Weighted;
  b.weight = std::move(f);
  b.u = std::move(u);
  return b;
}

MafBuilder MafBuilder::custom(std::function<double(double)> coeff) {
  MafBuilder b;
  b.kind = Kind::Custom1;
  b.fn1 = std::move(coeff);
  return b;
}

MafBuilder MafBuilder::custom2(std::function<double(double, double)> coeff,
                               int component) {
  MafBuilder b;
  b.kind = Kind::Custom2;
  b.fn2 = std::move(coeff);
  b.component = component;
  return b;
}

double MafBuilder::coeff(const double* state, int dim) const {
  const double x = state[0];
  const double y = dim == 2 ? state[1] : 0.0;
  switch (kind) {
    case Kind::ContPart:
      return dim == 1 ? u.derivative(x) : 1.0;
    case Kind::LevelIndicator:
      return u(x) <= level ? u.derivative(x) : 0.0;
    case Kind::LevelIndicator2:
      return (x <= level && y <= level2) ? 1.0 : 0.0;
    case Kind::Weighted:
      return weight(u(x)) * u.derivative(x);
    case Kind::Custom1:
      return fn1(x);
    case Kind::Custom2:
      return fn2(x, y);
  }
  return 0.0;
}

double MafBuilder::evaluate(const SamplePath& path, std::size_t k) const {
  KahanSum acc;
  const int dim = path.dim;
  for (std::size_t i = 0; i < k; ++i)
    acc.add(coeff(&path.values[i * dim], dim) * path.increment(i, component));
  return acc.value();
}

SamplePath reverse_path(const SamplePath& path, std::size_t k) {
  if (k > path.steps()) throw std::out_of_range("reverse_path: k out of range");
  const int dim = path.dim;
  SamplePath rev;
  rev.dim = dim;
  rev.dt = path.dt;
  rev.seed = path.seed;
  rev.binning_warning = path.binning_warning;

  rev.cont_increments.resize(k * dim);
  for (std::size_t j = 0; j < k; ++j)
    for (int c = 0; c < dim; ++c)
      rev.cont_increments[j * dim + c] = -path.increment(k - 1 - j, c);

  // Jumps at original points g in [1, k-1] land at reversed point k - g.
  for (auto it = path.jumps.rbegin(); it != path.jumps.rend(); ++it) {
    const auto g = static_cast<std::size_t>(it->index);
    if (g == 0 || g >= k) continue;
    JumpRecord r{};
    r.index = static_cast<std::int64_t>(k - g);
    for (int c = 0; c < 2; ++c) r.size[c] = -it->size[c];
    rev.jumps.push_back(r);  // left values filled during assembly
  }
  std::sort(rev.jumps.begin(), rev.jumps.end(),
            [](const JumpRecord& a, const JumpRecord& b) {
              return a.index < b.index;
            });

  rev.values.assign((k + 1) * dim, 0.0);
  for (int c = 0; c < dim; ++c) rev.values[c] = path.left_limit(k, c);
  auto jump_it = rev.jumps.begin();
  for (std::size_t j = 0; j < k; ++j) {
    for (int c = 0; c < dim; ++c)
      rev.values[(j + 1) * dim + c] =
          rev.values[j * dim + c] + rev.cont_increments[j * dim + c];
    if (jump_it != rev.jumps.end() &&
        jump_it->index == static_cast<std::int64_t>(j + 1)) {
      for (int c = 0; c < dim; ++c) {
        jump_it->left[c] = rev.values[(j + 1) * dim + c];
        rev.values[(j + 1) * dim + c] += jump_it->size[c];
      }
      ++jump_it;
    }
  }
  return rev;
}

AfPath gamma(const MafBuilder& builder, const SamplePath& path,
             std::span<const std::size_t> eval_idx) {
  AfPath out;
  out.parent = &path;
  out.eval_idx.assign(eval_idx.begin(), eval_idx.end());
  out.values.assign(eval_idx.size(), 0.0);
  if (eval_idx.empty() || eval_idx.front() != 0 ||
      !std::is_sorted(eval_idx.begin(), eval_idx.end()))
    throw std::invalid_argument("gamma: eval grid must be sorted from 0");

  // forward values are shared across eval points
  KahanSum fwd;
  std::size_t done = 0;
  const int dim = path.dim;
  for (std::size_t j = 0; j < eval_idx.size(); ++j) {
    const std::size_t k = eval_idx[j];
    if (k > path.steps()) throw std::out_of_range("gamma: eval index out of range");
    for (; done < k; ++done)
      fwd.add(builder.coeff(&path.values[done * dim], dim) *
              path.increment(done, builder.component));
    if (k == 0) continue;
    const SamplePath rev = reverse_path(path, k);
    const double m_rev = builder.evaluate(rev, k);
    out.values[j] = -0.5 * (fwd.value() + m_rev);
  }
  return out;
}

AfPath z_a(const SamplePath& path, const FunctionDescriptor& u, double a) {
  const MafBuilder b = MafBuilder::level_indicator(u, a);
  AfPath out;
  out.parent = &path;
  out.eval_idx = full_grid(path);
  out.values.assign(path.steps() + 1, 0.0);
  KahanSum acc;
  const int dim = path.dim;
  for (std::size_t i = 0; i < path.steps(); ++i) {
    acc.add(b.coeff(&path.values[i * dim], dim) * path.increment(i));
    out.values[i + 1] = acc.value();
  }
  return out;
}

AfPath gamma_a(const SamplePath& path, const FunctionDescriptor& u, double a,
               std::span<const std::size_t> eval_idx) {
  return gamma(MafBuilder::level_indicator(u, a), path, eval_idx);
}

AfPath gamma_integral(const FunctionDescriptor& f, const FunctionDescriptor& u,
                      const MafBuilder& m, const SamplePath& path,
                      std::span<const std::size_t> eval_idx,
                      const ProcessSpec& spec) {
  if (path.dim != 1)
    throw std::invalid_argument("gamma_integral: 1-d paths only");
  // Gamma((f o u) * M): integrating f(u(X_-)) against M multiplies the
  // coefficient recipes.
  MafBuilder fm = MafBuilder::custom([f, u, m](double x) {
    const double s = x;
    return f(u(x)) * m.coeff(&s, 1);
  });
  AfPath g = gamma(fm, path, eval_idx);
  // Bracket term: <M^{fu,c}, M>_t = int f'(u) u' coeff_M sigma2 ds.
  KahanSum acc;
  std::size_t done = 0;
  for (std::size_t j = 0; j < eval_idx.size(); ++j) {
    for (; done < eval_idx[j]; ++done) {
      const double x = path.value(done);
      acc.add(f.derivative(u(x)) * u.derivative(x) * m.coeff(&x, 1) *
              spec.sigma2 * path.dt);
    }
    g.values[j] -= 0.5 * acc.value();
  }
  return g;
}

LevelGammaField gamma_levels(const SamplePath& path,
                             const FunctionDescriptor& u,
                             std::span<const double> levels,
                             std::span<const std::size_t> eval_idx) {
  if (path.dim != 1)
    throw std::invalid_argument("gamma_levels: 1-d paths only");
  if (!std::is_sorted(levels.begin(), levels.end()))
    throw std::invalid_argument("gamma_levels: levels must be sorted");
  if (eval_idx.empty() || eval_idx.front() != 0 ||
      !std::is_sorted(eval_idx.begin(), eval_idx.end()))
    throw std::invalid_argument("gamma_levels: eval grid must be sorted from 0");

  LevelGammaField field;
  field.levels.assign(levels.begin(), levels.end());
  field.eval_idx.assign(eval_idx.begin(), eval_idx.end());
  field.data.assign(levels.size() * eval_idx.size(), 0.0);

  const std::size_t L = levels.size();
  // acc[b] collects coefficient*dB of steps whose u-value falls in bin b,
  // where bin b means levels[b] is the smallest level >= u. Entries falling
  // above every level land in the discard bin L.
  std::vector<KahanSum> fwd(L + 1), bwd(L + 1);
  const auto bin = [&](double uval) -> std::size_t {
    return static_cast<std::size_t>(
        std::lower_bound(levels.begin(), levels.end(), uval) - levels.begin());
  };

  std::size_t done = 0;
  for (std::size_t j = 0; j < eval_idx.size(); ++j) {
    const std::size_t k = eval_idx[j];
    if (k > path.steps())
      throw std::out_of_range("gamma_levels: eval index out of range");
    for (; done < k; ++done) {
      const double c = path.increment(done);
      const double xf = path.value(done);          // forward left endpoint
      const double xb = path.left_limit(done + 1);  // backward left endpoint
      const double uf = u(xf);
      const double ub = u(xb);
      fwd[bin(uf)].add(u.derivative(xf) * c);
      bwd[bin(ub)].add(u.derivative(xb) * c);
    }
    // Gamma^{z_l} = 1/2 (backward prefix - forward prefix) over bins <= l.
    double pf = 0.0, pb = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      pf += fwd[l].value();
      pb += bwd[l].value();
      field.data[l * eval_idx.size() + j] = 0.5 * (pb - pf);
    }
  }
  return field;
}

}  // namespace symito
