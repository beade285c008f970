#include "symito/jump_functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "symito/numeric.hpp"

namespace symito {

TruncationSequence truncation_sequence(const ProcessSpec& spec,
                                       const FunctionDescriptor& u, int count,
                                       const StateWindow& window) {
  if (count < 1)
    throw std::invalid_argument("truncation_sequence: count must be >= 1");
  TruncationSequence seq;
  const auto S = [&](double eps) { return s_epsilon(spec, u, eps, window); };

  const double hi0 = 0.5;  // thresholds live below the mid/big cut at 1
  // A truncated model has an exact floor: an interval (0, floor] on which
  // S vanishes identically. Locate its upper edge once.
  bool has_floor = false;
  double floor = 0.0;
  if (S(hi0 * 1e-14) == 0.0) {
    has_floor = true;
    double lo = hi0 * 1e-14, h = hi0;
    if (S(hi0) == 0.0) {
      floor = hi0;
    } else {
      for (int it = 0; it < 200 && (h - lo) > 1e-15 * std::max(1.0, h); ++it) {
        const double mid = 0.5 * (lo + h);
        if (S(mid) == 0.0)
          lo = mid;
        else
          h = mid;
      }
      floor = lo;
    }
  }

  double hi = hi0;
  for (int n = 1; n <= count; ++n) {
    const double target = 0.5 * std::pow(2.0, -4.0 * n);  // margin inside 2^-4n
    if (!seq.eps.empty()) hi = std::min(hi, seq.eps.back() * (1.0 - 1e-9));
    double eps_n;
    if (S(hi) <= target) {
      eps_n = hi;
    } else {
      double lo = 0.0;  // S -> 0 as eps -> 0
      double h = hi;
      for (int it = 0; it < 200 && (h - lo) > 1e-15 * std::max(1.0, h); ++it) {
        const double mid = 0.5 * (lo + h);
        if (S(mid) <= target)
          lo = mid;
        else
          h = mid;
      }
      eps_n = lo;
      if (!(eps_n > 0.0))
        throw std::invalid_argument(
            "truncation_sequence: s_epsilon does not decrease to 0 in range");
    }
    // Levels pinned against the floor terminate the sequence there: every
    // deeper threshold satisfies its bound with S identically zero.
    if (has_floor && eps_n - floor <= 1e-9 * std::max(1.0, floor)) {
      seq.eps.push_back(std::min(eps_n, floor));
      seq.s_values.push_back(0.0);
      seq.floor_reached = true;
      seq.floor = floor;
      break;
    }
    seq.eps.push_back(eps_n);
    seq.s_values.push_back(S(eps_n));
  }
  return seq;
}

CompensatedSum compensated_jump_sum(const SamplePath& path,
                                    const FunctionDescriptor& u,
                                    const FunctionDescriptor& F, double eps,
                                    double t, const ProcessSpec& spec,
                                    const CompensatorTable* table) {
  if (!(eps > 0.0))
    throw std::invalid_argument("compensated_jump_sum: eps must be positive");
  const std::size_t k = grid_index(path, t);
  CompensatedSum out;

  KahanSum raw;
  for (const JumpRecord& j : path.jumps) {
    if (j.index > static_cast<std::int64_t>(k)) break;
    const double u_left = u(j.left[0]);
    const double u_right = u(path.value(static_cast<std::size_t>(j.index)));
    const double du = std::abs(u_right - u_left);
    if (du > eps && du < 1.0) raw.add(F(u_right) - F(u_left));
  }
  out.raw = raw.value();

  const LevyMeasure m = levy_measure(spec);
  const bool zero = m.empty() || (u.is_identity() && F.is_identity()) ||
                    F.form() == FunctionForm::Constant;
  if (!zero) {
    KahanSum comp;
    for (std::size_t i = 0; i < k; ++i) {
      const double x = path.value(i);
      const double c = table ? (*table)(x)
                             : compensator_integrand(spec, u, F, x, eps, 1.0);
      comp.add(c * path.dt);
    }
    out.compensator = comp.value();
  }
  out.m_d = out.raw - out.compensator;
  return out;
}

JumpTermReport m_d_limit(const SamplePath& path, const FunctionDescriptor& u,
                         const FunctionDescriptor& F,
                         const TruncationSequence& seq,
                         std::span<const double> checkpoint_times,
                         const ProcessSpec& spec,
                         std::span<const CompensatorTable* const> tables) {
  if (seq.eps.empty())
    throw std::invalid_argument("m_d_limit: empty truncation sequence");
  JumpTermReport report;
  const double t_final = checkpoint_times.empty()
                             ? path.horizon()
                             : checkpoint_times[checkpoint_times.size() - 1];

  std::vector<std::vector<double>> m_d_at(seq.eps.size());
  for (std::size_t n = 0; n < seq.eps.size(); ++n) {
    const CompensatorTable* table =
        n < tables.size() ? tables[n] : nullptr;
    const double eps = seq.eps[n];
    JumpLevel level;
    level.eps = eps;
    if (checkpoint_times.empty()) {
      const CompensatedSum cs =
          compensated_jump_sum(path, u, F, eps, t_final, spec, table);
      level.raw = cs.raw;
      level.compensator = cs.compensator;
      level.m_d = cs.m_d;
      m_d_at[n] = {cs.m_d};
    } else {
      for (double t : checkpoint_times) {
        const CompensatedSum cs =
            compensated_jump_sum(path, u, F, eps, t, spec, table);
        m_d_at[n].push_back(cs.m_d);
        if (t == t_final) {
          level.raw = cs.raw;
          level.compensator = cs.compensator;
          level.m_d = cs.m_d;
        }
      }
    }
    report.levels.push_back(level);
  }

  for (std::size_t n = 0; n + 1 < seq.eps.size(); ++n) {
    double sup = 0.0;
    for (std::size_t j = 0; j < m_d_at[n].size(); ++j)
      sup = std::max(sup, std::abs(m_d_at[n + 1][j] - m_d_at[n][j]));
    report.sup_diff.push_back(sup);
  }
  for (std::size_t n = 0; n + 1 < report.sup_diff.size(); ++n)
    if (report.sup_diff[n + 1] > report.sup_diff[n])
      report.diagnostics_monotone = false;  // flagged, not fatal

  report.floor_exact = seq.floor_reached;
  report.m_d = report.levels.back().m_d;
  report.compensator = report.levels.back().compensator;

  if (!seq.floor_reached && report.levels.size() >= 3) {
    // Richardson step assuming geometric decay of the level differences.
    const std::size_t N = report.levels.size();
    const double d1 = report.levels[N - 1].m_d - report.levels[N - 2].m_d;
    const double d0 = report.levels[N - 2].m_d - report.levels[N - 3].m_d;
    if (d0 != 0.0) {
      const double r = std::clamp(d1 / d0, -0.9, 0.9);
      report.extrapolated = true;
      report.m_d_extrapolated = report.m_d + d1 * r / (1.0 - r);
      const double a1 =
          report.levels[N - 1].compensator - report.levels[N - 2].compensator;
      report.compensator_extrapolated =
          report.compensator + a1 * r / (1.0 - r);
    }
  }
  return report;
}

double big_jump_term(const SamplePath& path, const FunctionDescriptor& u,
                     const FunctionDescriptor& F, double t) {
  const std::size_t k = grid_index(path, t);
  KahanSum acc;
  for (const JumpRecord& j : path.jumps) {
    if (j.index > static_cast<std::int64_t>(k)) break;
    const double u_left = u(j.left[0]);
    const double u_right = u(path.value(static_cast<std::size_t>(j.index)));
    if (std::abs(u_right - u_left) >= 1.0) acc.add(F(u_right) - F(u_left));
  }
  return acc.value();
}

}  // namespace symito
