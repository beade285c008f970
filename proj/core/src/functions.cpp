#include "symito/functions.hpp"

#include <algorithm>
#include <cmath>

namespace symito {

FunctionDescriptor FunctionDescriptor::piecewise_linear(
    std::vector<double> breaks, std::vector<double> slopes) {
  if (slopes.size() != breaks.size() + 1)
    throw std::invalid_argument(
        "piecewise_linear: need one more slope than breakpoints");
  if (!std::is_sorted(breaks.begin(), breaks.end()))
    throw std::invalid_argument("piecewise_linear: breakpoints not sorted");
  FunctionDescriptor f(FunctionForm::PiecewiseLinear);
  f.breaks_ = std::move(breaks);
  f.slopes_ = std::move(slopes);
  // Anchor F(0) = 0 and propagate the anchor to every breakpoint.
  f.anchors_.assign(f.breaks_.size(), 0.0);
  if (!f.breaks_.empty()) {
    // index of the piece containing 0
    std::size_t p0 = std::upper_bound(f.breaks_.begin(), f.breaks_.end(), 0.0) -
                     f.breaks_.begin();
    // Walk right from 0 and left from 0 accumulating exact line segments.
    if (p0 > 0) {
      f.anchors_[p0 - 1] = f.slopes_[p0] * (f.breaks_[p0 - 1] - 0.0);
      for (std::size_t i = p0 - 1; i-- > 0;)
        f.anchors_[i] =
            f.anchors_[i + 1] + f.slopes_[i + 1] * (f.breaks_[i] - f.breaks_[i + 1]);
    }
    for (std::size_t i = p0; i < f.breaks_.size(); ++i) {
      const double left = (i == p0) ? 0.0 : f.breaks_[i - 1];
      const double base = (i == p0) ? 0.0 : f.anchors_[i - 1];
      f.anchors_[i] = base + f.slopes_[i] * (f.breaks_[i] - left);
    }
  }
  return f;
}

double FunctionDescriptor::operator()(double x) const {
  switch (form_) {
    case FunctionForm::Identity:
      return x;
    case FunctionForm::Constant:
      return a_;
    case FunctionForm::Tanh:
      return std::tanh(x);
    case FunctionForm::Square:
      return x * x;
    case FunctionForm::Atan:
      return std::atan(x);
    case FunctionForm::AbsShift:
      return std::abs(x - a_);
    case FunctionForm::NegPart:
      return x < a_ ? a_ - x : 0.0;
    case FunctionForm::PiecewiseLinear: {
      if (breaks_.empty()) return slopes_[0] * x;
      const std::size_t i =
          std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin();
      if (i == 0) return anchors_[0] + slopes_[0] * (x - breaks_[0]);
      return anchors_[i - 1] + slopes_[i] * (x - breaks_[i - 1]);
    }
  }
  return 0.0;
}

double FunctionDescriptor::derivative(double x) const {
  switch (form_) {
    case FunctionForm::Identity:
      return 1.0;
    case FunctionForm::Constant:
      return 0.0;
    case FunctionForm::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case FunctionForm::Square:
      return 2.0 * x;
    case FunctionForm::Atan:
      return 1.0 / (1.0 + x * x);
    case FunctionForm::AbsShift:
      // left-continuous: F'(a) = -1
      return x <= a_ ? -1.0 : 1.0;
    case FunctionForm::NegPart:
      return x <= a_ ? -1.0 : 0.0;
    case FunctionForm::PiecewiseLinear: {
      // slopes_[i] applies on (breaks_[i-1], breaks_[i]]; left-continuous.
      const std::size_t i =
          std::lower_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin();
      return slopes_[i];
    }
  }
  return 0.0;
}

double FunctionDescriptor::derivative_bound(double lo, double hi) const {
  switch (form_) {
    case FunctionForm::Identity:
      return 1.0;
    case FunctionForm::Constant:
      return 0.0;
    case FunctionForm::Tanh:
    case FunctionForm::Atan:
      return 1.0;
    case FunctionForm::Square:
      return 2.0 * std::max(std::abs(lo), std::abs(hi));
    case FunctionForm::AbsShift:
    case FunctionForm::NegPart:
      return 1.0;
    case FunctionForm::PiecewiseLinear: {
      double b = 0.0;
      for (std::size_t i = 0; i < slopes_.size(); ++i) {
        const double piece_lo = i == 0 ? lo : breaks_[i - 1];
        const double piece_hi = i == breaks_.size() ? hi : breaks_[i];
        if (piece_hi < lo || piece_lo > hi) continue;
        b = std::max(b, std::abs(slopes_[i]));
      }
      return b;
    }
  }
  return 0.0;
}

std::string FunctionDescriptor::name() const {
  switch (form_) {
    case FunctionForm::Identity:
      return "identity";
    case FunctionForm::Constant:
      return "const(" + std::to_string(a_) + ")";
    case FunctionForm::Tanh:
      return "tanh";
    case FunctionForm::Square:
      return "square";
    case FunctionForm::Atan:
      return "atan";
    case FunctionForm::AbsShift:
      return "abs(x-" + std::to_string(a_) + ")";
    case FunctionForm::NegPart:
      return "negpart(" + std::to_string(a_) + ")";
    case FunctionForm::PiecewiseLinear:
      return "piecewise_linear";
  }
  return "?";
}

}  // namespace symito
