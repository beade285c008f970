#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace symito {

enum class FunctionForm {
  Identity,
  Constant,
  Tanh,
  Square,
  Atan,
  PiecewiseLinear,
  AbsShift,  // x -> |x - a|
  NegPart,   // x -> (x - a)^- = max(a - x, 0)
};

/// A function on the real line together with a fixed Radon-Nikodym
/// derivative version. At kinks the derivative is the LEFT-continuous
/// version (value approached from below), matching the closed-on-the-right
/// indicator convention 1{u(X) <= a} used throughout the level calculus.
class FunctionDescriptor {
 public:
  FunctionDescriptor() : form_(FunctionForm::Identity) {}

  static FunctionDescriptor identity() { return FunctionDescriptor(); }
  static FunctionDescriptor constant(double c) {
    FunctionDescriptor f(FunctionForm::Constant);
    f.a_ = c;
    return f;
  }
  static FunctionDescriptor tanh_fn() {
    return FunctionDescriptor(FunctionForm::Tanh);
  }
  static FunctionDescriptor square() {
    return FunctionDescriptor(FunctionForm::Square);
  }
  static FunctionDescriptor atan_fn() {
    return FunctionDescriptor(FunctionForm::Atan);
  }
  static FunctionDescriptor abs_shift(double a) {
    FunctionDescriptor f(FunctionForm::AbsShift);
    f.a_ = a;
    return f;
  }
  static FunctionDescriptor neg_part(double a) {
    FunctionDescriptor f(FunctionForm::NegPart);
    f.a_ = a;
    return f;
  }
  /// Continuous piecewise-linear function anchored by F(0) = 0.
  /// slopes has one more entry than breaks; slopes[i] applies on
  /// (breaks[i-1], breaks[i]].
  static FunctionDescriptor piecewise_linear(std::vector<double> breaks,
                                             std::vector<double> slopes);

  FunctionForm form() const { return form_; }
  bool is_identity() const { return form_ == FunctionForm::Identity; }

  double operator()(double x) const;
  /// Left-continuous derivative version.
  double derivative(double x) const;
  /// sup |F'| over [lo, hi] for the fixed derivative version.
  double derivative_bound(double lo, double hi) const;

  /// Points where F' is discontinuous (empty for smooth forms).
  std::span<const double> breakpoints() const { return breaks_; }

  std::string name() const;

 private:
  explicit FunctionDescriptor(FunctionForm f) : form_(f) {}

  FunctionForm form_;
  double a_ = 0.0;
  std::vector<double> breaks_;
  std::vector<double> slopes_;
  std::vector<double> anchors_;  // F at each breakpoint, precomputed
};

/// Two-argument functions for the bidimensional checks; partials are the
/// fixed derivative versions f_i = dF/dx_i.
class Function2 {
 public:
  enum class Form { Sum, Product, Constant };

  static Function2 sum() { return Function2(Form::Sum, 0.0); }
  static Function2 product() { return Function2(Form::Product, 0.0); }
  static Function2 constant(double c) { return Function2(Form::Constant, c); }

  double operator()(double x, double y) const {
    switch (form_) {
      case Form::Sum:
        return x + y;
      case Form::Product:
        return x * y;
      case Form::Constant:
        return c_;
    }
    return 0.0;
  }
  double partial(int i, double x, double y) const {
    switch (form_) {
      case Form::Sum:
        return 1.0;
      case Form::Product:
        return i == 0 ? y : x;
      case Form::Constant:
        return 0.0;
    }
    return 0.0;
  }
  Form form() const { return form_; }

 private:
  Function2(Form f, double c) : form_(f), c_(c) {}
  Form form_;
  double c_;
};

}  // namespace symito
