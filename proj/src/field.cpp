#include "levelflow/field.hpp"

#include <array>

#include "levelflow/errors.hpp"

namespace levelflow {

namespace {

// Central stencils of second-order accuracy for derivative orders 0..4 on
// offsets -2..2 (index = offset + 2).
constexpr std::array<std::array<double, 5>, 5> kStencil = {{
    {0.0, 0.0, 1.0, 0.0, 0.0},
    {0.0, -0.5, 0.0, 0.5, 0.0},
    {0.0, 1.0, -2.0, 1.0, 0.0},
    {-0.5, 1.0, 0.0, -1.0, 0.5},
    {1.0, -4.0, 6.0, -4.0, 1.0},
}};

FieldJet stencil_jet(const ScalarField::ValueFn& f, Point2 p, double h) {
  std::array<std::array<double, 5>, 5> samples{};
  for (int a = -2; a <= 2; ++a) {
    for (int b = -2; b <= 2; ++b) {
      // Only offsets reachable by some stencil pair with i + j <= 4.
      if (std::abs(a) + std::abs(b) > 4) continue;
      samples[a + 2][b + 2] = f({p.x + a * h, p.y + b * h});
    }
  }
  FieldJet r;
  for (int d = 0; d <= 4; ++d) {
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      double acc = 0.0;
      for (int a = 0; a < 5; ++a) {
        if (kStencil[i][a] == 0.0) continue;
        for (int b = 0; b < 5; ++b) {
          if (kStencil[j][b] == 0.0) continue;
          acc += kStencil[i][a] * kStencil[j][b] * samples[a][b];
        }
      }
      const double deriv = acc / std::pow(h, d);
      r.coeff(i, j) = deriv / (detail::factorial(i) * detail::factorial(j));
    }
  }
  return r;
}

}  // namespace

FieldJet finite_difference_jet(const ScalarField::ValueFn& f, Point2 p, double step) {
  if (!(step > 0.0)) throw DomainError("finite_difference_jet: step must be positive");
  const FieldJet coarse = stencil_jet(f, p, step);
  const FieldJet fine = stencil_jet(f, p, 0.5 * step);
  FieldJet r;
  for (int k = 0; k < FieldJet::size; ++k) {
    r.coefficients()[k] = (4.0 * fine.coefficients()[k] - coarse.coefficients()[k]) / 3.0;
  }
  r.coeff(0, 0) = f(p);
  return r;
}

ScalarField ScalarField::constant(double c) {
  return analytic("constant", [c](const auto& x, const auto&) { return 0.0 * x + c; });
}

ScalarField ScalarField::sampled(std::string name, ValueFn f, double step) {
  ScalarField s;
  s.name_ = std::move(name);
  s.source_ = DerivativeSource::nested_finite_difference;
  s.value_ = f;
  s.jet_ = [f = std::move(f), step](Point2 p) { return finite_difference_jet(f, p, step); };
  return s;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  ScalarField r;
  r.name_ = a.name_ + "+" + b.name_;
  r.source_ = (a.source_ == DerivativeSource::closed_form && b.source_ == DerivativeSource::closed_form)
                  ? DerivativeSource::closed_form
                  : DerivativeSource::nested_finite_difference;
  r.value_ = [fa = a.value_, fb = b.value_](Point2 p) { return fa(p) + fb(p); };
  r.jet_ = [ja = a.jet_, jb = b.jet_](Point2 p) { return ja(p) + jb(p); };
  return r;
}

ScalarField operator*(double s, const ScalarField& a) {
  ScalarField r = a;
  r.value_ = [s, fa = a.value_](Point2 p) { return s * fa(p); };
  r.jet_ = [s, ja = a.jet_](Point2 p) { return s * ja(p); };
  return r;
}

HarmonicField HarmonicField::combine(double a, const HarmonicField& u, double b, const HarmonicField& v) {
  HarmonicField r(a * u.field() + b * v.field(), HarmonicProvenance::combination,
                  u.label() + "&" + v.label());
  return r;
}

}  // namespace levelflow
