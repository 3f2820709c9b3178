#pragma once

#include <functional>
#include <optional>

namespace pathind {

using Field1D = std::function<double(double t, double x)>;
using RealFn = std::function<double(double r)>;

// Phi in b = Phi(u). A monomial a r^k is recognized so that Psi1 can be
// taken in closed form.
struct StructureFunction {
  struct Monomial {
    double coefficient;
    double power;
  };

  RealFn phi;
  std::optional<Monomial> monomial;

  static StructureFunction from_monomial(double coefficient, double power);
  static StructureFunction from_function(RealFn phi);
};

// Psi1(r) = integral of Phi(r)/r from r_ref, Psi2(r) = r Phi(r).
struct PsiPair {
  RealFn psi1;
  RealFn psi2;
  bool psi1_closed_form = false;
};

// Closed form for monomials with power >= 1, tanh-sinh quadrature
// otherwise. The numeric Psi1 throws QuadratureFailure when the range
// touches r = 0 while Phi(0) != 0, or when the quadrature does not converge.
PsiPair psi_from_phi(const StructureFunction& phi, double r_ref);

// Forces numeric quadrature even for monomials.
RealFn numeric_psi1(const RealFn& phi, double r_ref);

// u = b / sigma^2. Evaluation throws ZeroDiffusion when |sigma| < 1e-12.
Field1D u_from_coefficients(Field1D b, Field1D sigma);

struct Burgers1DModel {
  Field1D u;
  StructureFunction phi;
  PsiPair psi;
};

Burgers1DModel make_burgers_model(Field1D u, StructureFunction phi,
                                  double r_ref = 0.0);

// R = du/dt + d2/dx2 Psi1(u) / 2 + d/dx Psi2(u) / 2, with the x-derivatives
// applied to x -> Psi(u(t,x)) directly. Step h for both t and x.
double burgers_residual(const Burgers1DModel& model, double t, double x,
                        double h = 1e-3);

// Stationary case, u evaluated at t = 0:
// d2/dx2 Psi1(u) / 2 + d/dx Psi2(u) / 2.
double harmonic_residual(const Burgers1DModel& model, double x, double h = 1e-3);

// |b - Phi(u)| at (t, x); the structural assumption b = Phi(u).
double phi_mismatch(const Field1D& b, const Burgers1DModel& model, double t,
                    double x);

}  // namespace pathind
