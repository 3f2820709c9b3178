#include "pathind/burgers1d.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <string>

#include "pathind/error.hpp"

namespace pathind {

StructureFunction StructureFunction::from_monomial(double coefficient,
                                                   double power) {
  StructureFunction s;
  s.phi = [coefficient, power](double r) {
    return coefficient * std::pow(r, power);
  };
  s.monomial = Monomial{coefficient, power};
  return s;
}

StructureFunction StructureFunction::from_function(RealFn phi) {
  StructureFunction s;
  s.phi = std::move(phi);
  return s;
}

RealFn numeric_psi1(const RealFn& phi, double r_ref) {
  return [phi, r_ref](double r) {
    const double lo = std::min(r, r_ref);
    const double hi = std::max(r, r_ref);
    if (lo <= 0.0 && hi >= 0.0 && hi > lo) {
      const double phi0 = phi(0.0);
      if (phi0 != 0.0) {
        throw Error(ErrorKind::QuadratureFailure,
                    "Phi(r)/r is singular at r = 0 (Phi(0) = " +
                        std::to_string(phi0) + ")");
      }
    }
    auto integrand = [&phi](double s) {
      if (s == 0.0) {
        // Removable singularity since Phi(0) = 0: the limit is Phi'(0).
        const double e = 1e-7;
        return (phi(e) - phi(-e)) / (2.0 * e);
      }
      return phi(s) / s;
    };
    // Split at 0 so that a removable singularity sits on an endpoint, where
    // tanh-sinh never evaluates.
    boost::math::quadrature::tanh_sinh<double> quad;
    double value = 0.0;
    double error = 0.0;
    auto add = [&](double a, double b) {
      if (a == b) return;
      double e = 0.0;
      value += quad.integrate(integrand, a, b, 1e-13, &e);
      error += e;
    };
    if (lo < 0.0 && hi > 0.0) {
      add(r_ref, 0.0);
      add(0.0, r);
    } else {
      add(r_ref, r);
    }
    if (!std::isfinite(value) ||
        error > 1e-9 * std::max(1.0, std::abs(value))) {
      throw Error(ErrorKind::QuadratureFailure,
                  "Psi1 quadrature did not converge at r = " +
                      std::to_string(r) + " (error estimate " +
                      std::to_string(error) + ")");
    }
    return value;
  };
}

PsiPair psi_from_phi(const StructureFunction& phi, double r_ref) {
  PsiPair out;
  const RealFn f = phi.phi;
  out.psi2 = [f](double r) { return r * f(r); };
  if (phi.monomial && phi.monomial->power >= 1.0) {
    const double a = phi.monomial->coefficient;
    const double k = phi.monomial->power;
    out.psi1 = [a, k, r_ref](double r) {
      return a * (std::pow(r, k) - std::pow(r_ref, k)) / k;
    };
    out.psi1_closed_form = true;
  } else {
    out.psi1 = numeric_psi1(f, r_ref);
  }
  return out;
}

Field1D u_from_coefficients(Field1D b, Field1D sigma) {
  return [b = std::move(b), sigma = std::move(sigma)](double t, double x) {
    const double s = sigma(t, x);
    if (std::abs(s) < 1e-12) {
      throw Error(ErrorKind::ZeroDiffusion,
                  "sigma vanishes at t=" + std::to_string(t) +
                      ", x=" + std::to_string(x));
    }
    return b(t, x) / (s * s);
  };
}

Burgers1DModel make_burgers_model(Field1D u, StructureFunction phi,
                                  double r_ref) {
  Burgers1DModel m;
  m.u = std::move(u);
  m.psi = psi_from_phi(phi, r_ref);
  m.phi = std::move(phi);
  return m;
}

namespace {

double spatial_part(const Burgers1DModel& m, double t, double x, double h) {
  auto p1 = [&](double y) { return m.psi.psi1(m.u(t, y)); };
  auto p2 = [&](double y) { return m.psi.psi2(m.u(t, y)); };
  const double d2 = (p1(x + h) - 2.0 * p1(x) + p1(x - h)) / (h * h);
  const double d1 = (p2(x + h) - p2(x - h)) / (2.0 * h);
  return 0.5 * d2 + 0.5 * d1;
}

}  // namespace

double burgers_residual(const Burgers1DModel& model, double t, double x,
                        double h) {
  const double ut =
      t - h >= 0.0
          ? (model.u(t + h, x) - model.u(t - h, x)) / (2.0 * h)
          : (-3.0 * model.u(t, x) + 4.0 * model.u(t + h, x) -
             model.u(t + 2.0 * h, x)) /
                (2.0 * h);
  return ut + spatial_part(model, t, x, h);
}

double harmonic_residual(const Burgers1DModel& model, double x, double h) {
  return spatial_part(model, 0.0, x, h);
}

double phi_mismatch(const Field1D& b, const Burgers1DModel& model, double t,
                    double x) {
  return std::abs(b(t, x) - model.phi.phi(model.u(t, x)));
}

}  // namespace pathind
