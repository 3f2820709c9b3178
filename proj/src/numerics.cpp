#include "pathind/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pathind/error.hpp"

namespace pathind {

namespace {

void check_dim(int dim) {
  if (dim < 0 || dim > kMaxDim) {
    throw Error(ErrorKind::DimensionMismatch,
                "dimension " + std::to_string(dim) + " outside [0, " +
                    std::to_string(kMaxDim) + "]");
  }
}

void require_same(int a, int b, const char* op) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(op) + ": sizes " + std::to_string(a) + " and " +
                    std::to_string(b));
  }
}

double checked(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::NonFiniteValue,
                "non-finite field value in finite-difference stencil");
  }
  return value;
}

}  // namespace

Vec::Vec(int dim, double fill) : size_(dim) {
  check_dim(dim);
  std::fill_n(data_.begin(), dim, fill);
}

Vec::Vec(std::initializer_list<double> values)
    : size_(static_cast<int>(values.size())) {
  check_dim(size_);
  std::copy(values.begin(), values.end(), data_.begin());
}

bool Vec::all_finite() const {
  return std::all_of(data_.begin(), data_.begin() + size_,
                     [](double v) { return std::isfinite(v); });
}

double Vec::norm_inf() const {
  double m = 0.0;
  for (int i = 0; i < size_; ++i) m = std::max(m, std::abs(data_[i]));
  return m;
}

Mat::Mat(int dim, double fill) : size_(dim) {
  check_dim(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) (*this)(i, j) = fill;
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows)
    : size_(static_cast<int>(rows.size())) {
  check_dim(size_);
  int i = 0;
  for (const auto& row : rows) {
    require_same(static_cast<int>(row.size()), size_, "Mat");
    int j = 0;
    for (double v : row) (*this)(i, j++) = v;
    ++i;
  }
}

Mat Mat::identity(int dim) {
  Mat m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diag(const Vec& d) {
  Mat m(d.size());
  for (int i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

bool Mat::all_finite() const {
  for (int i = 0; i < size_; ++i)
    for (int j = 0; j < size_; ++j)
      if (!std::isfinite((*this)(i, j))) return false;
  return true;
}

Vec operator+(const Vec& a, const Vec& b) {
  require_same(a.size(), b.size(), "vector add");
  Vec r(a.size());
  for (int i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec operator-(const Vec& a, const Vec& b) {
  require_same(a.size(), b.size(), "vector subtract");
  Vec r(a.size());
  for (int i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec operator*(double s, const Vec& a) {
  Vec r(a.size());
  for (int i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

Vec operator*(const Mat& m, const Vec& v) {
  require_same(m.size(), v.size(), "matrix-vector product");
  Vec r(v.size());
  for (int i = 0; i < m.size(); ++i) {
    double s = 0.0;
    for (int j = 0; j < m.size(); ++j) s += m(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

Mat operator*(const Mat& a, const Mat& b) {
  require_same(a.size(), b.size(), "matrix product");
  const int n = a.size();
  Mat r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

Mat operator*(double s, const Mat& a) {
  Mat r(a.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j) r(i, j) = s * a(i, j);
  return r;
}

Mat operator+(const Mat& a, const Mat& b) {
  require_same(a.size(), b.size(), "matrix add");
  Mat r(a.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

Mat operator-(const Mat& a, const Mat& b) {
  require_same(a.size(), b.size(), "matrix subtract");
  Mat r(a.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

Mat transpose(const Mat& m) {
  Mat r(m.size());
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) r(j, i) = m(i, j);
  return r;
}

double trace(const Mat& m) {
  double s = 0.0;
  for (int i = 0; i < m.size(); ++i) s += m(i, i);
  return s;
}

double dot(const Vec& a, const Vec& b) {
  require_same(a.size(), b.size(), "inner product");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(const Mat& m) {
  double r = 0.0;
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) r = std::max(r, std::abs(m(i, j)));
  return r;
}

namespace {

// In-place elimination on [m | rhs] where rhs has `cols` columns stored in a
// second matrix. Returns the solution columns.
Mat eliminate(Mat m, Mat rhs, int cols) {
  const int n = m.size();
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += std::abs(m(i, j));
    scale = std::max(scale, row);
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorKind::SingularMatrix, "matrix is zero or non-finite");
  }
  const double tiny = 1e-13 * scale;

  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
    if (std::abs(m(p, k)) < tiny) {
      throw Error(ErrorKind::SingularMatrix,
                  "pivot " + std::to_string(k) + " below tolerance");
    }
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      for (int j = 0; j < cols; ++j) std::swap(rhs(k, j), rhs(p, j));
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = m(i, k) / m(k, k);
      if (f == 0.0) continue;
      for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      for (int j = 0; j < cols; ++j) rhs(i, j) -= f * rhs(k, j);
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    for (int j = 0; j < cols; ++j) {
      double s = rhs(k, j);
      for (int i = k + 1; i < n; ++i) s -= m(k, i) * rhs(i, j);
      rhs(k, j) = s / m(k, k);
    }
  }
  return rhs;
}

}  // namespace

Mat mat_inverse(const Mat& m) {
  return eliminate(m, Mat::identity(m.size()), m.size());
}

Vec solve(const Mat& m, const Vec& rhs) {
  require_same(m.size(), rhs.size(), "solve");
  Mat b(m.size());
  for (int i = 0; i < m.size(); ++i) b(i, 0) = rhs[i];
  const Mat x = eliminate(m, b, 1);
  Vec r(m.size());
  for (int i = 0; i < m.size(); ++i) r[i] = x(i, 0);
  return r;
}

Vec fd_gradient(const ScalarField& f, double t, const Vec& x,
                std::optional<double> h) {
  const double step = h.value_or(1e-5 * std::max(1.0, x.norm_inf()));
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec xp = x;
    Vec xm = x;
    xp[i] += step;
    xm[i] -= step;
    g[i] = (checked(f(t, xp)) - checked(f(t, xm))) / (2.0 * step);
  }
  return g;
}

Mat fd_hessian(const ScalarField& f, double t, const Vec& x,
               std::optional<double> h) {
  const double step = h.value_or(1e-4 * std::max(1.0, x.norm_inf()));
  const int n = x.size();
  const double f0 = checked(f(t, x));
  Mat hess(n);
  for (int i = 0; i < n; ++i) {
    Vec xp = x;
    Vec xm = x;
    xp[i] += step;
    xm[i] -= step;
    hess(i, i) =
        (checked(f(t, xp)) - 2.0 * f0 + checked(f(t, xm))) / (step * step);
    for (int j = i + 1; j < n; ++j) {
      Vec pp = x, pm = x, mp = x, mm = x;
      pp[i] += step, pp[j] += step;
      pm[i] += step, pm[j] -= step;
      mp[i] -= step, mp[j] += step;
      mm[i] -= step, mm[j] -= step;
      const double ij = (checked(f(t, pp)) - checked(f(t, pm)) -
                         checked(f(t, mp)) + checked(f(t, mm))) /
                        (4.0 * step * step);
      hess(i, j) = ij;
      hess(j, i) = ij;
    }
  }
  return hess;
}

double fd_time_derivative(const ScalarField& f, double t, const Vec& x,
                          std::optional<double> h) {
  const double step = h.value_or(1e-5 * std::max(1.0, std::abs(t)));
  if (t - step >= 0.0) {
    return (checked(f(t + step, x)) - checked(f(t - step, x))) / (2.0 * step);
  }
  return (-3.0 * checked(f(t, x)) + 4.0 * checked(f(t + step, x)) -
          checked(f(t + 2.0 * step, x))) /
         (2.0 * step);
}

}  // namespace pathind
