#pragma once

#include <array>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>

namespace pathind {

// Largest state dimension supported by the fixed-capacity vector types.
inline constexpr int kMaxDim = 8;

class Vec {
 public:
  Vec() = default;
  explicit Vec(int dim, double fill = 0.0);
  Vec(std::initializer_list<double> values);

  [[nodiscard]] int size() const { return size_; }
  double& operator[](int i) { return data_[i]; }
  double operator[](int i) const { return data_[i]; }
  [[nodiscard]] std::span<const double> values() const {
    return {data_.data(), static_cast<std::size_t>(size_)};
  }

  [[nodiscard]] bool all_finite() const;
  [[nodiscard]] double norm_inf() const;

  friend bool operator==(const Vec&, const Vec&) = default;

 private:
  std::array<double, kMaxDim> data_{};
  int size_ = 0;
};

// Square matrix, row-major.
class Mat {
 public:
  Mat() = default;
  explicit Mat(int dim, double fill = 0.0);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(int dim);
  static Mat diag(const Vec& d);

  [[nodiscard]] int size() const { return size_; }
  double& operator()(int i, int j) { return data_[i * kMaxDim + j]; }
  double operator()(int i, int j) const { return data_[i * kMaxDim + j]; }

  [[nodiscard]] bool all_finite() const;

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::array<double, kMaxDim * kMaxDim> data_{};
  int size_ = 0;
};

Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);
Vec operator*(const Mat& m, const Vec& v);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);
Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);

Mat transpose(const Mat& m);
double trace(const Mat& m);
double dot(const Vec& a, const Vec& b);
double max_abs(const Mat& m);

// Gaussian elimination with partial pivoting. Throws SingularMatrix when a
// pivot falls below 1e-13 times the largest row norm of m.
Mat mat_inverse(const Mat& m);

// Solves m * x = rhs with the same elimination and singularity rule.
Vec solve(const Mat& m, const Vec& rhs);

using ScalarField = std::function<double(double t, const Vec& x)>;

// Central differences in space. Default step is 1e-5 * max(1, |x|_inf).
Vec fd_gradient(const ScalarField& f, double t, const Vec& x,
                std::optional<double> h = std::nullopt);

// Second differences; symmetric by construction. Default step is
// 1e-4 * max(1, |x|_inf).
Mat fd_hessian(const ScalarField& f, double t, const Vec& x,
               std::optional<double> h = std::nullopt);

// Central in t when t - h >= 0, otherwise the forward three-point stencil.
// Default step is 1e-5 * max(1, |t|).
double fd_time_derivative(const ScalarField& f, double t, const Vec& x,
                          std::optional<double> h = std::nullopt);

}  // namespace pathind
