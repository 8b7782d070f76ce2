#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace elastic {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;
using CVec3 = std::array<cplx, 3>;

constexpr double kPi = 3.14159265358979323846;
constexpr const char* kVersion = "0.1.0";

// Input that violates a documented precondition (CLI exit code 2).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or a failed numerical guard (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void set_thread_count(int n);
int thread_count();

// Static contiguous chunking over [0, n); the chunk layout depends only on n
// and the thread count, never on timing.
void parallel_for(std::size_t n, const std::function<void(std::size_t begin, std::size_t end)>& body);

// Pairwise tree summation; result is independent of the thread count.
double pairwise_sum(const double* x, std::size_t n);
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

std::vector<double> geomspace(double lo, double hi, std::size_t n);

}  // namespace elastic
