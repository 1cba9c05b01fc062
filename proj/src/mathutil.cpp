#include "flproj/mathutil.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "flproj/errors.hpp"

namespace flproj {

namespace {

// Acklam's rational approximation to the probit function.
double probit_seed(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) return -probit_seed(1.0 - p);
  double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, Errc::invalid_argument,
          "normal_quantile: p must lie in (0,1)");
  double x = probit_seed(p);
  // One Halley step on f(x) = Phi(x) - p.
  const double inv_sqrt2 = 0.7071067811865475244;
  const double inv_sqrt2pi = 0.3989422804014326779;
  double e = 0.5 * std::erfc(-x * inv_sqrt2) - p;
  double u = e / (inv_sqrt2pi * std::exp(-0.5 * x * x));
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double pairwise_sum(std::span<const double> v) {
  const size_t n = v.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  size_t half = n / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double median_inplace(std::vector<double>& v) {
  require(!v.empty(), Errc::invalid_argument, "median of empty set");
  size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

double quantile_type7_sorted(const std::vector<double>& sorted, double p) {
  require(!sorted.empty(), Errc::invalid_argument, "quantile of empty set");
  require(p >= 0.0 && p <= 1.0, Errc::invalid_argument, "quantile: p outside [0,1]");
  const size_t n = sorted.size();
  if (n == 1) return sorted[0];
  // h = (n-1)p; interpolate between floor(h) and floor(h)+1 order stats.
  double h = static_cast<double>(n - 1) * p;
  size_t lo = static_cast<size_t>(std::floor(h));
  if (lo >= n - 1) return sorted[n - 1];
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_stream(uint64_t master_seed, uint64_t rep_index) {
  uint64_t s = splitmix64(master_seed ^ splitmix64(rep_index + 0x632BE59BD9B4E019ULL));
  return std::mt19937_64(s);
}

std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::string(buf);
}

}  // namespace flproj
