#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsr {

// Raised for arguments outside an operation's domain (non-finite input,
// empty lists, non-positive distances, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace statfun {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
// ln(10)/10: converts dB to natural-log units of power.
inline constexpr double kDbToNeper = 0.23025850929940456840;

inline void require_finite(double z, const char* what) {
  if (!std::isfinite(z)) {
    throw DomainError(std::string(what) + ": non-finite argument");
  }
}

/// Standard normal CDF Phi(z).
inline double std_normal_cdf(double z) {
  require_finite(z, "std_normal_cdf");
  return 0.5 * std::erfc(-z * kInvSqrt2);
}

/// Upper tail 1 - Phi(z), evaluated through erfc so the far tail keeps
/// full relative precision.
inline double q_function(double z) {
  require_finite(z, "q_function");
  return 0.5 * std::erfc(z * kInvSqrt2);
}

/// Inverse of the standard normal CDF, by bisection to double precision.
inline double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("std_normal_quantile: p must lie in (0, 1)");
  double lo = -40.0;
  double hi = 40.0;
  for (int k = 0; k < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++k) {
    const double mid = 0.5 * (lo + hi);
    (std_normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double std_normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

inline double normal_pdf(double x, double mean, double sigma) {
  return std_normal_pdf((x - mean) / sigma) / sigma;
}

struct Quadrature {
  double absolute_tolerance = 1e-8;
  // Convergence is declared when the error estimate is below either bound.
  // Set to 0 to make the absolute bound the only criterion.
  double relative_tolerance = 0.0;
  std::size_t max_subdivisions = std::size_t{1} << 14;

  void validate() const {
    if (!(absolute_tolerance > 0.0) && !(relative_tolerance > 0.0)) {
      throw DomainError("Quadrature: a positive tolerance is required");
    }
    if (absolute_tolerance < 0.0 || relative_tolerance < 0.0) {
      throw DomainError("Quadrature: tolerances must be non-negative");
    }
    if (max_subdivisions < 1) {
      throw DomainError("Quadrature: max_subdivisions must be >= 1");
    }
  }
};

struct IntegrationResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t subdivisions = 0;
  bool converged = true;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes at odd Kronrod positions (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lower;
  double upper;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod_15(F& f, double lower, double upper) {
  const double center = 0.5 * (lower + upper);
  const double half = 0.5 * (upper - lower);
  const double f_center = f(center);
  double kronrod = f_center * kKronrodWeights[7];
  double gauss = f_center * kGaussWeights[3];
  for (std::size_t k = 0; k < 7; ++k) {
    const double dx = half * kKronrodNodes[k];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[k] * pair;
    if (k % 2 == 1) gauss += kGaussWeights[k / 2] * pair;
  }
  return Panel{lower, upper, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over
/// [lower, upper]. The interval is first split into `initial_panels` equal
/// panels so narrow peaks inside a wide truncated support are not missed.
/// A non-converged result is returned with `converged == false`.
template <class F>
IntegrationResult integrate(F&& f, double lower, double upper, const Quadrature& q = {},
                            std::size_t initial_panels = 16) {
  q.validate();
  require_finite(lower, "integrate lower bound");
  require_finite(upper, "integrate upper bound");
  if (!(lower < upper)) {
    throw DomainError("integrate: lower bound must be below upper bound");
  }
  initial_panels = std::clamp<std::size_t>(initial_panels, 1, q.max_subdivisions);

  std::priority_queue<detail::Panel> panels;
  double total = 0.0;
  double total_error = 0.0;
  const double width = (upper - lower) / static_cast<double>(initial_panels);
  for (std::size_t k = 0; k < initial_panels; ++k) {
    const double a = lower + width * static_cast<double>(k);
    const double b = (k + 1 == initial_panels) ? upper : a + width;
    auto panel = detail::gauss_kronrod_15(f, a, b);
    total += panel.value;
    total_error += panel.error;
    panels.push(panel);
  }

  std::size_t count = initial_panels;
  auto tolerance = [&] {
    return std::max(q.absolute_tolerance, q.relative_tolerance * std::abs(total));
  };
  while (total_error > tolerance() && count < q.max_subdivisions) {
    const detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lower + worst.upper);
    if (!(mid > worst.lower && mid < worst.upper)) {
      // Interval cannot be split further in double precision.
      panels.push(worst);
      break;
    }
    auto left = detail::gauss_kronrod_15(f, worst.lower, mid);
    auto right = detail::gauss_kronrod_15(f, mid, worst.upper);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }

  // Re-sum to shed the drift of the running totals.
  double value = 0.0;
  double error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  const double bound = std::max(q.absolute_tolerance, q.relative_tolerance * std::abs(value));
  return IntegrationResult{value, error, count, error <= bound};
}

// ---------------------------------------------------------------------------
// Lognormal sums

enum class LognormalSumMethod { MomentMatching };

struct DbGaussian {
  double mu_db;
  double sigma_db;
};

/// Approximates the dB value of a sum of independent lognormal powers
/// (component i is 10^(X_i/10) with X_i ~ N(means_db[i], sigmas_db[i]^2))
/// by a single dB-domain Gaussian. Moment matching reproduces the first two
/// linear-domain moments of the sum exactly.
inline DbGaussian lognormal_sum_approx(std::span<const double> means_db,
                                       std::span<const double> sigmas_db,
                                       LognormalSumMethod method = LognormalSumMethod::MomentMatching) {
  if (means_db.empty()) throw DomainError("lognormal_sum_approx: empty component list");
  if (means_db.size() != sigmas_db.size()) {
    throw DomainError("lognormal_sum_approx: means and sigmas differ in length");
  }
  for (std::size_t k = 0; k < means_db.size(); ++k) {
    require_finite(means_db[k], "lognormal_sum_approx mean");
    require_finite(sigmas_db[k], "lognormal_sum_approx sigma");
    if (!(sigmas_db[k] > 0.0)) throw DomainError("lognormal_sum_approx: sigma must be positive");
  }
  if (means_db.size() == 1) return {means_db[0], sigmas_db[0]};

  switch (method) {
    case LognormalSumMethod::MomentMatching:
      break;
  }

  // Work relative to the largest mean so the linear powers stay O(1).
  const double ref_db = *std::max_element(means_db.begin(), means_db.end());
  double mean = 0.0;
  double variance = 0.0;
  for (std::size_t k = 0; k < means_db.size(); ++k) {
    const double m = kDbToNeper * (means_db[k] - ref_db);
    const double s2 = std::pow(kDbToNeper * sigmas_db[k], 2);
    const double first = std::exp(m + 0.5 * s2);
    mean += first;
    variance += first * first * std::expm1(s2);
  }
  const double log_var = std::log1p(variance / (mean * mean));
  const double log_mean = std::log(mean) - 0.5 * log_var;
  return {ref_db + log_mean / kDbToNeper, std::sqrt(log_var) / kDbToNeper};
}

/// Linear-domain mean (mW when the dB values are dBm) of 10^(X/10).
inline double lognormal_linear_mean(double mu_db, double sigma_db) {
  const double s = kDbToNeper * sigma_db;
  return std::exp(kDbToNeper * mu_db + 0.5 * s * s);
}

}  // namespace statfun
}  // namespace hsr
