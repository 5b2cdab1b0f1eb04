#include "ssvep/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ssvep {

double accuracy(const std::vector<CommandLabel>& predictions,
                const std::vector<CommandLabel>& labels) {
  if (predictions.empty()) throw std::invalid_argument("accuracy: empty input");
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("accuracy: length mismatch");
  }
  int correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

namespace {
double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }
}  // namespace

double bits_per_trial(double p, int n_commands) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("bits_per_trial: P out of [0, 1]");
  if (n_commands < 2) throw std::invalid_argument("bits_per_trial: N must be >= 2");
  const double n = static_cast<double>(n_commands);
  double b = std::log2(n) + xlog2x(p);
  if (p < 1.0) b += (1.0 - p) * std::log2((1.0 - p) / (n - 1.0));
  return b;
}

double itr_bits_per_minute(double bits, double q_per_minute) {
  if (q_per_minute <= 0.0) {
    throw std::invalid_argument("itr: classifications per minute must be positive");
  }
  return bits * q_per_minute;
}

std::string to_string(ItrTimeBase base) {
  return base == ItrTimeBase::stimulation ? "stimulation" : "measured_compute";
}

ItrTimeBase itr_time_base_from_string(const std::string& name) {
  if (name == "stimulation") return ItrTimeBase::stimulation;
  if (name == "measured_compute") return ItrTimeBase::measured_compute;
  throw std::invalid_argument("unknown ITR time base: " + name);
}

double q_per_minute_from_seconds(double seconds_per_classification) {
  if (seconds_per_classification <= 0.0) {
    throw std::invalid_argument("itr: seconds per classification must be positive");
  }
  return 60.0 / seconds_per_classification;
}

namespace {

double log_gamma(double x) { return std::lgamma(x); }

// Continued fraction for the incomplete beta (Lentz's method).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 300;
  constexpr double kEpsilon = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEpsilon) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) {
    throw std::invalid_argument("incomplete beta: x out of [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  // The continued fraction converges fast only for x < (a+1)/(a+b+2);
  // otherwise use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, int nu) {
  if (nu < 1) throw std::invalid_argument("student_t_cdf: dof must be >= 1");
  const double v = static_cast<double>(nu);
  const double x = v / (v + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(v / 2.0, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t_test: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("paired_t_test: need at least 2 pairs");
  const std::size_t n = a.size();

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) {
    throw std::invalid_argument("paired_t_test: zero variance of differences");
  }

  TTestResult result;
  result.degrees_of_freedom = static_cast<int>(n) - 1;
  result.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  result.p_value =
      2.0 * (1.0 - student_t_cdf(std::abs(result.t), result.degrees_of_freedom));
  return result;
}

}  // namespace ssvep
