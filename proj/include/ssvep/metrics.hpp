#pragma once

#include <string>
#include <vector>

#include "ssvep/core.hpp"

namespace ssvep {

double accuracy(const std::vector<CommandLabel>& predictions,
                const std::vector<CommandLabel>& labels);

// Bits carried by one classification among N equally likely commands at
// accuracy P, with x*log2(x) taken as 0 at x = 0:
//   B = log2(N) + P*log2(P) + (1-P)*log2((1-P)/(N-1))
double bits_per_trial(double p, int n_commands);

// Q is classifications per minute; ITR = B * Q in bits per minute.
double itr_bits_per_minute(double bits, double q_per_minute);

// Two ways to turn per-classification time into Q. The stimulation base uses
// the 5 s flicker window; the compute base uses measured (or configured)
// classification wall time. Reports always state which base produced a
// number, since they differ by more than an order of magnitude.
enum class ItrTimeBase { stimulation, measured_compute };
std::string to_string(ItrTimeBase base);
ItrTimeBase itr_time_base_from_string(const std::string& name);

double q_per_minute_from_seconds(double seconds_per_classification);

struct TTestResult {
  double t = 0.0;
  double p_value = 1.0;  // two-sided
  int degrees_of_freedom = 0;
};

// Paired two-sided t-test on a - b. Throws when the differences have zero
// variance (including a == b).
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

// CDF of Student's t with nu degrees of freedom, via the regularized
// incomplete beta function (continued-fraction evaluation).
double student_t_cdf(double t, int nu);
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace ssvep
