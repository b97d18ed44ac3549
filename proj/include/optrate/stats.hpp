#pragma once

#include <functional>
#include <vector>

namespace optrate {

struct SampleSummary {
  int count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;
  double var_std_error = 0.0;  // standard error of the sample variance
};

SampleSummary summarize(const std::vector<double>& x);

// Largest failure count still consistent with rate p at one-sided level alpha:
// smallest c with P(Binomial(trials, p) > c) <= alpha.
int binomial_upper_critical(int trials, double p, double alpha);
double binomial_upper_tail(int trials, double p, int c);  // P(X > c)

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y);
// Fit of log y against log x.
LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

// Minimiser of a unimodal f on [a, b].
double golden_section_min(const std::function<double(double)>& f, double a, double b, double tol);

double normal_cdf(double x);
double normal_pdf(double x);
double normal_tail(double x);  // Q(x) = 1 - Phi(x)

}  // namespace optrate
