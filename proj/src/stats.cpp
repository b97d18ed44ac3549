#include "optrate/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace optrate {

SampleSummary summarize(const std::vector<double>& x) {
  SampleSummary s;
  s.count = static_cast<int>(x.size());
  if (x.empty()) return s;
  double sum = 0.0;
  for (double v : x) sum += v;
  s.mean = sum / s.count;
  if (s.count < 2) return s;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    double c = v - s.mean;
    m2 += c * c;
    m4 += c * c * c * c;
  }
  s.variance = m2 / (s.count - 1);
  s.std_error = std::sqrt(s.variance / s.count);
  double mu2 = m2 / s.count, mu4 = m4 / s.count;
  double n = s.count;
  // Var(s^2) = (mu4 - (n-3)/(n-1) mu2^2) / n
  double v = (mu4 - (n - 3.0) / (n - 1.0) * mu2 * mu2) / n;
  s.var_std_error = std::sqrt(std::max(v, 0.0));
  return s;
}

double binomial_upper_tail(int trials, double p, int c) {
  if (c >= trials) return 0.0;
  if (c < 0) return 1.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double tail = 0.0;
  for (int k = c + 1; k <= trials; ++k) {
    double lg = std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0) +
                k * std::log(p) + (trials - k) * std::log1p(-p);
    tail += std::exp(lg);
  }
  return std::min(tail, 1.0);
}

int binomial_upper_critical(int trials, double p, double alpha) {
  for (int c = 0; c <= trials; ++c)
    if (binomial_upper_tail(trials, p, c) <= alpha) return c;
  return trials;
}

LinearFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs >= 2 points");
  double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("line fit needs distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("log-log fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return least_squares_line(lx, ly);
}

double golden_section_min(const std::function<double(double)>& f, double a, double b, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
double normal_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace optrate
