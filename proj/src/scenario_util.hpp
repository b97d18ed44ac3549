#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optrate/experiments.hpp"
#include "optrate/parallel.hpp"

namespace optrate::detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline Eigen::VectorXd scaled_e1(int d, double norm) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  if (d > 0) w(0) = norm;
  return w;
}

// Runs body(trial, table) for every trial on the worker pool and appends the
// per-trial tables in trial order.
inline void run_trials(int trials, ResultTable& out,
                       const std::function<void(int, ResultTable&)>& body) {
  std::vector<ResultTable> parts(static_cast<std::size_t>(trials), ResultTable(out.scenario()));
  parallel_for(static_cast<std::size_t>(trials),
               [&](std::size_t t) { body(static_cast<int>(t), parts[t]); });
  for (const auto& p : parts) out.append(p);
}

inline Check make_check(const std::string& name, double nominal, double observed, bool pass) {
  return Check{name, nominal, observed, pass, 0};
}

inline bool within_rel(double value, double target, double tol) {
  return std::abs(value - target) <= tol * std::abs(target);
}

inline void require_positive(long long v, const std::string& key) {
  if (v < 1) throw ConfigError("config error: key '" + key + "' must be >= 1");
}

}  // namespace optrate::detail
