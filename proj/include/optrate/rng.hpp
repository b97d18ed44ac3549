#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace optrate {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Seed for stream `index` under `base`; independent of evaluation order.
std::uint64_t child_seed(std::uint64_t base, std::uint64_t index);

Rng make_rng(std::uint64_t base, std::uint64_t index);

// Fills in storage (column-major) order.
template <class Derived>
void fill_normal(Eigen::PlainObjectBase<Derived>& out, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  double* p = out.data();
  for (Eigen::Index i = 0; i < out.size(); ++i) p[i] = nd(rng);
}

}  // namespace optrate
