#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mdl/data.hpp"

namespace testutil {

inline mdl::DataSequence bin_string(std::uint32_t mask, int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = static_cast<int>((mask >> i) & 1u);
  return mdl::DataSequence::categorical(v, 2);
}

template <typename F>
void for_each_binary(int n, F&& f) {
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) f(bin_string(mask, n));
}

template <typename F>
void for_each_string(int n, int r, F&& f) {
  std::vector<int> v(n, 0);
  while (true) {
    f(mdl::DataSequence::categorical(v, r));
    int j = 0;
    while (j < n && ++v[j] == r) {
      v[j] = 0;
      ++j;
    }
    if (j == n) break;
  }
}

inline std::vector<int> random_cats(std::mt19937_64& rng, int n, int r) {
  std::uniform_int_distribution<int> u(0, r - 1);
  std::vector<int> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline std::vector<double> random_reals(std::mt19937_64& rng, int n, double sd) {
  std::normal_distribution<double> g(0.0, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace testutil
