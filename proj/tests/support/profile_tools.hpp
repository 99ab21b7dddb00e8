#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace testing_support {

// Strict local maxima whose value exceeds rel_threshold * global maximum.
// Plateaus count once, at their first sample. The floor keeps quadrature
// noise in far tails (around 1e-29 of the peak) from counting as structure.
inline std::vector<std::size_t> significant_maxima(const std::vector<double>& v,
                                                   double rel_threshold = 1e-3) {
  std::vector<std::size_t> out;
  if (v.size() < 3)
    return out;
  const double floor = rel_threshold * *std::max_element(v.begin(), v.end());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] <= floor || !(v[i] > v[i - 1]))
      continue;
    std::size_t j = i;
    while (j + 1 < v.size() && v[j + 1] == v[i])
      ++j;
    if (j + 1 < v.size() && v[j + 1] < v[i])
      out.push_back(i);
  }
  return out;
}

// Index of the smallest sample strictly between two indices.
inline std::size_t minimum_between(const std::vector<double>& v, std::size_t lo,
                                   std::size_t hi) {
  return static_cast<std::size_t>(
      std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1,
                       v.begin() + static_cast<std::ptrdiff_t>(hi)) -
      v.begin());
}

} // namespace testing_support
