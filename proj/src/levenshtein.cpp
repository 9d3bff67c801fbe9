#include "smrlmt/levenshtein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace smrlmt {

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

bool withinDistance(std::string_view a, std::string_view b, std::size_t k) {
  if (a.size() < b.size()) std::swap(a, b);
  const std::size_t n = a.size(), m = b.size();
  if (n - m > k) return false;
  if (a == b) return true;
  if (k == 0) return false;
  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max() / 2;
  // Row i only needs columns j with |i - j| <= k.
  std::vector<std::size_t> prev(m + 1, inf), cur(m + 1, inf);
  for (std::size_t j = 0; j <= std::min(m, k); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t lo = i > k ? i - k : 0;
    const std::size_t hi = std::min(m, i + k);
    if (lo > 0) cur[lo - 1] = inf;
    std::size_t row_min = inf;
    if (lo == 0) {
      cur[0] = i;
      row_min = i;
    }
    for (std::size_t j = std::max<std::size_t>(lo, 1); j <= hi; ++j) {
      std::size_t best = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      best = std::min(best, prev[j] + 1);
      best = std::min(best, cur[j - 1] + 1);
      cur[j] = best;
      row_min = std::min(row_min, best);
    }
    if (row_min > k) return false;
    std::swap(prev, cur);
  }
  return prev[m] <= k;
}

std::size_t pageDistanceBound(std::size_t len_a, std::size_t len_b, double threshold) {
  return static_cast<std::size_t>(std::floor(threshold * static_cast<double>(std::max(len_a, len_b)) + 1e-9));
}

bool pageEqual(std::string_view a, std::string_view b, double threshold) {
  return withinDistance(a, b, pageDistanceBound(a.size(), b.size(), threshold));
}

}  // namespace smrlmt
