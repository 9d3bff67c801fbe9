#pragma once

#include <cstddef>
#include <string_view>

namespace smrlmt {

/// Unit-cost edit distance (insert, delete, substitute) over bytes.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// True iff levenshtein(a, b) <= max_distance. Runs in O(max_distance * n)
/// using a diagonal band, so it is cheap for page comparisons with a small
/// relative threshold.
bool withinDistance(std::string_view a, std::string_view b, std::size_t max_distance);

/// Largest edit distance at which two bodies still count as the same page:
/// floor(threshold * max(|a|, |b|)).
std::size_t pageDistanceBound(std::size_t len_a, std::size_t len_b, double threshold);

/// Page identity used for crawl states and output comparison.
bool pageEqual(std::string_view a, std::string_view b, double threshold = 0.05);

}  // namespace smrlmt
