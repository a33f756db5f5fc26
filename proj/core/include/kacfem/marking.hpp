#pragma once

#include <string>
#include <vector>

#include "kacfem/estimator.hpp"

namespace kacfem {

enum class MarkingKind { global, maximum, doerfler };

struct MarkingRule {
  MarkingKind kind = MarkingKind::maximum;
  double theta = 0.7;  // in (0, 1]; ignored for global
};

/// Parse "global", "max:0.7", "doerfler:0.5". Throws std::invalid_argument.
MarkingRule parse_marking(const std::string& spec);

std::string marking_to_string(const MarkingRule& rule);

/// Select elements to refine. Every result contains an element attaining the
/// maximum local estimate. global: all elements; maximum: eta(T) >= theta *
/// max eta; doerfler: greedy minimal set with sum of eta^2 >= theta^2 * total
/// (descending eta, ties by ascending index). All-zero input marks element 0
/// so refinement always makes progress. Result is sorted ascending.
std::vector<int> mark(const LocalEstimates& est, const MarkingRule& rule);

}  // namespace kacfem
