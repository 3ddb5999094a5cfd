#pragma once

#include <vector>

namespace heavycomb {

/// Benjamini-Hochberg step-up q-values, in input order.
std::vector<double> bh_adjust(const std::vector<double>& pvals);

/// p_i <= alpha / m.
std::vector<bool> bonferroni(const std::vector<double>& pvals, double alpha);

}  // namespace heavycomb
