#pragma once

#include <span>
#include <vector>

namespace xctrl {

// Linear-interpolation percentile between order statistics (the "type 7"
// convention); q in [0, 100]. The same convention backs the IQR quartiles
// and the bootstrap interval endpoints.
double percentile(std::vector<double> values, double q);

// Percentile of an already ascending-sorted range.
double percentile_sorted(std::span<const double> sorted, double q);

double mean(std::span<const double> values);

// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
double sample_stddev(std::span<const double> values);

// Spearman rank correlation; ranks tie-averaged.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace xctrl
