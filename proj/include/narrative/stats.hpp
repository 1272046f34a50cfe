#pragma once

#include <span>
#include <vector>

namespace narrative::stats {

double mean(std::span<const double> values);

/// Nearest-rank quantile: the ceil(q * n)-th smallest value (q in (0, 1]).
double nearest_rank(std::span<const double> values, double q);

/// Conventional median: middle value, or the mean of the two middle values.
double median(std::span<const double> values);

/// Box summary shared by the TP position tables and the violin charts.
struct Quartiles {
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double min = 0;
  double max = 0;
};

/// q1/q3 by nearest rank, median conventional. Throws InputError on empty input.
Quartiles quartiles(std::span<const double> values);

/// Average (fractional) ranks, 1-based; ties share the mean of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation; throws UndefinedError when either side has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace narrative::stats
