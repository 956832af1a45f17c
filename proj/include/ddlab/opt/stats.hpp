#pragma once

#include <span>
#include <vector>

namespace ddlab::opt {

struct Quartiles
{
  double lower = 0;
  double median = 0;
  double upper = 0;
};

// Linear interpolation between order statistics (the usual "type 7" rule).
double quantile(std::span<double const> values, double q);
Quartiles quartiles(std::span<double const> values);

} // namespace ddlab::opt
