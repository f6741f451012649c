#pragma once

#include <span>

namespace dqa {

// Inverse CDF of the standard normal distribution, p in (0, 1).
double normal_quantile(double p);

// Inverse CDF of Student's t with `dof` degrees of freedom, p in (0, 1).
double student_t_quantile(double p, double dof);

double mean(std::span<const double> xs);

// NaN when either input has zero variance.
double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

// Pearson correlation of average ranks (ties share their mean rank).
double spearman_correlation(std::span<const double> xs, std::span<const double> ys);

}  // namespace dqa
