#include "wishratio/types.hpp"

#include <cmath>
#include <limits>

#include "wishratio/errors.hpp"

namespace wishratio {

void ProblemSpec::validate() const {
  if (m < 1) throw parameter_error("dimension m must be >= 1");
  if (static_cast<int>(beta.size()) != m)
    throw parameter_error("beta must have exactly m entries");
  if (!(n1 >= m) || !(n2 >= m))
    throw parameter_error("degrees of freedom must satisfy n1 >= m and n2 >= m");
  for (double b : beta) {
    if (!(b > 0.0) || !std::isfinite(b))
      throw parameter_error("all beta eigenvalues must be positive and finite");
  }
}

double ProblemSpec::min_beta_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < beta.size(); ++i)
    for (size_t j = i + 1; j < beta.size(); ++j)
      gap = std::min(gap, std::abs(beta[i] - beta[j]));
  return gap;
}

ProblemSpec ProblemSpec::swapped() const {
  ProblemSpec s;
  s.m = m;
  s.n1 = n2;
  s.n2 = n1;
  s.beta.reserve(beta.size());
  for (double b : beta) s.beta.push_back(1.0 / b);
  return s;
}

}  // namespace wishratio
