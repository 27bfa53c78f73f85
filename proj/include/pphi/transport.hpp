#pragma once

#include <functional>
#include <vector>

namespace pphi {

struct TransportSolution {
    double cost = 0.0;      // optimal transport cost
    double dual_value = 0.0; // certificate: equals cost at optimality
    long pivots = 0;
};

// Exact solution of the balanced transportation problem
//   min sum_{ij} f_ij c(i,j)  s.t.  sum_j f_ij = supply_i, sum_i f_ij = demand_j
// by the transportation simplex with block pricing. Supplies are perturbed
// by O(1e-11) to avoid degenerate cycling; the dual value reported is for
// the unperturbed data, so |cost - dual_value| certifies optimality.
TransportSolution solve_transport(const std::vector<double>& supply,
                                  const std::vector<double>& demand,
                                  const std::function<double(int, int)>& cost);

} // namespace pphi
