// Solve one configuration with both analytic methods and print the report.

#include "mmcsetup/mmcsetup.hpp"

#include <iostream>

int main() {
    using namespace mmcsetup;
    const ValidatedParams p = validate(QueueParams::from_rho(0.5, 1.0, 0.1, 20));
    const CostParams costs;

    const JointDistribution qbd = stationary(p).distribution();
    const JointDistribution gf = solve_gf(p).distribution();
    const PerformanceReport r = evaluate(qbd, p, costs);

    std::cout << to_json(r).dump(2) << '\n';
    std::cout << "max |gf - qbd| = " << discrepancy(qbd, r, gf, evaluate(gf, p, costs)) << '\n';
    std::cout << "crossover alpha = " << crossover_finder(p.raw(), costs).alpha << '\n';
}
