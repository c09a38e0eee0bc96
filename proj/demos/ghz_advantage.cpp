// Compares the best separable and entangled probes on the n-qubit family.
//
//   ghz_advantage [n] [xi]

#include "corrnoise/optimize.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char **argv) {
    using namespace corrnoise;
    const int n = argc > 1 ? std::atoi(argv[1]) : 4;
    const double xi = argc > 2 ? std::atof(argv[2]) : 0.01;
    try {
        for (Regime regime : {Regime::time_averaged, Regime::per_shot}) {
            const AdvantageRatio a = advantage_ratio(n, xi, regime);
            std::cout << to_string(regime) << " regime: entangled " << a.entangled_best.value
                      << " (pair " << std::get<CoherencePair>(a.entangled_best.probe).label()
                      << "), separable " << a.separable_best.value << ", ratio " << a.ratio
                      << '\n';
        }
        std::cout << "dynamical range threshold xi_c = " << dynamical_range_threshold(n) << '\n';
    } catch (const Error &e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    return 0;
}
