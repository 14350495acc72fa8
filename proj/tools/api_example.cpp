// Decides a small two-dimensional instance and prints the verdict.
#include <iostream>

#include "ballcover/ballcover.hpp"

int main() {
    using namespace ballcover;
    const std::vector<Ball> lambda{make_ball({0.0, 0.0}, 2.0), make_ball({1.0, 0.0}, 2.0)};
    const std::vector<Ball> v{make_ball({0.5, 0.0}, 1.0)};

    const DecisionReport report = decide_instance(lambda, v);
    std::cout << "covered: " << std::boolalpha << report.covered << "\n";
    if (report.witness) std::cout << "witness: " << report.witness->transpose() << "\n";
    for (const auto& c : report.certificates) std::cout << "v[" << c.input_index << "]: " << to_string(c.kind) << "\n";
    return 0;
}
