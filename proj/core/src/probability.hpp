#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockprop::detail {

// Clamps float dust below zero and renormalizes rows that are off by less
// than `tol`; anything larger is a model bug.
template <typename Entry>
void tidy_row(std::vector<Entry>& row, double tol = 1e-12) {
    double sum = 0.0;
    for (auto& e : row) {
        if (e.probability < 0.0) {
            if (e.probability < -1e-15) {
                throw std::logic_error("negative transition probability " + std::to_string(e.probability));
            }
            e.probability = 0.0;
        }
        sum += e.probability;
    }
    if (std::abs(sum - 1.0) > tol) {
        throw std::logic_error("transition row sums to " + std::to_string(sum));
    }
    for (auto& e : row) e.probability /= sum;
}

}  // namespace blockprop::detail
