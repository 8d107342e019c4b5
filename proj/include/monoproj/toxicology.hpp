#pragma once

#include <array>
#include <cstddef>

#include "monoproj/core.hpp"

namespace monoproj {

// Micronucleus counts in human hepatic cells under combined DDT and TiO2
// exposure. Predictors are on the transformed log scale:
// x1 = log10(DDT) + 4, x2 = log10(TiO2) + 3, both in {0, 1, 2, 3}.
struct ToxicologyCell {
    double x1;
    double x2;
    int events;
    int trials;

    double proportion() const { return static_cast<double>(events) / trials; }
};

inline constexpr std::size_t kToxicologyCells = 16;

// Row-major over (x1, x2): x2 varies fastest.
const std::array<ToxicologyCell, kToxicologyCells>& toxicology_table();

// Proportions as responses, domain [0,3]^2.
Dataset toxicology_dataset();

}  // namespace monoproj
