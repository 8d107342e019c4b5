#include "monoproj/toxicology.hpp"

namespace monoproj {

const std::array<ToxicologyCell, kToxicologyCells>& toxicology_table() {
    static const std::array<ToxicologyCell, kToxicologyCells> table{{
        {0, 0, 59, 3000}, {0, 1, 65, 3000}, {0, 2, 70, 3000}, {0, 3, 67, 3000},
        {1, 0, 67, 3000}, {1, 1, 75, 3000}, {1, 2, 83, 3000}, {1, 3, 84, 3000},
        {2, 0, 76, 3000}, {2, 1, 87, 3000}, {2, 2, 96, 3000}, {2, 3, 83, 3000},
        {3, 0, 94, 3000}, {3, 1, 107, 3000}, {3, 2, 110, 3000}, {3, 3, 117, 3000},
    }};
    return table;
}

Dataset toxicology_dataset() {
    std::vector<double> x, y;
    for (const auto& c : toxicology_table()) {
        x.push_back(c.x1);
        x.push_back(c.x2);
        y.push_back(c.proportion());
    }
    return Dataset(2, std::move(x), std::move(y), {{0.0, 3.0}, {0.0, 3.0}});
}

}  // namespace monoproj
