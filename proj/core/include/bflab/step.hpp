#pragma once

#include <array>
#include <cstdint>
#include <variant>

namespace bflab {

// One sequential increment of data. Two-group contingency designs under fixed
// parameters add one observation per group per step; joint-multinomial prior
// draws add a single observation anywhere in the table.
struct ScalarObservation {
    double x = 0.0;
};

struct RegressionRow {
    double x = 0.0;
    double y = 0.0;
};

struct BinaryObservation {
    bool one = false;
};

struct CellObservation {
    std::array<std::uint32_t, 4> increments{};
};

using StepUnit = std::variant<ScalarObservation, RegressionRow, BinaryObservation, CellObservation>;

}  // namespace bflab
