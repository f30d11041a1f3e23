#pragma once

#include <cstddef>
#include <vector>

namespace curveshift {

enum class Orientation { Convex, Concave };

/// One observed series y_1..y_n on the uniform design i/n. Concave data
/// is negated on construction so the rest of the pipeline can assume a
/// convex curve; the flag records the mapping for reporting.
struct Sample {
    std::vector<double> responses; // after any negation
    Orientation orientation = Orientation::Convex;

    std::size_t size() const { return responses.size(); }
    double design_point(std::size_t i) const {
        return static_cast<double>(i + 1) / static_cast<double>(responses.size());
    }
    bool negated() const { return orientation == Orientation::Concave; }
};

/// Validates (n >= 10, all finite) and applies the orientation rule.
Sample make_sample(std::vector<double> responses, Orientation orientation);

} // namespace curveshift
