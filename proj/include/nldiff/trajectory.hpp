#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nldiff/diffusivity.hpp"
#include "nldiff/errors.hpp"
#include "nldiff/grid.hpp"

namespace nldiff {

enum class TrajectorySource { ReferenceSolver, TaylorSeries, Analytic };

/// Concentration snapshots c(t_i) on one grid.
struct Trajectory {
    DiffusivityModel model;
    Grid3 grid;
    std::vector<double> times;
    std::vector<ScalarField3> fields;
    TrajectorySource source = TrajectorySource::ReferenceSolver;

    std::size_t size() const { return times.size(); }

    /// Throws ShapeError unless times increase strictly and fields share the grid.
    void validate(std::size_t min_snapshots = 1) const {
        if (times.size() != fields.size()) {
            throw ShapeError("trajectory: " + std::to_string(times.size()) + " times vs " +
                             std::to_string(fields.size()) + " fields");
        }
        if (times.size() < min_snapshots) {
            throw InsufficientDataError("trajectory: need at least " + std::to_string(min_snapshots) +
                                        " snapshots, have " + std::to_string(times.size()));
        }
        for (std::size_t n = 0; n < times.size(); ++n) {
            if (n > 0 && !(times[n] > times[n - 1])) {
                throw ShapeError("trajectory: times must be strictly increasing");
            }
            if (!(fields[n].grid() == grid)) {
                throw ShapeError("trajectory: snapshot " + std::to_string(n) + " is on a different grid");
            }
        }
    }
};

}  // namespace nldiff
