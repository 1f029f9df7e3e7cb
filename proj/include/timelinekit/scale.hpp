#pragma once

#include <vector>

#include "timelinekit/types.hpp"

namespace timelinekit {

// Domain a scale maps from. Chronological/Relative/Logarithmic use [t0, t1];
// Sequential uses n (the input is an index); SequentialInterim walks `times`.
struct ScaleDomain {
    double t0 = 0.0;
    double t1 = 1.0;
    int n = 0;
    std::vector<double> times;  // sorted event times

    // Build from sorted event times. Throws DegenerateInput when empty or
    // unsorted.
    static ScaleDomain from_times(const std::vector<double>& ts);
};

// Map a time (or an index, for Sequential) to a pixel offset in [0, range_px].
//  - Chronological / Relative: affine in t.
//  - Logarithmic: log1p-compressed offsets from t0.
//  - Sequential: index i -> i/(n-1) * range (the value is the index).
//  - SequentialInterim: piecewise-linear in cumulative inter-event durations.
// Degenerate domains (single point / single element) map to range/2.
// Throws DomainError when t falls outside the domain.
double scale_position(double t, Scale scale, const ScaleDomain& domain, double range_px);

}  // namespace timelinekit
