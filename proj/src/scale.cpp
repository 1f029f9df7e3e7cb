#include "timelinekit/scale.hpp"

#include <algorithm>
#include <cmath>

#include "timelinekit/errors.hpp"

namespace timelinekit {

ScaleDomain ScaleDomain::from_times(const std::vector<double>& ts) {
    if (ts.empty()) throw DegenerateInput("scale domain needs at least one time");
    if (!std::is_sorted(ts.begin(), ts.end()))
        throw DegenerateInput("scale domain times must be sorted");
    ScaleDomain d;
    d.t0 = ts.front();
    d.t1 = ts.back();
    d.n = static_cast<int>(ts.size());
    d.times = ts;
    return d;
}

double scale_position(double t, Scale scale, const ScaleDomain& domain, double range_px) {
    const double span = domain.t1 - domain.t0;
    const double eps = 1e-9 * std::max(1.0, std::abs(span));
    auto check_bounds = [&]() {
        if (t < domain.t0 - eps || t > domain.t1 + eps)
            throw DomainError("time outside scale domain");
    };
    switch (scale) {
        case Scale::Chronological:
        case Scale::Relative: {
            check_bounds();
            if (span <= 0.0) return range_px / 2.0;
            return (t - domain.t0) / span * range_px;
        }
        case Scale::Logarithmic: {
            check_bounds();
            double denom = std::log1p(std::max(0.0, span));
            if (denom <= 0.0) return range_px / 2.0;
            return std::log1p(std::max(0.0, t - domain.t0)) / denom * range_px;
        }
        case Scale::Sequential: {
            long long i = std::llround(t);
            if (domain.n <= 0 || i < 0 || i >= domain.n)
                throw DomainError("sequential index outside domain");
            if (domain.n == 1) return range_px / 2.0;
            return static_cast<double>(i) / (domain.n - 1) * range_px;
        }
        case Scale::SequentialInterim: {
            if (domain.times.empty()) throw DomainError("interim scale needs event times");
            check_bounds();
            if (span <= 0.0) return range_px / 2.0;
            // cumulative inter-event durations, walked segment by segment
            double cum = 0.0;
            for (size_t k = 0; k + 1 < domain.times.size(); ++k) {
                double a = domain.times[k], b = domain.times[k + 1];
                if (t <= b + eps) {
                    double inside = std::clamp(t - a, 0.0, b - a);
                    return (cum + inside) / span * range_px;
                }
                cum += b - a;
            }
            return range_px;
        }
    }
    throw DomainError("unknown scale");
}

}  // namespace timelinekit
