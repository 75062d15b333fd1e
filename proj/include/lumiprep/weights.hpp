#pragma once

#include <algorithm>
#include <cmath>

#include "lumiprep/error.hpp"
#include "lumiprep/histogram.hpp"

namespace lumiprep {

// Coefficients of the default RGB-to-gray conversion. They sum to 0.9 and are
// used verbatim; DefaultTriple is a distinct type so the unit-sum invariant of
// WeightTriple never applies to it and it can never reach normalize_clamp.
struct DefaultTriple {
    double w_r = 0.3;
    double w_g = 0.1;
    double w_b = 0.5;
};

constexpr DefaultTriple default_triple() { return {}; }

// Rule output before the clamp/renormalize policy. The remainder construction
// (w_r = 1 - w_b - w_g) guarantees unit sum even when components leave [0,1].
struct RawWeightTriple {
    double w_r = 0.0;
    double w_g = 0.0;
    double w_b = 0.0;

    double sum() const { return w_r + w_g + w_b; }
};

// Red-filter rule, applied to high-sun acquisitions where scattered blue
// dominates: w_b = Perc * mean, w_g = (1 - w_b) - (mean + std), remainder to red.
inline RawWeightTriple red_filter_weights(const ChannelStats& s) {
    RawWeightTriple w;
    w.w_b = s.perc * s.mean;
    w.w_g = (1.0 - w.w_b) - (s.mean + s.std_dev);
    w.w_r = 1.0 - (w.w_b + w.w_g);
    return w;
}

// Blue-filter rule for sunrise/sunset acquisitions with a reddish tint:
// w_b = Perc * mean * (2 * std), w_g = (1 - w_b) - mean, remainder to red.
// "avg" in the source formulation is taken to be the same normalized mean.
inline RawWeightTriple blue_filter_weights(const ChannelStats& s) {
    RawWeightTriple w;
    w.w_b = s.perc * s.mean * (2.0 * s.std_dev);
    w.w_g = (1.0 - w.w_b) - s.mean;
    w.w_r = 1.0 - (w.w_b + w.w_g);
    return w;
}

// Unit-sum weights with every component in [0,1]. `clamped` records whether
// normalize_clamp had to repair an out-of-range raw triple.
struct WeightTriple {
    double w_r = 0.0;
    double w_g = 0.0;
    double w_b = 0.0;
    bool clamped = false;

    double sum() const { return w_r + w_g + w_b; }
};

// The verbatim default coefficients rescaled to unit sum (divide by 0.9);
// exposed as its own conversion variant, never as a replacement for the
// default triple.
inline WeightTriple normalized_default_triple() {
    return {0.3 / 0.9, 0.1 / 0.9, 0.5 / 0.9, false};
}

// Clamps each component to [0,1]; if anything changed, rescales the clamped
// triple back to unit sum and sets the flag. Identity on triples already in
// the box. Throws DegenerateWeights when nothing positive survives the clamp,
// in which case callers fall back to the default conversion.
inline WeightTriple normalize_clamp(const RawWeightTriple& raw) {
    const double cr = std::clamp(raw.w_r, 0.0, 1.0);
    const double cg = std::clamp(raw.w_g, 0.0, 1.0);
    const double cb = std::clamp(raw.w_b, 0.0, 1.0);
    if (cr == raw.w_r && cg == raw.w_g && cb == raw.w_b)
        return {raw.w_r, raw.w_g, raw.w_b, false};
    const double sum = cr + cg + cb;
    if (sum == 0.0)
        throw Error(Errc::degenerate_weights, "all weights clamped to zero");
    return {cr / sum, cg / sum, cb / sum, true};
}

// Componentwise (1-t)*a + t*b; unit sum is preserved by linearity. Covers the
// sun-elevation band where neither pure filter is prescribed.
inline WeightTriple blend(const WeightTriple& a, const WeightTriple& b, double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw Error(Errc::out_of_range_t, "blend parameter must be in [0,1]");
    WeightTriple w;
    w.w_r = (1.0 - t) * a.w_r + t * b.w_r;
    w.w_g = (1.0 - t) * a.w_g + t * b.w_g;
    w.w_b = (1.0 - t) * a.w_b + t * b.w_b;
    w.clamped = a.clamped || b.clamped;
    return w;
}

} // namespace lumiprep
