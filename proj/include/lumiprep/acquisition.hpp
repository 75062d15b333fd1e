#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "lumiprep/convert.hpp"
#include "lumiprep/error.hpp"
#include "lumiprep/histogram.hpp"
#include "lumiprep/solar.hpp"
#include "lumiprep/weights.hpp"

namespace lumiprep {

// Either an explicit sun elevation or a (timestamp, lat, lon) triple from
// which one can be computed. When both are present the explicit elevation
// wins; recorded satellite metadata beats recomputation.
struct AcquisitionMeta {
    std::optional<double> sun_elevation_deg;
    std::optional<UtcTime> timestamp_utc;
    std::optional<double> latitude_deg;
    std::optional<double> longitude_deg;

    // Sidecar schema: {"sun_elevation_deg": E} or
    // {"timestamp_utc": "...", "lat": L, "lon": O}.
    static AcquisitionMeta from_json(const nlohmann::json& j) {
        AcquisitionMeta meta;
        if (j.contains("sun_elevation_deg"))
            meta.sun_elevation_deg = j.at("sun_elevation_deg").get<double>();
        if (j.contains("timestamp_utc"))
            meta.timestamp_utc = parse_iso8601_utc(j.at("timestamp_utc").get<std::string>());
        if (j.contains("lat")) meta.latitude_deg = j.at("lat").get<double>();
        if (j.contains("lon")) meta.longitude_deg = j.at("lon").get<double>();
        return meta;
    }
};

struct FilterMode {
    enum class Tag { night, blue, red, blend };

    Tag tag = Tag::night;
    double blend_t = 0.0;  // strictly inside (0,1), blend only

    static FilterMode night() { return {Tag::night, 0.0}; }
    static FilterMode blue() { return {Tag::blue, 0.0}; }
    static FilterMode red() { return {Tag::red, 0.0}; }
    static FilterMode blend(double t) {
        if (!(t > 0.0 && t < 1.0))
            throw Error(Errc::out_of_range_t, "blend mode requires t strictly inside (0,1)");
        return {Tag::blend, t};
    }

    const char* name() const {
        switch (tag) {
            case Tag::night: return "night";
            case Tag::blue:  return "blue";
            case Tag::red:   return "red";
            case Tag::blend: return "blend";
        }
        return "?";
    }

    bool operator==(const FilterMode&) const = default;
};

// Elevation thresholds: below the horizon is night (default conversion);
// low sun (<= 10 deg) takes the blue filter, high sun (>= 30 deg) the red
// one. The band in between gets a linear blend instead of a hard jump.
inline FilterMode select_mode_for_elevation(double elevation_deg) {
    if (elevation_deg < 0.0) return FilterMode::night();
    if (elevation_deg <= 10.0) return FilterMode::blue();
    if (elevation_deg >= 30.0) return FilterMode::red();
    return FilterMode::blend((elevation_deg - 10.0) / 20.0);
}

inline double resolve_elevation(const AcquisitionMeta& meta) {
    if (meta.sun_elevation_deg) {
        const double e = *meta.sun_elevation_deg;
        if (e < -90.0 || e > 90.0)
            throw Error(Errc::invalid_argument,
                        "sun elevation out of [-90,90]: " + std::to_string(e));
        return e;
    }
    if (meta.timestamp_utc && meta.latitude_deg && meta.longitude_deg)
        return sun_elevation_deg(*meta.timestamp_utc, *meta.latitude_deg, *meta.longitude_deg);
    throw Error(Errc::insufficient_metadata,
                "need sun_elevation_deg or timestamp_utc + lat + lon");
}

inline FilterMode select_mode(const AcquisitionMeta& meta) {
    return select_mode_for_elevation(resolve_elevation(meta));
}

// The full outcome of the weight decision, as recorded per image in batch
// manifests: the conversion to run, the mode that chose it, and whether a
// degenerate weight rule forced a fallback to the default conversion.
struct WeightsDecision {
    ConversionSpec spec;
    FilterMode mode;
    bool degenerate_fallback = false;
};

inline WeightsDecision decide_weights(FilterMode mode, const ChannelStats& stats) {
    WeightsDecision d;
    d.mode = mode;
    try {
        switch (mode.tag) {
            case FilterMode::Tag::night:
                d.spec = ConversionSpec::verbatim_default();
                break;
            case FilterMode::Tag::blue:
                d.spec = ConversionSpec::weighted(normalize_clamp(blue_filter_weights(stats)));
                break;
            case FilterMode::Tag::red:
                d.spec = ConversionSpec::weighted(normalize_clamp(red_filter_weights(stats)));
                break;
            case FilterMode::Tag::blend: {
                const WeightTriple blue_w = normalize_clamp(blue_filter_weights(stats));
                const WeightTriple red_w = normalize_clamp(red_filter_weights(stats));
                d.spec = ConversionSpec::weighted(blend(blue_w, red_w, mode.blend_t));
                break;
            }
        }
    } catch (const Error& e) {
        if (e.code() != Errc::degenerate_weights) throw;
        d.spec = ConversionSpec::verbatim_default();
        d.degenerate_fallback = true;
    }
    return d;
}

inline ConversionSpec weights_for(const AcquisitionMeta& meta, const ChannelStats& stats) {
    return decide_weights(select_mode(meta), stats).spec;
}

} // namespace lumiprep
