#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "lumiprep/acquisition.hpp"
#include "lumiprep/convert.hpp"
#include "lumiprep/dataset.hpp"
#include "lumiprep/error.hpp"
#include "lumiprep/raster.hpp"
#include "lumiprep/rng.hpp"

namespace lumiprep {

// First-order multiplicative channel model of wavelength-dependent
// scattering: a daytime sky boosts blue (f_b > 1), a low sun boosts red.
// This exists to exercise the filters, not to simulate the atmosphere.
struct TintSpec {
    double f_r = 1.0;
    double f_g = 1.0;
    double f_b = 1.0;
};

inline RgbImage apply_tint(const RgbImage& img, const TintSpec& t) {
    if (img.empty())
        throw Error(Errc::empty_image, "apply_tint on empty image");
    if (!(std::isfinite(t.f_r) && std::isfinite(t.f_g) && std::isfinite(t.f_b)) ||
        t.f_r < 0.0 || t.f_g < 0.0 || t.f_b < 0.0)
        throw Error(Errc::invalid_argument, "tint gains must be finite and non-negative");
    RgbImage out = img;
    for (PixelTriple& p : out.pixels()) {
        p.r = quantize_u8(t.f_r * static_cast<double>(p.r));
        p.g = quantize_u8(t.f_g * static_cast<double>(p.g));
        p.b = quantize_u8(t.f_b * static_cast<double>(p.b));
    }
    return out;
}

struct ScenePalette {
    int ground_min = 84;
    int ground_max = 116;
    int target_min = 150;
    int target_max = 210;
};

struct SceneSpec {
    int width = 96;
    int height = 96;
    std::uint64_t seed = 0;
    int target_count = 3;
    ScenePalette palette;
};

struct Scene {
    RgbImage image;
    std::vector<AnnotationRecord> annotations;
};

// Neutral-gray terrain with non-overlapping rectangular targets, fully
// determined by the seed. Boxes are emitted in YOLO normalized form.
inline Scene gen_scene(const SceneSpec& spec) {
    if (spec.width < 16 || spec.height < 16)
        throw Error(Errc::invalid_argument, "scene dimensions must be >= 16");
    if (spec.target_count < 0)
        throw Error(Errc::invalid_argument, "target_count must be >= 0");

    Lcg64 rng(spec.seed);
    Scene scene;
    scene.image = RgbImage(spec.width, spec.height);
    for (PixelTriple& p : scene.image.pixels()) {
        const std::uint8_t v = static_cast<std::uint8_t>(
            rng.next_in(spec.palette.ground_min, spec.palette.ground_max));
        p = {v, v, v};
    }

    struct Rect { int x0, y0, w, h; };
    std::vector<Rect> placed;
    auto overlaps = [&](const Rect& r) {
        for (const Rect& q : placed) {
            // 1px separation keeps adjacent boxes distinguishable
            if (r.x0 < q.x0 + q.w + 1 && q.x0 < r.x0 + r.w + 1 &&
                r.y0 < q.y0 + q.h + 1 && q.y0 < r.y0 + r.h + 1)
                return true;
        }
        return false;
    };

    const int min_side_w = std::max(4, spec.width / 16);
    const int max_side_w = std::max(min_side_w + 1, spec.width / 6);
    const int min_side_h = std::max(4, spec.height / 16);
    const int max_side_h = std::max(min_side_h + 1, spec.height / 6);

    for (int i = 0; i < spec.target_count; ++i) {
        bool done = false;
        for (int attempt = 0; attempt < 200 && !done; ++attempt) {
            Rect r;
            r.w = rng.next_in(min_side_w, max_side_w);
            r.h = rng.next_in(min_side_h, max_side_h);
            r.x0 = rng.next_in(0, spec.width - r.w);
            r.y0 = rng.next_in(0, spec.height - r.h);
            if (overlaps(r)) continue;

            const std::uint8_t g = static_cast<std::uint8_t>(
                rng.next_in(spec.palette.target_min, spec.palette.target_max));
            for (int y = r.y0; y < r.y0 + r.h; ++y)
                for (int x = r.x0; x < r.x0 + r.w; ++x)
                    scene.image.at(x, y) = {g, g, g};

            AnnotationRecord a;
            a.class_id = 0;
            a.cx = (r.x0 + r.w / 2.0) / spec.width;
            a.cy = (r.y0 + r.h / 2.0) / spec.height;
            a.w = static_cast<double>(r.w) / spec.width;
            a.h = static_cast<double>(r.h) / spec.height;
            scene.annotations.push_back(a);
            placed.push_back(r);
            done = true;
        }
        if (!done)
            throw Error(Errc::targets_dont_fit,
                        "could not place " + std::to_string(spec.target_count) +
                            " non-overlapping targets");
    }
    return scene;
}

inline double gray_mean(const GrayImage& img) {
    if (img.empty())
        throw Error(Errc::empty_image, "gray_mean on empty image");
    std::uint64_t sum = 0;
    for (std::uint8_t v : img.pixels()) sum += v;
    return static_cast<double>(sum) / static_cast<double>(img.pixel_count());
}

// Measures how well a filter recovers the untinted default-conversion
// brightness: candidate runs the mode's weight rule on the tinted image,
// naive runs the default conversion on it, and both are compared to the
// untinted baseline mean.
struct CompensationRow {
    std::uint64_t scene_seed = 0;
    TintSpec tint;
    FilterMode mode;
    WeightTriple weights;
    double delta_candidate = 0.0;
    double delta_naive = 0.0;
};

inline CompensationRow compensation_report(const RgbImage& base, const TintSpec& tint,
                                           FilterMode mode) {
    if (mode.tag != FilterMode::Tag::red && mode.tag != FilterMode::Tag::blue)
        throw Error(Errc::invalid_argument, "compensation_report requires red or blue mode");
    const GrayImage baseline = convert(base, ConversionSpec::verbatim_default());
    const RgbImage tinted = apply_tint(base, tint);
    const ChannelStats stats = stats_of(pooled_histogram(tinted));
    const WeightsDecision decision = decide_weights(mode, stats);
    const GrayImage candidate = convert(tinted, decision.spec);
    const GrayImage naive = convert(tinted, ConversionSpec::verbatim_default());

    CompensationRow row;
    row.tint = tint;
    row.mode = mode;
    row.weights = decision.spec.mode == ConversionMode::weighted ? decision.spec.weights
                                                                 : WeightTriple{};
    row.delta_candidate = std::fabs(gray_mean(candidate) - gray_mean(baseline));
    row.delta_naive = std::fabs(gray_mean(naive) - gray_mean(baseline));
    return row;
}

// The fixed regression corpus: scenes seeded base_seed+i under one tint and
// mode. Output is locked as a CSV fixture; any change to the pixel pipeline,
// the statistics, or the weight rules shows up as a diff against it.
struct CompensationCorpusSpec {
    int scene_count = 200;
    std::uint64_t base_seed = 1000;
    SceneSpec scene;                 // seed field is overwritten per scene
    TintSpec tint{0.9, 1.0, 1.25};   // daytime: blue up, red down
    FilterMode mode = FilterMode::red();
};

inline std::vector<CompensationRow> run_compensation_corpus(const CompensationCorpusSpec& spec) {
    std::vector<CompensationRow> rows;
    rows.reserve(static_cast<std::size_t>(spec.scene_count));
    for (int i = 0; i < spec.scene_count; ++i) {
        SceneSpec s = spec.scene;
        s.seed = spec.base_seed + static_cast<std::uint64_t>(i);
        const Scene scene = gen_scene(s);
        CompensationRow row = compensation_report(scene.image, spec.tint, spec.mode);
        row.scene_seed = s.seed;
        rows.push_back(row);
    }
    return rows;
}

inline std::string compensation_csv(const std::vector<CompensationRow>& rows) {
    std::string out = "scene_seed,tint,mode,w_r,w_g,w_b,clamped,delta_candidate,delta_naive\n";
    char buf[256];
    for (const CompensationRow& r : rows) {
        std::snprintf(buf, sizeof(buf),
                      "%llu,%.6g:%.6g:%.6g,%s,%.10f,%.10f,%.10f,%s,%.10f,%.10f\n",
                      static_cast<unsigned long long>(r.scene_seed),
                      r.tint.f_r, r.tint.f_g, r.tint.f_b, r.mode.name(),
                      r.weights.w_r, r.weights.w_g, r.weights.w_b,
                      r.weights.clamped ? "true" : "false",
                      r.delta_candidate, r.delta_naive);
        out += buf;
    }
    return out;
}

} // namespace lumiprep
