#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "lumiprep/error.hpp"
#include "lumiprep/raster.hpp"
#include "lumiprep/raster_io.hpp"
#include "lumiprep/weights.hpp"

namespace lumiprep {

// Project-wide quantization: round half away from zero, then clamp to [0,255].
// Every conversion path must go through this exact function so that the
// optimized and reference pipelines stay bit-identical.
inline std::uint8_t quantize_u8(double v) {
    const double r = std::round(v);
    if (r <= 0.0) return 0;
    if (r >= 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

enum class ConversionMode {
    default_verbatim,    // 0.3/0.1/0.5 exactly as published (sums to 0.9)
    normalized_default,  // the same coefficients rescaled to unit sum
    weighted,            // a WeightTriple from the filter rules
};

struct ConversionSpec {
    ConversionMode mode = ConversionMode::default_verbatim;
    WeightTriple weights{};

    static constexpr const char* kRoundingPolicy = "half-away-from-zero";

    static ConversionSpec verbatim_default() { return {}; }

    static ConversionSpec normalized_default() {
        return {ConversionMode::normalized_default, normalized_default_triple()};
    }

    static ConversionSpec weighted(const WeightTriple& w) {
        return {ConversionMode::weighted, w};
    }

    void coefficients(double& w_r, double& w_g, double& w_b) const {
        switch (mode) {
            case ConversionMode::default_verbatim: {
                const DefaultTriple d = default_triple();
                w_r = d.w_r; w_g = d.w_g; w_b = d.w_b;
                return;
            }
            case ConversionMode::normalized_default:
            case ConversionMode::weighted:
                w_r = weights.w_r; w_g = weights.w_g; w_b = weights.w_b;
                return;
        }
        w_r = w_g = w_b = 0.0;
    }

    // Per-channel term of the weighted sum for DN value v. The fixed-mode
    // coefficients are tenths (3/10, 1/10, 5/10) and ninths; evaluating them
    // as integer ratios keeps products like 0.3*255 at exactly 76.5, where
    // the literal double 0.3 would land a hair below the rounding boundary.
    double term_r(int v) const {
        switch (mode) {
            case ConversionMode::default_verbatim:   return (3.0 * v) / 10.0;
            case ConversionMode::normalized_default: return (3.0 * v) / 9.0;
            case ConversionMode::weighted:           return weights.w_r * v;
        }
        return 0.0;
    }

    double term_g(int v) const {
        switch (mode) {
            case ConversionMode::default_verbatim:   return (1.0 * v) / 10.0;
            case ConversionMode::normalized_default: return (1.0 * v) / 9.0;
            case ConversionMode::weighted:           return weights.w_g * v;
        }
        return 0.0;
    }

    double term_b(int v) const {
        switch (mode) {
            case ConversionMode::default_verbatim:   return (5.0 * v) / 10.0;
            case ConversionMode::normalized_default: return (5.0 * v) / 9.0;
            case ConversionMode::weighted:           return weights.w_b * v;
        }
        return 0.0;
    }

    const char* mode_name() const {
        switch (mode) {
            case ConversionMode::default_verbatim:   return "default";
            case ConversionMode::normalized_default: return "normalized-default";
            case ConversionMode::weighted:           return "weighted";
        }
        return "?";
    }
};

// Optimized conversion: one 256-entry term table per channel replaces the
// per-pixel arithmetic. Table entries are exactly the per-channel terms the
// reference path computes, and the additions keep its left-to-right order,
// so output bytes match convert_reference() exactly.
inline GrayImage convert(const RgbImage& img, const ConversionSpec& spec) {
    if (img.empty())
        throw Error(Errc::empty_image, "convert on empty image");

    double lut_r[256], lut_g[256], lut_b[256];
    for (int v = 0; v < 256; ++v) {
        lut_r[v] = spec.term_r(v);
        lut_g[v] = spec.term_g(v);
        lut_b[v] = spec.term_b(v);
    }

    GrayImage out(img.width(), img.height());
    const PixelTriple* src = img.pixels().data();
    std::uint8_t* dst = out.pixels().data();
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i)
        dst[i] = quantize_u8(lut_r[src[i].r] + lut_g[src[i].g] + lut_b[src[i].b]);
    return out;
}

// Correctness oracle: the most direct per-pixel loop, no tables, no fusing.
// Contractually byte-identical to convert() on every input.
inline GrayImage convert_reference(const RgbImage& img, const ConversionSpec& spec) {
    if (img.empty())
        throw Error(Errc::empty_image, "convert_reference on empty image");
    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const PixelTriple p = img.at(x, y);
            const double v = spec.term_r(p.r) + spec.term_g(p.g) + spec.term_b(p.b);
            out.at(x, y) = quantize_u8(v);
        }
    }
    return out;
}

// Worker cap: explicit request, clipped by the LUMIPREP_THREADS environment
// variable when set, defaulting to hardware concurrency.
inline int effective_workers(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("LUMIPREP_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1 && cap < n) n = cap;
    }
    return n;
}

struct BatchFileResult {
    std::string source_path;
    std::string output_path;  // empty on failure
    bool ok = false;
    std::string error;        // empty on success
};

struct BatchOptions {
    int workers = 0;             // 0 = hardware concurrency (capped by env)
    std::string extension = ".pgm";
};

// Converts every input, writing <out_dir>/<stem><ext>. Per-file failures are
// recorded, never fatal; the result vector is indexed by input order so the
// outcome is independent of worker scheduling.
inline std::vector<BatchFileResult> convert_batch(
    const std::vector<std::string>& paths,
    const std::function<ConversionSpec(const RgbImage&, const std::string&)>& spec_provider,
    const std::string& out_dir,
    const BatchOptions& options = {}) {
    namespace fs = std::filesystem;
    std::vector<BatchFileResult> results(paths.size());
    if (paths.empty()) return results;

    fs::create_directories(out_dir);
    const int workers = std::min<int>(effective_workers(options.workers),
                                      static_cast<int>(paths.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= paths.size()) return;
            BatchFileResult& r = results[i];
            r.source_path = paths[i];
            try {
                const RgbImage img = load_rgb(paths[i]);
                const ConversionSpec spec = spec_provider(img, paths[i]);
                const GrayImage gray = convert(img, spec);
                const fs::path out = fs::path(out_dir) /
                                     (fs::path(paths[i]).stem().string() + options.extension);
                save_gray(gray, out.string());
                r.output_path = out.string();
                r.ok = true;
            } catch (const std::exception& e) {
                r.ok = false;
                r.error = e.what();
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return results;
}

} // namespace lumiprep
