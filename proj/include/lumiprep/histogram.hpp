#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "lumiprep/error.hpp"
#include "lumiprep/raster.hpp"

namespace lumiprep {

// Rounds half away from zero to two decimals; the rule used for every
// percentage and report figure in this project.
inline double round2(double v) {
    return std::round(v * 100.0) / 100.0;
}

// Pooled 256-bin DN histogram: all R, G and B samples of an image merged
// into one distribution, so total == 3 * width * height for RGB input.
struct Histogram {
    std::array<std::uint64_t, 256> counts{};
    std::uint64_t total = 0;
};

inline Histogram pooled_histogram(const RgbImage& img) {
    if (img.empty())
        throw Error(Errc::empty_image, "pooled_histogram on empty image");
    Histogram h;
    for (const PixelTriple& p : img.pixels()) {
        ++h.counts[p.r];
        ++h.counts[p.g];
        ++h.counts[p.b];
    }
    h.total = 3ULL * img.pixel_count();
    return h;
}

inline Histogram gray_histogram(const GrayImage& img) {
    if (img.empty())
        throw Error(Errc::empty_image, "gray_histogram on empty image");
    Histogram h;
    for (std::uint8_t v : img.pixels()) ++h.counts[v];
    h.total = img.pixel_count();
    return h;
}

struct TableRow {
    int dn = 0;
    std::uint64_t npix = 0;
    double perc = 0.0;      // 100 * npix / total, 2-decimal rounded
    std::uint64_t cum_npix = 0;
    double cum_perc = 0.0;  // 100 * cum_npix / total, 2-decimal rounded
};

struct HistogramTable {
    std::vector<TableRow> rows;  // one row per DN 0..255
    std::uint64_t total = 0;
};

inline HistogramTable tabulate(const Histogram& h) {
    if (h.total == 0)
        throw Error(Errc::empty_histogram, "tabulate on empty histogram");
    HistogramTable t;
    t.total = h.total;
    t.rows.reserve(256);
    std::uint64_t cum = 0;
    for (int dn = 0; dn < 256; ++dn) {
        cum += h.counts[dn];
        TableRow row;
        row.dn = dn;
        row.npix = h.counts[dn];
        row.perc = round2(100.0 * static_cast<double>(h.counts[dn]) / static_cast<double>(h.total));
        row.cum_npix = cum;
        row.cum_perc = round2(100.0 * static_cast<double>(cum) / static_cast<double>(h.total));
        t.rows.push_back(row);
    }
    return t;
}

// Normalized pooled statistics feeding the weight rules: mean and population
// standard deviation on a [0,1] scale (DN / 255), and Perc, the modal DN's
// relative frequency.
struct ChannelStats {
    double mean = 0.0;
    double std_dev = 0.0;
    double perc = 0.0;
};

namespace detail {

inline double histogram_mean_dn(const Histogram& h) {
    double sum = 0.0;
    for (int dn = 0; dn < 256; ++dn)
        sum += static_cast<double>(dn) * static_cast<double>(h.counts[dn]);
    return sum / static_cast<double>(h.total);
}

inline double histogram_std_dn(const Histogram& h, double mean_dn) {
    double acc = 0.0;
    for (int dn = 0; dn < 256; ++dn) {
        const double d = static_cast<double>(dn) - mean_dn;
        acc += d * d * static_cast<double>(h.counts[dn]);
    }
    return std::sqrt(acc / static_cast<double>(h.total));
}

} // namespace detail

inline ChannelStats stats_of(const Histogram& h) {
    if (h.total == 0)
        throw Error(Errc::empty_histogram, "stats_of on empty histogram");
    const double mean_dn = detail::histogram_mean_dn(h);
    const double std_dn = detail::histogram_std_dn(h, mean_dn);
    std::uint64_t modal = 0;
    for (std::uint64_t c : h.counts) modal = std::max(modal, c);
    ChannelStats s;
    s.mean = mean_dn / 255.0;
    s.std_dev = std_dn / 255.0;
    s.perc = static_cast<double>(modal) / static_cast<double>(h.total);
    return s;
}

// Original-vs-processed summary in the 0-255 domain, matching the report
// layout "label | orig mean | orig std | proc mean | proc std".
struct StatsReport {
    double original_mean = 0.0;
    double original_std = 0.0;
    double processed_mean = 0.0;
    double processed_std = 0.0;
};

inline StatsReport stats_report(const RgbImage& original, const GrayImage& processed) {
    if (original.empty() || processed.empty())
        throw Error(Errc::empty_image, "stats_report requires non-empty images");
    const Histogram ho = pooled_histogram(original);
    const Histogram hp = gray_histogram(processed);
    StatsReport r;
    r.original_mean = detail::histogram_mean_dn(ho);
    r.original_std = detail::histogram_std_dn(ho, r.original_mean);
    r.processed_mean = detail::histogram_mean_dn(hp);
    r.processed_std = detail::histogram_std_dn(hp, r.processed_mean);
    return r;
}

inline std::string format_stats_row(const std::string& label, const StatsReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s | %.2f | %.2f | %.2f | %.2f",
                  label.c_str(), round2(r.original_mean), round2(r.original_std),
                  round2(r.processed_mean), round2(r.processed_std));
    return buf;
}

inline std::string format_table_text(const HistogramTable& t) {
    std::string out = "DN    Npix      Perc    CumNpix    CumPerc\n";
    char buf[96];
    for (const TableRow& r : t.rows) {
        std::snprintf(buf, sizeof(buf), "%-5d %-9llu %-7.2f %-10llu %.2f\n",
                      r.dn, static_cast<unsigned long long>(r.npix), r.perc,
                      static_cast<unsigned long long>(r.cum_npix), r.cum_perc);
        out += buf;
    }
    return out;
}

inline std::string format_table_csv(const HistogramTable& t) {
    std::string out = "DN,Npix,Perc,CumNpix,CumPerc\n";
    char buf[96];
    for (const TableRow& r : t.rows) {
        std::snprintf(buf, sizeof(buf), "%d,%llu,%.2f,%llu,%.2f\n",
                      r.dn, static_cast<unsigned long long>(r.npix), r.perc,
                      static_cast<unsigned long long>(r.cum_npix), r.cum_perc);
        out += buf;
    }
    return out;
}

} // namespace lumiprep
