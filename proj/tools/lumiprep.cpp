// lumiprep: weighted-luminance preprocessing for aerial detection datasets.
//
// Subcommands cover the whole pipeline: per-image statistics and histogram
// tables, single and batch conversion driven by acquisition metadata,
// train/test splitting, darknet cfg rewriting for single-channel training,
// and synthetic tinted scenes for regression checks. Diagnostics go to
// stderr, data to stdout, files to -o.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lumiprep/lumiprep.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct MetaFlags {
    double elevation = std::numeric_limits<double>::quiet_NaN();
    std::string timestamp;
    double lat = std::numeric_limits<double>::quiet_NaN();
    double lon = std::numeric_limits<double>::quiet_NaN();

    void add_to(CLI::App* cmd) {
        cmd->add_option("--elevation", elevation, "Sun elevation in degrees");
        cmd->add_option("--timestamp", timestamp, "Acquisition instant, ISO-8601 UTC");
        cmd->add_option("--lat", lat, "Latitude in degrees");
        cmd->add_option("--lon", lon, "Longitude in degrees");
    }

    bool any() const {
        return !std::isnan(elevation) || !timestamp.empty() || !std::isnan(lat) ||
               !std::isnan(lon);
    }

    lumiprep::AcquisitionMeta to_meta() const {
        lumiprep::AcquisitionMeta meta;
        if (!std::isnan(elevation)) meta.sun_elevation_deg = elevation;
        if (!timestamp.empty()) meta.timestamp_utc = lumiprep::parse_iso8601_utc(timestamp);
        if (!std::isnan(lat)) meta.latitude_deg = lat;
        if (!std::isnan(lon)) meta.longitude_deg = lon;
        return meta;
    }
};

ordered_json json_stats(const lumiprep::ChannelStats& s) {
    return {{"mean", s.mean}, {"std_dev", s.std_dev}, {"perc", s.perc}};
}

ordered_json json_weights(const lumiprep::WeightTriple& w) {
    return {{"w_r", w.w_r}, {"w_g", w.w_g}, {"w_b", w.w_b}, {"clamped", w.clamped}};
}

int run_stats(const std::string& image_path, const std::string& processed_path, bool as_json) {
    using namespace lumiprep;
    const RgbImage img = load_rgb(image_path);
    const Histogram hist = pooled_histogram(img);
    const ChannelStats stats = stats_of(hist);
    const double dn_mean = stats.mean * 255.0;
    const double dn_std = stats.std_dev * 255.0;

    std::optional<StatsReport> report;
    if (!processed_path.empty())
        report = stats_report(img, load_gray(processed_path));

    if (as_json) {
        ordered_json j = json_stats(stats);
        j["original_mean"] = round2(dn_mean);
        j["original_std"] = round2(dn_std);
        if (report) {
            j["processed_mean"] = round2(report->processed_mean);
            j["processed_std"] = round2(report->processed_std);
        }
        std::cout << j.dump() << "\n";
        return kExitOk;
    }

    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "mean %.6f\nstd_dev %.6f\nperc %.6f\ndn_mean %.2f\ndn_std %.2f\n",
                  stats.mean, stats.std_dev, stats.perc, round2(dn_mean), round2(dn_std));
    std::cout << buf;
    if (report)
        std::cout << format_stats_row(fs::path(image_path).stem().string(), *report) << "\n";
    return kExitOk;
}

int run_table(const std::string& image_path, bool as_csv) {
    using namespace lumiprep;
    const HistogramTable table = tabulate(pooled_histogram(load_rgb(image_path)));
    std::cout << (as_csv ? format_table_csv(table) : format_table_text(table));
    return kExitOk;
}

int run_convert(const std::string& image_path, const std::string& mode_name,
                const MetaFlags& meta_flags, const std::string& out_path, bool as_json) {
    using namespace lumiprep;
    const RgbImage img = load_rgb(image_path);
    const ChannelStats stats = stats_of(pooled_histogram(img));

    FilterMode mode;
    if (mode_name == "auto") {
        if (!meta_flags.any()) {
            std::cerr << "convert --mode auto needs --elevation or --timestamp/--lat/--lon\n";
            return kExitUsage;
        }
        mode = select_mode(meta_flags.to_meta());
    } else if (mode_name == "red") {
        mode = FilterMode::red();
    } else if (mode_name == "blue") {
        mode = FilterMode::blue();
    } else if (mode_name == "default") {
        mode = FilterMode::night();
    } else {
        std::cerr << "unknown mode '" << mode_name << "'\n";
        return kExitUsage;
    }

    const WeightsDecision decision = decide_weights(mode, stats);
    save_gray(convert(img, decision.spec), out_path);

    if (as_json) {
        ordered_json j;
        j["mode"] = decision.mode.name();
        if (decision.mode.tag == FilterMode::Tag::blend) j["blend_t"] = decision.mode.blend_t;
        if (decision.spec.mode == ConversionMode::weighted)
            j["weights"] = json_weights(decision.spec.weights);
        else
            j["weights"] = "default";
        j["stats"] = json_stats(stats);
        j["degenerate_fallback"] = decision.degenerate_fallback;
        j["output"] = out_path;
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "mode " << decision.mode.name();
        if (decision.mode.tag == FilterMode::Tag::blend)
            std::cout << " t=" << decision.mode.blend_t;
        std::cout << "\n";
        if (decision.spec.mode == ConversionMode::weighted) {
            char buf[160];
            const WeightTriple& w = decision.spec.weights;
            std::snprintf(buf, sizeof(buf), "w_r %.6f\nw_g %.6f\nw_b %.6f\nclamped %s\n",
                          w.w_r, w.w_g, w.w_b, w.clamped ? "true" : "false");
            std::cout << buf;
        } else {
            std::cout << "weights default\n";
        }
    }
    return kExitOk;
}

int run_batch(const std::string& dir, const std::string& out_dir, const MetaFlags& meta_flags,
              const std::string& format, int workers, bool strict) {
    using namespace lumiprep;
    ProcessOptions options;
    options.workers = workers;
    options.extension = format == "png" ? ".png" : ".pgm";
    if (meta_flags.any()) options.global_meta = meta_flags.to_meta();

    const auto records = process_dataset(dir, out_dir, options);
    fs::create_directories(out_dir);
    write_manifest(records, (fs::path(out_dir) / "manifest.jsonl").string());

    std::size_t failures = 0;
    for (const auto& r : records) {
        if (!r.ok()) {
            ++failures;
            std::cerr << "error: " << r.source_path << ": " << r.error << "\n";
        }
    }
    std::cerr << records.size() - failures << "/" << records.size() << " images converted, "
              << failures << " failed\n";
    return (strict && failures > 0) ? kExitRuntime : kExitOk;
}

int run_split(const std::string& manifest_path, double fraction, std::uint64_t seed,
              bool stratify, std::string out_dir) {
    using namespace lumiprep;
    auto records = read_manifest(manifest_path);
    split_dataset(records, SplitSpec{fraction, seed, stratify});
    write_manifest(records, manifest_path);
    if (out_dir.empty()) out_dir = fs::path(manifest_path).parent_path().string();
    if (out_dir.empty()) out_dir = ".";
    emit_filelists(records, out_dir);

    std::size_t train = 0, test = 0;
    for (const auto& r : records)
        if (r.ok()) (*r.split == "train" ? train : test) += 1;
    std::cerr << train << " train / " << test << " test\n";
    return kExitOk;
}

int run_cfg(const std::string& cfg_path, int channels, bool preset, const std::string& out_path) {
    using namespace lumiprep;
    CfgDocument doc = cfg_load(cfg_path);
    bool changed = false;
    std::vector<std::string> warnings;

    if (channels > 0) {
        CfgEditResult r = set_channels(doc, channels);
        doc = std::move(r.doc);
        changed = changed || r.changed;
        warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
    }
    if (preset) {
        CfgEditResult r = set_training_params(doc, TrainingParams::published_preset());
        doc = std::move(r.doc);
        changed = changed || r.changed;
        warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
    }

    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
    if (!changed) std::cerr << "no-op: requested values already present\n";

    if (out_path.empty())
        std::cout << cfg_serialize(doc);
    else
        cfg_save(doc, out_path);
    return kExitOk;
}

int run_synth(std::uint64_t seed, int count, const std::string& tint_arg,
              const std::string& out_dir, std::string mode_name, int width, int height,
              int targets, const std::string& format) {
    using namespace lumiprep;

    TintSpec tint;
    if (std::sscanf(tint_arg.c_str(), "%lf,%lf,%lf", &tint.f_r, &tint.f_g, &tint.f_b) != 3) {
        std::cerr << "--tint expects FR,FG,FB\n";
        return kExitUsage;
    }

    FilterMode mode;
    if (mode_name.empty()) mode_name = tint.f_b >= tint.f_r ? "red" : "blue";
    if (mode_name == "red") {
        mode = FilterMode::red();
    } else if (mode_name == "blue") {
        mode = FilterMode::blue();
    } else {
        std::cerr << "--mode must be red or blue\n";
        return kExitUsage;
    }

    CompensationCorpusSpec corpus;
    corpus.scene_count = count;
    corpus.base_seed = seed;
    corpus.scene.width = width;
    corpus.scene.height = height;
    corpus.scene.target_count = targets;
    corpus.tint = tint;
    corpus.mode = mode;

    fs::create_directories(out_dir);
    const std::string ext = format == "ppm" ? ".ppm" : ".png";
    for (int i = 0; i < count; ++i) {
        SceneSpec s = corpus.scene;
        s.seed = seed + static_cast<std::uint64_t>(i);
        const Scene scene = gen_scene(s);
        const std::string stem = "scene_" + std::to_string(s.seed);
        save_rgb(scene.image, (fs::path(out_dir) / (stem + ext)).string());
        lumiprep::detail::write_file_bytes((fs::path(out_dir) / (stem + ".txt")).string(),
                                           format_annotations(scene.annotations));
    }

    const auto rows = run_compensation_corpus(corpus);
    lumiprep::detail::write_file_bytes(
        (fs::path(out_dir) / "compensation_report.csv").string(), compensation_csv(rows));
    std::cerr << count << " scenes + compensation report written to " << out_dir << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted-luminance preprocessing for aerial detection datasets"};
    app.require_subcommand(1);

    // stats
    std::string stats_image, stats_processed;
    bool stats_json = false;
    CLI::App* stats_cmd = app.add_subcommand("stats", "Pooled statistics for an RGB image");
    stats_cmd->add_option("image", stats_image, "Input image (PNG or PPM)")->required();
    stats_cmd->add_option("--processed", stats_processed,
                          "Converted gray image for the original/processed report row");
    stats_cmd->add_flag("--json", stats_json, "Emit JSON instead of text");

    // table
    std::string table_image;
    bool table_csv = false;
    CLI::App* table_cmd = app.add_subcommand("table", "Histogram table for an RGB image");
    table_cmd->add_option("image", table_image, "Input image (PNG or PPM)")->required();
    table_cmd->add_flag("--csv", table_csv, "Emit CSV instead of aligned text");

    // convert
    std::string conv_image, conv_mode = "auto", conv_out;
    MetaFlags conv_meta;
    bool conv_json = false;
    CLI::App* conv_cmd = app.add_subcommand("convert", "Convert one image to weighted grayscale");
    conv_cmd->add_option("image", conv_image, "Input image (PNG or PPM)")->required();
    conv_cmd->add_option("--mode", conv_mode, "auto|red|blue|default");
    conv_meta.add_to(conv_cmd);
    conv_cmd->add_option("-o,--output", conv_out, "Output image (.pgm or .png)")->required();
    conv_cmd->add_flag("--json", conv_json, "Emit the weight report as JSON");

    // batch
    std::string batch_dir, batch_out, batch_format = "pgm";
    MetaFlags batch_meta;
    int batch_workers = 0;
    bool batch_strict = false;
    CLI::App* batch_cmd = app.add_subcommand("batch", "Convert a directory into a dataset");
    batch_cmd->add_option("dir", batch_dir, "Directory of images (+ optional sidecars)")
        ->required();
    batch_cmd->add_option("-o,--output", batch_out, "Output directory")->required();
    batch_meta.add_to(batch_cmd);
    batch_cmd->add_option("--format", batch_format, "Output format: pgm|png")
        ->check(CLI::IsMember({"pgm", "png"}));
    batch_cmd->add_option("--workers", batch_workers,
                          "Worker threads (0 = auto, capped by LUMIPREP_THREADS)");
    batch_cmd->add_flag("--strict", batch_strict, "Exit nonzero when any file fails");

    // split
    std::string split_manifest, split_out;
    double split_fraction = 0.8;
    std::uint64_t split_seed = 0;
    bool split_stratify = false;
    CLI::App* split_cmd = app.add_subcommand("split", "Label a manifest train/test");
    split_cmd->add_option("--manifest", split_manifest, "manifest.jsonl from batch")->required();
    split_cmd->add_option("--fraction", split_fraction, "Train fraction in (0,1)");
    split_cmd->add_option("--seed", split_seed, "Shuffle seed");
    split_cmd->add_flag("--stratify", split_stratify, "Split per class");
    split_cmd->add_option("-o,--output", split_out,
                          "Directory for train.txt/test.txt (default: manifest's)");

    // cfg
    std::string cfg_file, cfg_out;
    int cfg_channels = 0;
    bool cfg_preset = false;
    CLI::App* cfg_cmd = app.add_subcommand("cfg", "Rewrite a darknet .cfg");
    cfg_cmd->add_option("file", cfg_file, "Input .cfg")->required();
    cfg_cmd->add_option("--channels", cfg_channels, "Set [net] channels to this value");
    cfg_cmd->add_flag("--paper-preset", cfg_preset,
                      "Apply the published training preset (lr 0.001, momentum 0.9, "
                      "max_batches 2500, steps 2000,2250, batch 64, subdivisions 16)");
    cfg_cmd->add_option("-o,--output", cfg_out, "Output path (default: stdout)");

    // synth
    std::uint64_t synth_seed = 1000;
    int synth_count = 10, synth_width = 96, synth_height = 96, synth_targets = 3;
    std::string synth_tint = "0.9,1.0,1.25", synth_out, synth_mode, synth_format = "png";
    CLI::App* synth_cmd = app.add_subcommand("synth", "Generate tinted synthetic scenes");
    synth_cmd->add_option("--seed", synth_seed, "Base seed; scene i uses seed+i");
    synth_cmd->add_option("--count", synth_count, "Number of scenes");
    synth_cmd->add_option("--tint", synth_tint, "Channel gains FR,FG,FB");
    synth_cmd->add_option("-o,--output", synth_out, "Output directory")->required();
    synth_cmd->add_option("--mode", synth_mode, "red|blue (default: inferred from tint)");
    synth_cmd->add_option("--width", synth_width, "Scene width");
    synth_cmd->add_option("--height", synth_height, "Scene height");
    synth_cmd->add_option("--targets", synth_targets, "Targets per scene");
    synth_cmd->add_option("--format", synth_format, "Scene format: png|ppm")
        ->check(CLI::IsMember({"png", "ppm"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (stats_cmd->parsed()) return run_stats(stats_image, stats_processed, stats_json);
        if (table_cmd->parsed()) return run_table(table_image, table_csv);
        if (conv_cmd->parsed())
            return run_convert(conv_image, conv_mode, conv_meta, conv_out, conv_json);
        if (batch_cmd->parsed())
            return run_batch(batch_dir, batch_out, batch_meta, batch_format, batch_workers,
                             batch_strict);
        if (split_cmd->parsed())
            return run_split(split_manifest, split_fraction, split_seed, split_stratify,
                             split_out);
        if (cfg_cmd->parsed()) return run_cfg(cfg_file, cfg_channels, cfg_preset, cfg_out);
        if (synth_cmd->parsed())
            return run_synth(synth_seed, synth_count, synth_tint, synth_out, synth_mode,
                             synth_width, synth_height, synth_targets, synth_format);
    } catch (const lumiprep::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
