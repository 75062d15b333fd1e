#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "lumiprep/acquisition.hpp"
#include "lumiprep/convert.hpp"
#include "lumiprep/error.hpp"
#include "lumiprep/histogram.hpp"
#include "lumiprep/raster_io.hpp"
#include "lumiprep/rng.hpp"

namespace lumiprep {

// One line of a YOLO-format annotation file: class id plus a normalized
// center/size box.
struct AnnotationRecord {
    int class_id = 0;
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
};

inline std::vector<AnnotationRecord> parse_annotations(const std::string& text) {
    std::vector<AnnotationRecord> records;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        AnnotationRecord r;
        std::istringstream ls(line);
        if (!(ls >> r.class_id >> r.cx >> r.cy >> r.w >> r.h))
            throw Error(Errc::corrupt_data,
                        "bad annotation line " + std::to_string(line_no) + ": " + line);
        if (r.class_id < 0 || r.cx < 0.0 || r.cx > 1.0 || r.cy < 0.0 || r.cy > 1.0 ||
            r.w < 0.0 || r.w > 1.0 || r.h < 0.0 || r.h > 1.0)
            throw Error(Errc::corrupt_data,
                        "annotation values out of range on line " + std::to_string(line_no));
        records.push_back(r);
    }
    return records;
}

inline std::string format_annotations(const std::vector<AnnotationRecord>& records) {
    std::string out;
    char buf[160];
    for (const AnnotationRecord& r : records) {
        std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f\n",
                      r.class_id, r.cx, r.cy, r.w, r.h);
        out += buf;
    }
    return out;
}

// Per-image outcome of a batch run. Serialized as one JSON object per
// manifest line; no timestamps anywhere, so re-runs are byte-identical.
struct ManifestRecord {
    std::string source_path;
    std::string output_path;
    std::string status = "success";  // "success" | "error"
    std::string error;
    FilterMode mode;
    bool default_weights = true;     // true => the verbatim default conversion
    WeightTriple weights;
    bool degenerate_fallback = false;
    ChannelStats stats;
    bool clamped = false;
    std::string annotation_path;
    std::optional<int> class_id;     // majority class; enables stratified splits
    std::optional<std::string> split;

    bool ok() const { return status == "success"; }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["source_path"] = source_path;
        j["output_path"] = output_path.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(output_path);
        j["status"] = status;
        if (!error.empty()) j["error"] = error;
        if (ok()) {
            j["mode"] = mode.name();
            if (mode.tag == FilterMode::Tag::blend) j["blend_t"] = mode.blend_t;
            if (default_weights) {
                j["weights"] = "default";
            } else {
                j["weights"] = {{"w_r", weights.w_r},
                                {"w_g", weights.w_g},
                                {"w_b", weights.w_b},
                                {"clamped", weights.clamped}};
            }
            j["degenerate_fallback"] = degenerate_fallback;
            j["stats"] = {{"mean", stats.mean}, {"std_dev", stats.std_dev}, {"perc", stats.perc}};
            j["clamped"] = clamped;
            j["annotation_path"] =
                annotation_path.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(annotation_path);
            if (class_id) j["class_id"] = *class_id;
        }
        j["split"] = split ? nlohmann::ordered_json(*split) : nlohmann::ordered_json();
        return j;
    }

    static ManifestRecord from_json(const nlohmann::json& j) {
        ManifestRecord r;
        r.source_path = j.at("source_path").get<std::string>();
        if (j.contains("output_path") && !j.at("output_path").is_null())
            r.output_path = j.at("output_path").get<std::string>();
        r.status = j.at("status").get<std::string>();
        if (j.contains("error")) r.error = j.at("error").get<std::string>();
        if (r.ok()) {
            const std::string mode = j.at("mode").get<std::string>();
            if (mode == "night") r.mode = FilterMode::night();
            else if (mode == "blue") r.mode = FilterMode::blue();
            else if (mode == "red") r.mode = FilterMode::red();
            else r.mode = FilterMode::blend(j.at("blend_t").get<double>());
            if (j.at("weights").is_string()) {
                r.default_weights = true;
            } else {
                r.default_weights = false;
                const auto& w = j.at("weights");
                r.weights = {w.at("w_r").get<double>(), w.at("w_g").get<double>(),
                             w.at("w_b").get<double>(), w.at("clamped").get<bool>()};
            }
            if (j.contains("degenerate_fallback"))
                r.degenerate_fallback = j.at("degenerate_fallback").get<bool>();
            const auto& s = j.at("stats");
            r.stats = {s.at("mean").get<double>(), s.at("std_dev").get<double>(),
                       s.at("perc").get<double>()};
            r.clamped = j.at("clamped").get<bool>();
            if (j.contains("annotation_path") && !j.at("annotation_path").is_null())
                r.annotation_path = j.at("annotation_path").get<std::string>();
            if (j.contains("class_id") && !j.at("class_id").is_null())
                r.class_id = j.at("class_id").get<int>();
        }
        if (j.contains("split") && !j.at("split").is_null())
            r.split = j.at("split").get<std::string>();
        return r;
    }
};

inline void write_manifest(const std::vector<ManifestRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path);
    for (const ManifestRecord& r : records) out << r.to_json().dump() << "\n";
    if (!out) throw Error(Errc::io_error, "write failed: " + path);
}

inline std::vector<ManifestRecord> read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::file_not_found, path);
    std::vector<ManifestRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back(ManifestRecord::from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::corrupt_data, "bad manifest line in " + path + ": " + e.what());
        }
    }
    return records;
}

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    bool stratify_by_class = false;
};

struct ProcessOptions {
    std::optional<AcquisitionMeta> global_meta;  // sidecars take precedence
    int workers = 0;
    std::string extension = ".pgm";
};

namespace detail {

inline std::optional<int> majority_class(const std::vector<AnnotationRecord>& records) {
    if (records.empty()) return std::nullopt;
    std::map<int, int> counts;
    for (const AnnotationRecord& r : records) ++counts[r.class_id];
    int best_class = records.front().class_id;
    int best_count = 0;
    for (const auto& [cls, count] : counts) {
        if (count > best_count) {  // map order breaks ties toward the smaller id
            best_count = count;
            best_class = cls;
        }
    }
    return best_class;
}

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::io_error, "write failed: " + path);
}

inline int count_classes(const std::string& classes_path) {
    std::ifstream in(classes_path);
    if (!in) throw Error(Errc::io_error, "cannot open " + classes_path);
    int n = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) ++n;
    }
    return n;
}

} // namespace detail

// Converts every image in image_dir according to its metadata, carries the
// YOLO annotation through byte-identically, and returns one record per input
// in sorted-path order. Per-file failures become status=error records; a
// missing annotation is not a failure (unlabeled images are allowed).
inline std::vector<ManifestRecord> process_dataset(const std::string& image_dir,
                                                   const std::string& out_dir,
                                                   const ProcessOptions& options = {}) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(image_dir))
        throw Error(Errc::file_not_found, "not a directory: " + image_dir);

    std::vector<std::string> inputs;
    for (const auto& entry : fs::directory_iterator(image_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = lumiprep::detail::lower_ext(entry.path());
        if (ext == ".png" || ext == ".ppm") inputs.push_back(entry.path().string());
    }
    std::sort(inputs.begin(), inputs.end());

    std::vector<ManifestRecord> records(inputs.size());
    if (inputs.empty()) return records;

    fs::create_directories(out_dir);

    std::optional<int> n_classes;
    const fs::path classes_path = fs::path(image_dir) / "classes.txt";
    if (fs::exists(classes_path)) n_classes = detail::count_classes(classes_path.string());

    const int workers =
        std::min<int>(effective_workers(options.workers), static_cast<int>(inputs.size()));
    std::atomic<std::size_t> next{0};

    auto run_one = [&](std::size_t i) {
        ManifestRecord& rec = records[i];
        rec.source_path = inputs[i];
        try {
            const fs::path src(inputs[i]);
            const std::string stem = src.stem().string();

            AcquisitionMeta meta;
            const fs::path sidecar = src.parent_path() / (stem + ".json");
            if (fs::exists(sidecar)) {
                meta = AcquisitionMeta::from_json(
                    nlohmann::json::parse(detail::read_file_bytes(sidecar.string())));
            } else if (options.global_meta) {
                meta = *options.global_meta;
            } else {
                throw Error(Errc::insufficient_metadata,
                            "no sidecar " + sidecar.string() + " and no global metadata");
            }

            const RgbImage img = load_rgb(inputs[i]);
            rec.stats = stats_of(pooled_histogram(img));
            const WeightsDecision decision = decide_weights(select_mode(meta), rec.stats);
            rec.mode = decision.mode;
            rec.degenerate_fallback = decision.degenerate_fallback;
            rec.default_weights = decision.spec.mode == ConversionMode::default_verbatim;
            if (!rec.default_weights) rec.weights = decision.spec.weights;
            rec.clamped = !rec.default_weights && rec.weights.clamped;

            const GrayImage gray = convert(img, decision.spec);
            const fs::path out_img = fs::path(out_dir) / (stem + options.extension);
            save_gray(gray, out_img.string());
            rec.output_path = out_img.string();

            const fs::path ann = src.parent_path() / (stem + ".txt");
            if (fs::exists(ann)) {
                const std::string bytes = detail::read_file_bytes(ann.string());
                const std::vector<AnnotationRecord> parsed = parse_annotations(bytes);
                if (n_classes) {
                    for (const AnnotationRecord& a : parsed)
                        if (a.class_id >= *n_classes)
                            throw Error(Errc::corrupt_data,
                                        "class id " + std::to_string(a.class_id) +
                                            " exceeds classes.txt (" + std::to_string(*n_classes) +
                                            " classes) in " + ann.string());
                }
                const fs::path out_ann = fs::path(out_dir) / (stem + ".txt");
                detail::write_file_bytes(out_ann.string(), bytes);
                rec.annotation_path = out_ann.string();
                rec.class_id = detail::majority_class(parsed);
            }
            rec.status = "success";
        } catch (const std::exception& e) {
            rec = ManifestRecord{};
            rec.source_path = inputs[i];
            rec.status = "error";
            rec.error = e.what();
        }
    };

    if (workers <= 1) {
        for (std::size_t i = 0; i < inputs.size(); ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= inputs.size()) return;
                    run_one(i);
                }
            });
        for (std::thread& t : pool) t.join();
    }
    return records;
}

// Labels every successful record train or test. round(N * fraction) records
// go to train (per class when stratified); the shuffle uses the documented
// portable LCG, so a fixed seed reproduces the identical partition anywhere.
inline void split_dataset(std::vector<ManifestRecord>& records, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw Error(Errc::invalid_argument, "train_fraction must be strictly inside (0,1)");
    std::vector<std::size_t> successes;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].ok()) successes.push_back(i);
    if (records.empty() || successes.empty())
        throw Error(Errc::empty_manifest, "no successful records to split");

    auto label = [&](std::vector<std::size_t>& group, Lcg64& rng) {
        deterministic_shuffle(group, rng);
        const std::size_t n_train = static_cast<std::size_t>(
            std::llround(static_cast<double>(group.size()) * spec.train_fraction));
        for (std::size_t k = 0; k < group.size(); ++k)
            records[group[k]].split = k < n_train ? "train" : "test";
    };

    if (!spec.stratify_by_class) {
        Lcg64 rng(spec.seed);
        label(successes, rng);
        return;
    }

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i : successes) {
        if (!records[i].class_id)
            throw Error(Errc::class_unknown,
                        "cannot stratify: no class for " + records[i].source_path);
        by_class[*records[i].class_id].push_back(i);
    }
    for (auto& [cls, group] : by_class) {
        Lcg64 rng(spec.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(cls + 1)));
        label(group, rng);
    }
}

// Writes train.txt / test.txt with the converted-image paths exactly as the
// manifest stores them, in manifest order. Empty lists are an error, never a
// silently empty file.
inline void emit_filelists(const std::vector<ManifestRecord>& records, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::string train_lines, test_lines;
    std::size_t n_train = 0, n_test = 0;
    for (const ManifestRecord& r : records) {
        if (!r.ok()) continue;
        if (!r.split)
            throw Error(Errc::unsplit_manifest, "record without split label: " + r.source_path);
        if (*r.split == "train") {
            train_lines += r.output_path + "\n";
            ++n_train;
        } else {
            test_lines += r.output_path + "\n";
            ++n_test;
        }
    }
    if (n_train == 0 || n_test == 0)
        throw Error(Errc::empty_split, "split produced an empty train or test list");
    fs::create_directories(out_dir);
    detail::write_file_bytes((fs::path(out_dir) / "train.txt").string(), train_lines);
    detail::write_file_bytes((fs::path(out_dir) / "test.txt").string(), test_lines);
}

} // namespace lumiprep
