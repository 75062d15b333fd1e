#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <set>

#include "lumiprep/dataset.hpp"
#include "lumiprep/raster_io.hpp"
#include "test_util.hpp"

using namespace lumiprep;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

void write_scene_dir(const fs::path& dir, int count, const std::string& sidecar_json,
                     bool with_annotations) {
    for (int i = 0; i < count; ++i) {
        const std::string stem = "img_" + std::to_string(i);
        save_rgb(testutil::random_rgb(24, 24, static_cast<std::uint32_t>(i + 1)),
                 (dir / (stem + ".ppm")).string());
        if (!sidecar_json.empty())
            testutil::write_bytes((dir / (stem + ".json")).string(), sidecar_json);
        if (with_annotations)
            testutil::write_bytes((dir / (stem + ".txt")).string(),
                                  "0 0.500000 0.500000 0.250000 0.250000\n");
    }
}

std::vector<ManifestRecord> fake_manifest(int n, int classes = 0) {
    std::vector<ManifestRecord> records(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& r = records[static_cast<std::size_t>(i)];
        r.source_path = "in/img_" + std::to_string(i) + ".ppm";
        r.output_path = "out/img_" + std::to_string(i) + ".pgm";
        r.status = "success";
        r.mode = FilterMode::red();
        if (classes > 0) r.class_id = i % classes;
    }
    return records;
}

} // namespace

TEST_CASE("annotation parsing and formatting") {
    const auto recs = parse_annotations("0 0.5 0.5 0.25 0.25\r\n2 0.1 0.2 0.05 0.05\n\n");
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].class_id == 0);
    CHECK(recs[1].class_id == 2);
    CHECK(recs[1].cy == 0.2);

    CHECK_THROWS_AS(parse_annotations("1 0.5 0.5"), Error);          // short line
    CHECK_THROWS_AS(parse_annotations("0 1.5 0.5 0.2 0.2"), Error);  // out of range
    CHECK_THROWS_AS(parse_annotations("-1 0.5 0.5 0.2 0.2"), Error); // negative class

    const std::string text = format_annotations(recs);
    CHECK(text == "0 0.500000 0.500000 0.250000 0.250000\n2 0.100000 0.200000 0.050000 0.050000\n");
}

TEST_CASE("process_dataset converts everything under red-filter sidecars") {
    TempDir in("ds_in"), out("ds_out");
    write_scene_dir(in.path, 10, R"({"sun_elevation_deg": 45.0})", true);

    const auto records = process_dataset(in.path.string(), out.path.string(), {});
    REQUIRE(records.size() == 10);
    for (const auto& r : records) {
        CAPTURE(r.source_path, r.error);
        REQUIRE(r.ok());
        CHECK(r.mode.tag == FilterMode::Tag::red);
        CHECK_FALSE(r.default_weights);
        CHECK(fs::exists(r.output_path));
        CHECK(fs::exists(r.annotation_path));
        REQUIRE(r.class_id.has_value());
        CHECK(*r.class_id == 0);
    }
}

TEST_CASE("annotations pass through byte-identically") {
    TempDir in("ann_in"), out("ann_out");
    save_rgb(testutil::random_rgb(16, 16, 3u), (in.path / "a.ppm").string());
    // deliberately odd but valid bytes: CRLF endings, extra spaces
    const std::string annotation = "1 0.25  0.75 0.125 0.125\r\n0 0.5 0.5 0.1 0.1\r\n";
    testutil::write_bytes((in.path / "a.txt").string(), annotation);
    testutil::write_bytes((in.path / "a.json").string(), R"({"sun_elevation_deg": 50})");

    const auto records = process_dataset(in.path.string(), out.path.string(), {});
    REQUIRE(records.size() == 1);
    REQUIRE(records[0].ok());
    CHECK(testutil::read_bytes(records[0].annotation_path) == annotation);

    // majority class: two lines, classes {1, 0} tie -> smaller id wins
    REQUIRE(records[0].class_id.has_value());
    CHECK(*records[0].class_id == 0);
}

TEST_CASE("empty directory gives an empty manifest") {
    TempDir in("empty_in"), out("empty_out");
    const auto records = process_dataset(in.path.string(), out.path.string(), {});
    CHECK(records.empty());
}

TEST_CASE("missing annotation is allowed, missing metadata is a per-file error") {
    TempDir in("meta_in"), out("meta_out");
    save_rgb(testutil::random_rgb(8, 8, 1u), (in.path / "labeled.ppm").string());
    testutil::write_bytes((in.path / "labeled.json").string(), R"({"sun_elevation_deg": -5})");
    save_rgb(testutil::random_rgb(8, 8, 2u), (in.path / "orphan.ppm").string());

    const auto records = process_dataset(in.path.string(), out.path.string(), {});
    REQUIRE(records.size() == 2);
    // sorted order: labeled.ppm before orphan.ppm
    CHECK(records[0].ok());
    CHECK(records[0].annotation_path.empty());
    CHECK(records[0].mode.tag == FilterMode::Tag::night);
    CHECK(records[0].default_weights);

    CHECK_FALSE(records[1].ok());
    CHECK(records[1].error.find("InsufficientMetadata") != std::string::npos);
}

TEST_CASE("global metadata applies when no sidecar exists, sidecar wins otherwise") {
    TempDir in("glob_in"), out("glob_out");
    save_rgb(testutil::random_rgb(8, 8, 1u), (in.path / "plain.ppm").string());
    save_rgb(testutil::random_rgb(8, 8, 2u), (in.path / "override.ppm").string());
    testutil::write_bytes((in.path / "override.json").string(), R"({"sun_elevation_deg": 5})");

    ProcessOptions options;
    AcquisitionMeta global;
    global.sun_elevation_deg = 60.0;
    options.global_meta = global;

    const auto records = process_dataset(in.path.string(), out.path.string(), options);
    REQUIRE(records.size() == 2);
    // sorted order puts override.ppm first
    CHECK(records[0].mode.tag == FilterMode::Tag::blue);  // sidecar elevation 5
    CHECK(records[1].mode.tag == FilterMode::Tag::red);   // global elevation 60
}

TEST_CASE("class ids are validated against classes.txt") {
    TempDir in("cls_in"), out("cls_out");
    save_rgb(testutil::random_rgb(8, 8, 1u), (in.path / "bad.ppm").string());
    testutil::write_bytes((in.path / "bad.json").string(), R"({"sun_elevation_deg": 45})");
    testutil::write_bytes((in.path / "bad.txt").string(), "5 0.5 0.5 0.2 0.2\n");
    testutil::write_bytes((in.path / "classes.txt").string(), "car\nplane\n");

    const auto records = process_dataset(in.path.string(), out.path.string(), {});
    REQUIRE(records.size() == 1);
    CHECK_FALSE(records[0].ok());
    CHECK(records[0].error.find("class id") != std::string::npos);
}

TEST_CASE("split produces the requested counts deterministically") {
    auto records = fake_manifest(100);
    split_dataset(records, SplitSpec{0.8, 7, false});
    int train = 0, test = 0;
    for (const auto& r : records) {
        REQUIRE(r.split.has_value());
        (*r.split == "train" ? train : test) += 1;
    }
    CHECK(train == 80);
    CHECK(test == 20);

    auto again = fake_manifest(100);
    split_dataset(again, SplitSpec{0.8, 7, false});
    for (std::size_t i = 0; i < records.size(); ++i)
        REQUIRE(*records[i].split == *again[i].split);

    auto other_seed = fake_manifest(100);
    split_dataset(other_seed, SplitSpec{0.8, 8, false});
    bool any_diff = false;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (*records[i].split != *other_seed[i].split) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("smallest split: fraction 0.5 on two records is exactly 1/1") {
    auto records = fake_manifest(2);
    split_dataset(records, SplitSpec{0.5, 1, false});
    const int train = (*records[0].split == "train") + (*records[1].split == "train");
    CHECK(train == 1);
}

TEST_CASE("stratified split balances every class") {
    // 5 classes x 245 records at fraction 220/245 -> 220 train + 25 test each
    auto records = fake_manifest(5 * 245, 5);
    split_dataset(records, SplitSpec{220.0 / 245.0, 99, true});
    std::map<int, std::pair<int, int>> per_class;
    for (const auto& r : records) {
        auto& [train, test] = per_class[*r.class_id];
        (*r.split == "train" ? train : test) += 1;
    }
    REQUIRE(per_class.size() == 5);
    for (const auto& [cls, counts] : per_class) {
        CAPTURE(cls);
        CHECK(counts.first == 220);
        CHECK(counts.second == 25);
    }
}

TEST_CASE("split error contracts") {
    std::vector<ManifestRecord> empty;
    CHECK_THROWS_AS(split_dataset(empty, SplitSpec{0.8, 1, false}), Error);

    auto no_class = fake_manifest(4);
    try {
        split_dataset(no_class, SplitSpec{0.5, 1, true});
        FAIL("expected ClassUnknown");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::class_unknown);
    }

    auto records = fake_manifest(4);
    CHECK_THROWS_AS(split_dataset(records, SplitSpec{1.0, 1, false}), Error);
    CHECK_THROWS_AS(split_dataset(records, SplitSpec{0.0, 1, false}), Error);
}

TEST_CASE("filelists conserve counts and path bytes") {
    TempDir out("fl_out");
    auto records = fake_manifest(10);
    split_dataset(records, SplitSpec{0.8, 3, false});
    emit_filelists(records, out.path.string());

    const std::string train = testutil::read_bytes(out.file("train.txt"));
    const std::string test = testutil::read_bytes(out.file("test.txt"));
    CHECK(std::count(train.begin(), train.end(), '\n') == 8);
    CHECK(std::count(test.begin(), test.end(), '\n') == 2);

    std::set<std::string> all;
    std::istringstream ts(train + test);
    std::string line;
    while (std::getline(ts, line)) all.insert(line);
    REQUIRE(all.size() == 10);
    for (const auto& r : records) REQUIRE(all.count(r.output_path) == 1);
}

TEST_CASE("filelists refuse unsplit or one-sided manifests") {
    TempDir out("fl_err");
    auto unsplit = fake_manifest(3);
    try {
        emit_filelists(unsplit, out.path.string());
        FAIL("expected UnsplitManifest");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unsplit_manifest);
    }

    auto one_sided = fake_manifest(3);
    for (auto& r : one_sided) r.split = "train";
    try {
        emit_filelists(one_sided, out.path.string());
        FAIL("expected EmptySplit");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_split);
    }
}

TEST_CASE("manifest round trips through jsonl") {
    TempDir tmp("mani");
    auto records = fake_manifest(3, 2);
    records[0].mode = FilterMode::blend(0.25);
    records[0].default_weights = false;
    records[0].weights = {0.5, 0.25, 0.25, true};
    records[0].clamped = true;
    records[0].stats = {0.4, 0.1, 0.02};
    records[1].status = "error";
    records[1].error = "CorruptData: boom";
    records[1].output_path.clear();
    split_dataset(records, SplitSpec{0.5, 5, false});

    const std::string path = tmp.file("manifest.jsonl");
    write_manifest(records, path);
    const auto loaded = read_manifest(path);
    REQUIRE(loaded.size() == 3);

    CHECK(loaded[0].mode.tag == FilterMode::Tag::blend);
    CHECK(loaded[0].mode.blend_t == 0.25);
    CHECK_FALSE(loaded[0].default_weights);
    CHECK(loaded[0].weights.w_r == 0.5);
    CHECK(loaded[0].weights.clamped);
    CHECK(loaded[0].clamped);
    CHECK(loaded[0].stats.mean == 0.4);
    CHECK(loaded[0].split == records[0].split);

    CHECK_FALSE(loaded[1].ok());
    CHECK(loaded[1].error == "CorruptData: boom");
    CHECK(loaded[2].class_id == records[2].class_id);
}

TEST_CASE("process_dataset reruns are byte-identical across worker counts") {
    TempDir in("det_in");
    write_scene_dir(in.path, 8, R"({"sun_elevation_deg": 45.0})", true);

    const fs::path out_dir = in.path / "out";
    ProcessOptions options;

    options.workers = 1;
    auto first = process_dataset(in.path.string(), out_dir.string(), options);
    write_manifest(first, (in.path / "manifest.jsonl").string());
    const std::string manifest1 = testutil::read_bytes((in.path / "manifest.jsonl").string());
    std::map<std::string, std::string> bytes1;
    for (const auto& e : fs::directory_iterator(out_dir))
        bytes1[e.path().filename().string()] = testutil::read_bytes(e.path().string());

    fs::remove_all(out_dir);
    options.workers = 8;
    auto second = process_dataset(in.path.string(), out_dir.string(), options);
    write_manifest(second, (in.path / "manifest.jsonl").string());
    const std::string manifest2 = testutil::read_bytes((in.path / "manifest.jsonl").string());

    CHECK(manifest1 == manifest2);
    for (const auto& e : fs::directory_iterator(out_dir)) {
        const std::string name = e.path().filename().string();
        CAPTURE(name);
        REQUIRE(bytes1.count(name) == 1);
        REQUIRE(testutil::read_bytes(e.path().string()) == bytes1[name]);
    }
}
