#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lumiprep/convert.hpp"
#include "lumiprep/raster_io.hpp"
#include "lumiprep/rng.hpp"
#include "test_util.hpp"

using namespace lumiprep;
using testutil::TempDir;

namespace {

std::uint8_t convert_one(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                         const ConversionSpec& spec) {
    RgbImage img(1, 1);
    img.at(0, 0) = {r, g, b};
    return convert(img, spec).at(0, 0);
}

WeightTriple random_unit_triple(Lcg64& rng) {
    // two uniform cuts of [0,1] give a random point on the simplex
    double a = rng.next_below(1000001) / 1000000.0;
    double b = rng.next_below(1000001) / 1000000.0;
    if (a > b) std::swap(a, b);
    return {a, b - a, 1.0 - b, false};
}

} // namespace

TEST_CASE("default conversion single-pixel values are the verbatim ones") {
    const ConversionSpec spec = ConversionSpec::verbatim_default();
    CHECK(convert_one(255, 0, 0, spec) == 77);    // round(76.5)
    CHECK(convert_one(0, 255, 0, spec) == 26);    // round(25.5)
    CHECK(convert_one(0, 0, 255, spec) == 128);   // round(127.5)
    CHECK(convert_one(255, 255, 255, spec) == 230);  // 0.9 * 255 = 229.5
    CHECK(convert_one(0, 0, 0, spec) == 0);
}

TEST_CASE("normalized default maps white to white") {
    CHECK(convert_one(255, 255, 255, ConversionSpec::normalized_default()) == 255);
    CHECK(convert_one(0, 0, 0, ConversionSpec::normalized_default()) == 0);
}

TEST_CASE("weighted conversion computes the expected linear combination") {
    const ConversionSpec spec = ConversionSpec::weighted({0.5, 0.3, 0.2, false});
    CHECK(convert_one(100, 200, 50, spec) == 120);  // 50 + 60 + 10
}

TEST_CASE("unit-sum weights map constant gray to itself") {
    Lcg64 rng(555);
    for (int trial = 0; trial < 20; ++trial) {
        const WeightTriple w = random_unit_triple(rng);
        const ConversionSpec spec = ConversionSpec::weighted(w);
        for (int v : {0, 1, 17, 128, 200, 254, 255}) {
            CAPTURE(w.w_r, w.w_g, w.w_b, v);
            REQUIRE(convert_one(static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v),
                                static_cast<std::uint8_t>(v), spec) == v);
        }
    }
}

TEST_CASE("convert equals convert_reference byte-for-byte") {
    Lcg64 rng(99);
    std::vector<ConversionSpec> specs = {ConversionSpec::verbatim_default(),
                                         ConversionSpec::normalized_default()};
    for (int i = 0; i < 6; ++i)
        specs.push_back(ConversionSpec::weighted(random_unit_triple(rng)));

    for (std::uint32_t seed = 1; seed <= 10; ++seed) {
        const RgbImage img = testutil::random_rgb(64, 64, seed);
        for (const ConversionSpec& spec : specs) {
            const GrayImage fast = convert(img, spec);
            const GrayImage slow = convert_reference(img, spec);
            REQUIRE(fast == slow);
        }
    }
}

TEST_CASE("convert output matches an independent scalar evaluation per pixel") {
    const WeightTriple w{0.37, 0.22, 0.41, false};
    const ConversionSpec spec = ConversionSpec::weighted(w);
    const RgbImage img = testutil::random_rgb(32, 32, 2024u);
    const GrayImage out = convert(img, spec);
    for (std::size_t i = 0; i < img.pixel_count(); i += 7) {
        const PixelTriple p = img.pixels()[i];
        const double raw = w.w_r * p.r + w.w_g * p.g + w.w_b * p.b;
        double rounded = std::round(raw);
        rounded = std::min(255.0, std::max(0.0, rounded));
        REQUIRE(out.pixels()[i] == static_cast<std::uint8_t>(rounded));
    }
}

TEST_CASE("increasing a channel never decreases the output under non-negative weights") {
    const ConversionSpec spec = ConversionSpec::weighted({0.2, 0.5, 0.3, false});
    for (int base : {0, 50, 100, 200}) {
        int prev = convert_one(static_cast<std::uint8_t>(base), 100, 100, spec);
        for (int r = base + 1; r <= std::min(255, base + 55); ++r) {
            const int cur = convert_one(static_cast<std::uint8_t>(r), 100, 100, spec);
            REQUIRE(cur >= prev);
            prev = cur;
        }
    }
}

TEST_CASE("conversion preserves dimensions and is deterministic") {
    const RgbImage img = testutil::random_rgb(31, 17, 5u);
    const GrayImage a = convert(img, ConversionSpec::verbatim_default());
    const GrayImage b = convert(img, ConversionSpec::verbatim_default());
    CHECK(a.width() == img.width());
    CHECK(a.height() == img.height());
    CHECK(a == b);
}

TEST_CASE("convert rejects an empty image") {
    CHECK_THROWS_AS(convert(RgbImage(), ConversionSpec::verbatim_default()), Error);
}

TEST_CASE("convert_batch writes one output per input and isolates failures") {
    TempDir in("batch_in");
    TempDir out("batch_out");

    std::vector<std::string> paths;
    for (int i = 0; i < 9; ++i) {
        const std::string p = in.file("img_" + std::to_string(i) + ".ppm");
        save_rgb(testutil::random_rgb(24, 24, static_cast<std::uint32_t>(i + 1)), p);
        paths.push_back(p);
    }
    const std::string corrupt = in.file("img_9.ppm");
    testutil::write_bytes(corrupt, "P6\n8 8\n255\nshort");
    paths.push_back(corrupt);

    auto provider = [](const RgbImage&, const std::string&) {
        return ConversionSpec::verbatim_default();
    };

    const auto results = convert_batch(paths, provider, out.path.string(), {4, ".pgm"});
    REQUIRE(results.size() == 10);
    int ok = 0, failed = 0;
    for (const auto& r : results) {
        if (r.ok) {
            ++ok;
            CHECK(std::filesystem::exists(r.output_path));
        } else {
            ++failed;
            CHECK(r.source_path == corrupt);
            CHECK_FALSE(r.error.empty());
        }
    }
    CHECK(ok == 9);
    CHECK(failed == 1);
}

TEST_CASE("convert_batch is deterministic across runs and worker counts") {
    TempDir in("det_in");
    std::vector<std::string> paths;
    for (int i = 0; i < 12; ++i) {
        const std::string p = in.file("s" + std::to_string(i) + ".ppm");
        save_rgb(testutil::random_rgb(16, 16, static_cast<std::uint32_t>(100 + i)), p);
        paths.push_back(p);
    }
    auto provider = [](const RgbImage&, const std::string&) {
        return ConversionSpec::normalized_default();
    };

    TempDir out1("det_out1"), out2("det_out2");
    convert_batch(paths, provider, out1.path.string(), {1, ".pgm"});
    convert_batch(paths, provider, out2.path.string(), {8, ".pgm"});

    for (int i = 0; i < 12; ++i) {
        const std::string name = "s" + std::to_string(i) + ".pgm";
        const std::string b1 = testutil::read_bytes(out1.file(name));
        const std::string b2 = testutil::read_bytes(out2.file(name));
        REQUIRE_FALSE(b1.empty());
        REQUIRE(b1 == b2);
    }
}
