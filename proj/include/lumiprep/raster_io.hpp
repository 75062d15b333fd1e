#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <csetjmp>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <png.h>

#include "lumiprep/error.hpp"
#include "lumiprep/raster.hpp"

// Lossless raster I/O. Supported formats are 8-bit only: binary PPM (P6) and
// PGM (P5) with maxval 255, and 8-bit PNG (RGB for color, gray for
// single-channel). 16-bit sources are rejected rather than rescaled, and the
// lossy formats are refused outright so histogram statistics stay exact.

namespace lumiprep {

namespace detail {

inline void png_quiet_warning(png_structp, png_const_charp) {}

inline std::string lower_ext(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

// Reads one whitespace/comment-delimited token from a Netpbm header.
inline std::string pnm_token(std::istream& in, const std::string& path) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c == '#') in.unget();
    if (tok.empty())
        throw Error(Errc::corrupt_data, "truncated header in " + path);
    return tok;
}

inline long pnm_int(std::istream& in, const std::string& path) {
    const std::string tok = pnm_token(in, path);
    try {
        std::size_t pos = 0;
        long v = std::stol(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw Error(Errc::corrupt_data, "bad header field '" + tok + "' in " + path);
    }
}

struct PnmHeader {
    int width = 0;
    int height = 0;
};

// Parses "<w> <h> <maxval>" plus the single whitespace byte that precedes the
// binary payload. Only maxval 255 is accepted.
inline PnmHeader pnm_header(std::istream& in, const std::string& path) {
    PnmHeader h;
    long w = pnm_int(in, path);
    long h_ = pnm_int(in, path);
    long maxval = pnm_int(in, path);
    if (w < 1 || h_ < 1)
        throw Error(Errc::corrupt_data, "non-positive dimensions in " + path);
    if (maxval > 255)
        throw Error(Errc::unsupported_format,
                    "16-bit depth not supported (maxval " + std::to_string(maxval) + ") in " + path);
    if (maxval != 255)
        throw Error(Errc::unsupported_format,
                    "maxval must be 255, got " + std::to_string(maxval) + " in " + path);
    h.width = static_cast<int>(w);
    h.height = static_cast<int>(h_);
    return h;
}

inline void read_payload(std::istream& in, std::vector<std::uint8_t>& buf, const std::string& path) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size())
        throw Error(Errc::corrupt_data, "truncated pixel data in " + path);
}

inline std::string sniff_magic(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (!std::filesystem::exists(path))
            throw Error(Errc::file_not_found, path);
        throw Error(Errc::io_error, "cannot open " + path);
    }
    char magic[8] = {};
    in.read(magic, 8);
    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (in.gcount() >= 8 && std::memcmp(magic, png_sig, 8) == 0) return "png";
    if (in.gcount() >= 2 && magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6'))
        return std::string("P") + magic[1];
    if (in.gcount() >= 2 && magic[0] == 'P' && magic[1] >= '1' && magic[1] <= '7')
        throw Error(Errc::unsupported_format,
                    "only binary P5/P6 Netpbm variants are supported: " + path);
    throw Error(Errc::unsupported_format, "unrecognized raster format: " + path);
}

struct PngReader {
    FILE* fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;

    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }

    void open(const std::string& path) {
        fp = std::fopen(path.c_str(), "rb");
        if (!fp) {
            if (!std::filesystem::exists(path))
                throw Error(Errc::file_not_found, path);
            throw Error(Errc::io_error, "cannot open " + path);
        }
        png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_quiet_warning);
        info = png ? png_create_info_struct(png) : nullptr;
        if (!png || !info)
            throw Error(Errc::io_error, "libpng allocation failed for " + path);
    }
};

struct PngWriter {
    FILE* fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;

    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }

    void open(const std::string& path) {
        fp = std::fopen(path.c_str(), "wb");
        if (!fp)
            throw Error(Errc::io_error, "cannot open for writing: " + path);
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_quiet_warning);
        info = png ? png_create_info_struct(png) : nullptr;
        if (!png || !info)
            throw Error(Errc::io_error, "libpng allocation failed for " + path);
    }
};

// channels == 3 decodes to RGB, channels == 1 to gray. Anything the 8-bit
// model cannot represent losslessly (16-bit, alpha, wrong channel count) is
// an UnsupportedFormat error, not a silent conversion.
inline std::vector<std::uint8_t> png_decode(const std::string& path, int channels,
                                            int& out_width, int& out_height) {
    PngReader r;
    r.open(path);

    std::vector<std::uint8_t> data;
    std::vector<png_bytep> rows;

    if (setjmp(png_jmpbuf(r.png)))
        throw Error(Errc::corrupt_data, "libpng failed decoding " + path);

    png_init_io(r.png, r.fp);
    png_read_info(r.png, r.info);

    const png_uint_32 w = png_get_image_width(r.png, r.info);
    const png_uint_32 h = png_get_image_height(r.png, r.info);
    const int bit_depth = png_get_bit_depth(r.png, r.info);
    const int color_type = png_get_color_type(r.png, r.info);

    if (bit_depth == 16)
        throw Error(Errc::unsupported_format, "16-bit depth not supported: " + path);
    if ((color_type & PNG_COLOR_MASK_ALPHA) != 0)
        throw Error(Errc::unsupported_format, "alpha channel not supported: " + path);

    if (channels == 3) {
        if (color_type == PNG_COLOR_TYPE_PALETTE) {
            if (png_get_valid(r.png, r.info, PNG_INFO_tRNS))
                throw Error(Errc::unsupported_format,
                            "palette transparency cannot be flattened: " + path);
            png_set_palette_to_rgb(r.png);
        } else if (color_type != PNG_COLOR_TYPE_RGB) {
            throw Error(Errc::unsupported_format, "expected an RGB image: " + path);
        }
    } else {
        if (color_type != PNG_COLOR_TYPE_GRAY)
            throw Error(Errc::unsupported_format, "expected a single-channel image: " + path);
        if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
    }

    png_set_interlace_handling(r.png);
    png_read_update_info(r.png, r.info);

    const std::size_t rowbytes = png_get_rowbytes(r.png, r.info);
    if (rowbytes != static_cast<std::size_t>(w) * static_cast<std::size_t>(channels))
        throw Error(Errc::corrupt_data, "unexpected row size decoding " + path);

    data.resize(rowbytes * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = data.data() + static_cast<std::size_t>(y) * rowbytes;

    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);

    out_width = static_cast<int>(w);
    out_height = static_cast<int>(h);
    return data;
}

inline void png_encode(const std::string& path, const std::uint8_t* data,
                       int width, int height, int channels) {
    PngWriter w;
    w.open(path);

    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    const std::size_t rowbytes = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
    for (int y = 0; y < height; ++y)
        rows[static_cast<std::size_t>(y)] =
            const_cast<png_bytep>(data + static_cast<std::size_t>(y) * rowbytes);

    if (setjmp(png_jmpbuf(w.png)))
        throw Error(Errc::io_error, "libpng failed encoding " + path);

    png_init_io(w.png, w.fp);
    png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 8, channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    png_write_image(w.png, rows.data());
    png_write_end(w.png, nullptr);
}

} // namespace detail

inline RgbImage load_rgb(const std::string& path) {
    const std::string magic = detail::sniff_magic(path);
    if (magic == "P5")
        throw Error(Errc::unsupported_format, "single-channel PGM given to load_rgb: " + path);
    if (magic == "P6") {
        std::ifstream in(path, std::ios::binary);
        in.ignore(2);
        const detail::PnmHeader h = detail::pnm_header(in, path);
        std::vector<std::uint8_t> raw(static_cast<std::size_t>(h.width) * h.height * 3);
        detail::read_payload(in, raw, path);
        std::vector<PixelTriple> px(raw.size() / 3);
        for (std::size_t i = 0; i < px.size(); ++i)
            px[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
        return RgbImage(h.width, h.height, std::move(px));
    }
    int w = 0, h = 0;
    std::vector<std::uint8_t> raw = detail::png_decode(path, 3, w, h);
    std::vector<PixelTriple> px(raw.size() / 3);
    for (std::size_t i = 0; i < px.size(); ++i)
        px[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
    return RgbImage(w, h, std::move(px));
}

inline GrayImage load_gray(const std::string& path) {
    const std::string magic = detail::sniff_magic(path);
    if (magic == "P6")
        throw Error(Errc::unsupported_format, "3-channel PPM given to load_gray: " + path);
    if (magic == "P5") {
        std::ifstream in(path, std::ios::binary);
        in.ignore(2);
        const detail::PnmHeader h = detail::pnm_header(in, path);
        std::vector<std::uint8_t> raw(static_cast<std::size_t>(h.width) * h.height);
        detail::read_payload(in, raw, path);
        return GrayImage(h.width, h.height, std::move(raw));
    }
    int w = 0, h = 0;
    std::vector<std::uint8_t> raw = detail::png_decode(path, 1, w, h);
    return GrayImage(w, h, std::move(raw));
}

inline void save_rgb(const RgbImage& img, const std::string& path) {
    if (img.empty())
        throw Error(Errc::empty_image, "cannot save an empty image");
    const std::string ext = detail::lower_ext(path);
    std::vector<std::uint8_t> raw(img.pixel_count() * 3);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        raw[3 * i] = img.pixels()[i].r;
        raw[3 * i + 1] = img.pixels()[i].g;
        raw[3 * i + 2] = img.pixels()[i].b;
    }
    if (ext == ".ppm") {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path);
        out << "P6\n" << img.width() << " " << img.height() << "\n255\n";
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (!out) throw Error(Errc::io_error, "write failed: " + path);
    } else if (ext == ".png") {
        detail::png_encode(path, raw.data(), img.width(), img.height(), 3);
    } else {
        throw Error(Errc::unsupported_extension, "expected .ppm or .png, got " + path);
    }
}

inline void save_gray(const GrayImage& img, const std::string& path) {
    if (img.empty())
        throw Error(Errc::empty_image, "cannot save an empty image");
    const std::string ext = detail::lower_ext(path);
    if (ext == ".pgm") {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path);
        out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
        out.write(reinterpret_cast<const char*>(img.pixels().data()),
                  static_cast<std::streamsize>(img.pixel_count()));
        if (!out) throw Error(Errc::io_error, "write failed: " + path);
    } else if (ext == ".png") {
        detail::png_encode(path, img.pixels().data(), img.width(), img.height(), 1);
    } else {
        throw Error(Errc::unsupported_extension, "expected .pgm or .png, got " + path);
    }
}

} // namespace lumiprep
