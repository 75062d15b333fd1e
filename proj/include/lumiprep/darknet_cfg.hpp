#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lumiprep/error.hpp"

namespace lumiprep {

// Line-preserving model of a darknet .cfg file. The document is the raw line
// sequence plus a section index; serialize(parse(text)) == text for any
// input, so unknown keys, comments, blank lines and CRLF endings all survive
// a rewrite untouched.
struct CfgSection {
    std::string name;
    std::size_t header_line = 0;
};

struct CfgDocument {
    std::vector<std::string> lines;  // '\n' stripped; a trailing '\r' stays put
    bool trailing_newline = false;
    std::vector<CfgSection> sections;
};

namespace detail {

inline std::string strip_cr(const std::string& line) {
    if (!line.empty() && line.back() == '\r') return line.substr(0, line.size() - 1);
    return line;
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline std::optional<std::string> section_header_name(const std::string& raw_line) {
    const std::string t = trim(strip_cr(raw_line));
    if (t.size() >= 2 && t.front() == '[' && t.back() == ']')
        return t.substr(1, t.size() - 2);
    return std::nullopt;
}

// Splits "key=value" tolerating spaces around '='; returns (key, offset past
// the '=' and any spaces that follow it) so a rewrite can keep the line's
// existing spacing style.
struct KeyLine {
    std::string key;
    std::size_t value_offset = 0;
};

inline std::optional<KeyLine> parse_key_line(const std::string& raw_line) {
    const std::string line = strip_cr(raw_line);
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == '[') return std::nullopt;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) return std::nullopt;
    KeyLine k;
    k.key = trim(line.substr(0, eq));
    std::size_t v = eq + 1;
    while (v < line.size() && (line[v] == ' ' || line[v] == '\t')) ++v;
    k.value_offset = v;
    return k;
}

} // namespace detail

inline CfgDocument cfg_parse(const std::string& text) {
    CfgDocument doc;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            if (start < text.size()) {
                doc.lines.push_back(text.substr(start));
                doc.trailing_newline = false;
            } else {
                doc.trailing_newline = !text.empty();
            }
            break;
        }
        doc.lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    for (std::size_t i = 0; i < doc.lines.size(); ++i)
        if (auto name = detail::section_header_name(doc.lines[i]))
            doc.sections.push_back({*name, i});
    return doc;
}

inline std::string cfg_serialize(const CfgDocument& doc) {
    std::string out;
    for (std::size_t i = 0; i < doc.lines.size(); ++i) {
        out += doc.lines[i];
        if (i + 1 < doc.lines.size() || doc.trailing_newline) out += '\n';
    }
    return out;
}

inline CfgDocument cfg_load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::file_not_found, path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return cfg_parse(ss.str());
}

inline void cfg_save(const CfgDocument& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path);
    const std::string text = cfg_serialize(doc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(Errc::io_error, "write failed: " + path);
}

struct CfgEditResult {
    CfgDocument doc;
    bool changed = false;                // false when the edit was a byte no-op
    std::vector<std::string> warnings;
};

namespace detail {

// [start, end) line range of the first section with the given name.
inline std::pair<std::size_t, std::size_t> first_section_range(
    const CfgDocument& doc, const std::string& name, std::vector<std::string>* warnings) {
    std::size_t begin = 0, end = 0;
    bool found = false;
    int occurrences = 0;
    for (std::size_t s = 0; s < doc.sections.size(); ++s) {
        if (doc.sections[s].name != name) continue;
        ++occurrences;
        if (!found) {
            found = true;
            begin = doc.sections[s].header_line + 1;
            end = (s + 1 < doc.sections.size()) ? doc.sections[s + 1].header_line
                                                : doc.lines.size();
        }
    }
    if (!found)
        throw Error(Errc::missing_net_section, "no [" + name + "] section in cfg");
    if (occurrences > 1 && warnings)
        warnings->push_back("multiple [" + name + "] sections; editing the first");
    return {begin, end};
}

// Rewrites `key` to `value` inside [begin, end), preserving the line's
// spacing around '='. Returns false when the key is absent.
inline bool rewrite_key(CfgDocument& doc, std::size_t begin, std::size_t end,
                        const std::string& key, const std::string& value, bool& changed) {
    for (std::size_t i = begin; i < end; ++i) {
        const auto parsed = parse_key_line(doc.lines[i]);
        if (!parsed || parsed->key != key) continue;
        const bool had_cr = !doc.lines[i].empty() && doc.lines[i].back() == '\r';
        const std::string body = strip_cr(doc.lines[i]);
        std::string updated = body.substr(0, parsed->value_offset) + value;
        if (had_cr) updated += '\r';
        if (updated != doc.lines[i]) {
            doc.lines[i] = updated;
            changed = true;
        }
        return true;
    }
    return false;
}

} // namespace detail

inline CfgEditResult set_channels(const CfgDocument& doc, int channels) {
    CfgEditResult result{doc, false, {}};
    const auto [begin, end] =
        detail::first_section_range(result.doc, "net", &result.warnings);
    if (!detail::rewrite_key(result.doc, begin, end, "channels",
                             std::to_string(channels), result.changed))
        throw Error(Errc::missing_channels_key, "no channels= key in [net]");
    return result;
}

// Training hyperparameters targeted at the [net] section. Values are kept as
// strings so the rewritten file carries exactly the requested spelling.
struct TrainingParams {
    std::optional<std::string> learning_rate;
    std::optional<std::string> momentum;
    std::optional<std::string> max_batches;
    std::optional<std::string> steps;
    std::optional<std::string> batch;
    std::optional<std::string> subdivisions;

    // The published single-channel training recipe this toolkit prepares
    // datasets for: lr 0.001, momentum 0.9, 2500 iterations with step decay
    // at 80% and 90%, batch 64 split into 16 subdivisions.
    static TrainingParams published_preset() {
        TrainingParams p;
        p.learning_rate = "0.001";
        p.momentum = "0.9";
        p.max_batches = "2500";
        p.steps = "2000,2250";
        p.batch = "64";
        p.subdivisions = "16";
        return p;
    }
};

inline CfgEditResult set_training_params(const CfgDocument& doc, const TrainingParams& params) {
    CfgEditResult result{doc, false, {}};
    const auto [begin, end] =
        detail::first_section_range(result.doc, "net", &result.warnings);

    std::vector<std::string> missing;
    auto apply = [&](const char* key, const std::optional<std::string>& value) {
        if (!value) return;
        if (!detail::rewrite_key(result.doc, begin, end, key, *value, result.changed))
            missing.push_back(key);
    };
    apply("learning_rate", params.learning_rate);
    apply("momentum", params.momentum);
    apply("max_batches", params.max_batches);
    apply("steps", params.steps);
    apply("batch", params.batch);
    apply("subdivisions", params.subdivisions);

    if (!missing.empty()) {
        std::string joined;
        for (const std::string& m : missing) {
            if (!joined.empty()) joined += ", ";
            joined += m;
        }
        throw Error(Errc::missing_key, "missing [net] keys: " + joined);
    }
    return result;
}

} // namespace lumiprep
