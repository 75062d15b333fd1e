#pragma once

#include <stdexcept>
#include <string>

namespace lumiprep {

enum class Errc {
    file_not_found,
    unsupported_format,
    unsupported_extension,
    corrupt_data,
    io_error,
    empty_image,
    empty_histogram,
    degenerate_weights,
    out_of_range_t,
    insufficient_metadata,
    out_of_range_coordinates,
    unsupported_epoch,
    missing_net_section,
    missing_channels_key,
    missing_key,
    empty_manifest,
    class_unknown,
    unsplit_manifest,
    empty_split,
    targets_dont_fit,
    invalid_argument,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::file_not_found:           return "FileNotFound";
        case Errc::unsupported_format:       return "UnsupportedFormat";
        case Errc::unsupported_extension:    return "UnsupportedExtension";
        case Errc::corrupt_data:             return "CorruptData";
        case Errc::io_error:                 return "IoError";
        case Errc::empty_image:              return "EmptyImage";
        case Errc::empty_histogram:          return "EmptyHistogram";
        case Errc::degenerate_weights:       return "DegenerateWeights";
        case Errc::out_of_range_t:           return "OutOfRangeT";
        case Errc::insufficient_metadata:    return "InsufficientMetadata";
        case Errc::out_of_range_coordinates: return "OutOfRangeCoordinates";
        case Errc::unsupported_epoch:        return "UnsupportedEpoch";
        case Errc::missing_net_section:      return "MissingNetSection";
        case Errc::missing_channels_key:     return "MissingChannelsKey";
        case Errc::missing_key:              return "MissingKey";
        case Errc::empty_manifest:           return "EmptyManifest";
        case Errc::class_unknown:            return "ClassUnknown";
        case Errc::unsplit_manifest:         return "UnsplitManifest";
        case Errc::empty_split:              return "EmptySplit";
        case Errc::targets_dont_fit:         return "TargetsDontFit";
        case Errc::invalid_argument:         return "InvalidArgument";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace lumiprep
