#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "pxa/common/image.hpp"

namespace pxa::io {

class IoError : public std::runtime_error {
public:
    IoError(const std::filesystem::path& path, const std::string& what)
        : std::runtime_error(path.string() + ": " + what), path_(path) {}
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

struct Graymap {
    Image<std::uint16_t> pixels;
    int maxval = 255;
};

// Binary P5. maxval > 255 selects two big-endian bytes per sample.
void write_pgm(const std::filesystem::path& path, const Image<std::uint16_t>& img, int maxval);
void write_pgm(const std::filesystem::path& path, const Image<std::uint8_t>& img);

// Reads P5 and plain P2 graymaps; comments are skipped.
Graymap read_pgm(const std::filesystem::path& path);
Graymap parse_pgm(const std::string& bytes, const std::filesystem::path& origin = "<memory>");
std::string encode_pgm(const Image<std::uint16_t>& img, int maxval);

// Little-endian single-channel float map ("Pf"), rows stored bottom-up.
void write_pfm(const std::filesystem::path& path, const Image<float>& img);
Image<float> read_pfm(const std::filesystem::path& path);

// 10-bit codes left-shifted into the 16-bit range.
Image<std::uint16_t> widen_codes(const Image<std::uint16_t>& codes, int bits);

}  // namespace pxa::io
