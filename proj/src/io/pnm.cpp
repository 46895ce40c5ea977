#include "pxa/io/pnm.hpp"

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

namespace pxa::io {

namespace {

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(path, "write failed");
}

std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class HeaderReader {
public:
    HeaderReader(const std::string& b, const std::filesystem::path& origin)
        : b_(b), origin_(origin) {}

    void skip_space() {
        while (pos_ < b_.size()) {
            if (b_[pos_] == '#') {
                while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(b_[pos_]))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long number() {
        skip_space();
        if (pos_ >= b_.size() || !std::isdigit(static_cast<unsigned char>(b_[pos_])))
            throw IoError(origin_, "malformed graymap header");
        long v = 0;
        while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
            v = v * 10 + (b_[pos_++] - '0');
            if (v > 1'000'000'000) throw IoError(origin_, "graymap header value too large");
        }
        return v;
    }

    std::string token() {
        skip_space();
        std::string t;
        while (pos_ < b_.size() && !std::isspace(static_cast<unsigned char>(b_[pos_])))
            t += b_[pos_++];
        return t;
    }

    std::size_t pos() const noexcept { return pos_; }
    void advance() { ++pos_; }

private:
    const std::string& b_;
    const std::filesystem::path& origin_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string encode_pgm(const Image<std::uint16_t>& img, int maxval) {
    if (maxval < 1 || maxval > 65535) throw ContractViolation("pgm: maxval outside [1, 65535]");
    std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                      "\n" + std::to_string(maxval) + "\n";
    const bool wide = maxval > 255;
    out.reserve(out.size() + img.size() * (wide ? 2 : 1));
    for (std::uint16_t v : img.pixels()) {
        if (v > maxval) throw ContractViolation("pgm: sample exceeds maxval");
        if (wide) out += static_cast<char>(v >> 8);
        out += static_cast<char>(v & 0xff);
    }
    return out;
}

void write_pgm(const std::filesystem::path& path, const Image<std::uint16_t>& img, int maxval) {
    write_bytes(path, encode_pgm(img, maxval));
}

void write_pgm(const std::filesystem::path& path, const Image<std::uint8_t>& img) {
    Image<std::uint16_t> wide(img.width(), img.height());
    std::copy(img.pixels().begin(), img.pixels().end(), wide.pixels().begin());
    write_bytes(path, encode_pgm(wide, 255));
}

Graymap parse_pgm(const std::string& b, const std::filesystem::path& origin) {
    HeaderReader r(b, origin);
    const std::string magic = r.token();
    if (magic != "P5" && magic != "P2") throw IoError(origin, "not a graymap (magic '" + magic + "')");
    const long w = r.number(), h = r.number(), maxval = r.number();
    if (w <= 0 || h <= 0 || w > 65536 || h > 65536) throw IoError(origin, "bad graymap dimensions");
    if (maxval < 1 || maxval > 65535) throw IoError(origin, "bad graymap maxval");
    Graymap g{Image<std::uint16_t>(static_cast<int>(w), static_cast<int>(h)), static_cast<int>(maxval)};
    if (magic == "P2") {
        for (auto& px : g.pixels.pixels()) {
            const long v = r.number();
            if (v > maxval) throw IoError(origin, "sample exceeds maxval");
            px = static_cast<std::uint16_t>(v);
        }
        return g;
    }
    r.advance();  // single whitespace after maxval
    const std::size_t bps = maxval > 255 ? 2 : 1;
    const std::size_t need = g.pixels.size() * bps;
    if (b.size() < r.pos() || b.size() - r.pos() < need) throw IoError(origin, "truncated graymap data");
    const auto* p = reinterpret_cast<const unsigned char*>(b.data() + r.pos());
    for (std::size_t i = 0; i < g.pixels.size(); ++i) {
        const unsigned v = bps == 2 ? (p[2 * i] << 8) | p[2 * i + 1] : p[i];
        if (v > static_cast<unsigned>(maxval)) throw IoError(origin, "sample exceeds maxval");
        g.pixels[i] = static_cast<std::uint16_t>(v);
    }
    return g;
}

Graymap read_pgm(const std::filesystem::path& path) { return parse_pgm(read_bytes(path), path); }

void write_pfm(const std::filesystem::path& path, const Image<float>& img) {
    static_assert(sizeof(float) == 4);
    std::string out = "Pf\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                      "\n-1.0\n";
    for (int y = img.height() - 1; y >= 0; --y)
        for (float v : img.row(y)) {
            auto bits = std::bit_cast<std::uint32_t>(v);
            if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
            char buf[4];
            std::memcpy(buf, &bits, 4);
            out.append(buf, 4);
        }
    write_bytes(path, out);
}

Image<float> read_pfm(const std::filesystem::path& path) {
    const std::string b = read_bytes(path);
    HeaderReader r(b, path);
    if (r.token() != "Pf") throw IoError(path, "not a single-channel float map");
    const long w = r.number(), h = r.number();
    const std::string scale = r.token();
    r.advance();
    if (w <= 0 || h <= 0 || scale.empty()) throw IoError(path, "malformed float map header");
    const bool little = scale[0] == '-';
    Image<float> img(static_cast<int>(w), static_cast<int>(h));
    if (b.size() < r.pos() || b.size() - r.pos() < img.size() * 4) throw IoError(path, "truncated float map data");
    const char* p = b.data() + r.pos();
    for (int y = img.height() - 1; y >= 0; --y)
        for (float& v : img.row(y)) {
            std::uint32_t bits;
            std::memcpy(&bits, p, 4);
            p += 4;
            if (little != (std::endian::native == std::endian::little)) bits = __builtin_bswap32(bits);
            v = std::bit_cast<float>(bits);
        }
    return img;
}

Image<std::uint16_t> widen_codes(const Image<std::uint16_t>& codes, int bits) {
    expect(bits >= 1 && bits <= 16, "widen_codes: bits must be in [1, 16]");
    Image<std::uint16_t> out(codes.width(), codes.height());
    const int shift = 16 - bits;
    for (std::size_t i = 0; i < codes.size(); ++i)
        out[i] = static_cast<std::uint16_t>(codes[i] << shift);
    return out;
}

}  // namespace pxa::io
