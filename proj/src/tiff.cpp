#include "pstaic/tiff.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <string>

namespace pstaic {

namespace {

enum Tag : std::uint16_t {
    kWidth = 256,
    kHeight = 257,
    kBitsPerSample = 258,
    kCompression = 259,
    kPhotometric = 262,
    kStripOffsets = 273,
    kSamplesPerPixel = 277,
    kRowsPerStrip = 278,
    kStripByteCounts = 279,
    kPlanarConfig = 284,
    kTileWidth = 322,
    kSampleFormat = 339,
};

enum FieldType : std::uint16_t { kByte = 1, kAscii = 2, kShort = 3, kLong = 4 };

class Writer {
public:
    void u16(std::uint16_t v) {
        buf.push_back(static_cast<std::uint8_t>(v));
        buf.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void entry(std::uint16_t tag, std::uint16_t type, std::uint32_t value) {
        u16(tag);
        u16(type);
        u32(1);
        if (type == kShort) {
            u16(static_cast<std::uint16_t>(value));
            u16(0);
        } else {
            u32(value);
        }
    }
    std::vector<std::uint8_t> buf;
};

class Reader {
public:
    Reader(std::span<const std::uint8_t> b) : bytes(b) {
        if (b.size() < 8) throw TiffError("TIFF: file too short");
        if (b[0] == 'I' && b[1] == 'I') {
            big = false;
        } else if (b[0] == 'M' && b[1] == 'M') {
            big = true;
        } else {
            throw TiffError("TIFF: bad byte-order mark");
        }
        if (u16(2) != 42) throw TiffError("TIFF: bad magic number (BigTIFF is not supported)");
    }

    void need(std::size_t off, std::size_t n) const {
        if (off > bytes.size() || n > bytes.size() - off) throw TiffError("TIFF: offset out of range");
    }
    std::uint16_t u16(std::size_t off) const {
        need(off, 2);
        const auto a = bytes[off], b = bytes[off + 1];
        return big ? static_cast<std::uint16_t>(a << 8 | b) : static_cast<std::uint16_t>(b << 8 | a);
    }
    std::uint32_t u32(std::size_t off) const {
        need(off, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            const std::uint32_t byte = bytes[off + static_cast<std::size_t>(big ? i : 3 - i)];
            v = (v << 8) | byte;
        }
        return v;
    }
    std::uint64_t u64(std::size_t off) const {
        const std::uint64_t a = u32(off), b = u32(off + 4);
        return big ? (a << 32 | b) : (b << 32 | a);
    }

    std::span<const std::uint8_t> bytes;
    bool big = false;
};

struct Field {
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    std::size_t offset = 0;  // where the values live
};

std::vector<std::uint32_t> values(const Reader& r, const Field& f) {
    std::size_t width = 0;
    if (f.type == kShort) {
        width = 2;
    } else if (f.type == kLong) {
        width = 4;
    } else if (f.type == kByte) {
        width = 1;
    } else {
        throw TiffError("TIFF: unsupported field type " + std::to_string(f.type));
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < f.count; ++i) {
        const std::size_t off = f.offset + i * width;
        if (width == 1) {
            r.need(off, 1);
            out.push_back(r.bytes[off]);
        } else {
            out.push_back(width == 2 ? r.u16(off) : r.u32(off));
        }
    }
    return out;
}

struct Page {
    std::size_t width = 0, height = 0;
    std::vector<double> samples;
};

Page read_page(const Reader& r, std::size_t ifd, std::size_t& next) {
    const std::uint16_t n = r.u16(ifd);
    std::map<std::uint16_t, Field> fields;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t e = ifd + 2 + 12 * i;
        Field f;
        f.type = r.u16(e + 2);
        f.count = r.u32(e + 4);
        const std::size_t unit = f.type == kShort ? 2 : (f.type == kLong ? 4 : 1);
        f.offset = static_cast<std::size_t>(f.count) * unit <= 4 ? e + 8 : r.u32(e + 8);
        fields[r.u16(e)] = f;
    }
    next = r.u32(ifd + 2 + 12 * n);

    auto scalar = [&](std::uint16_t tag, std::uint32_t fallback) -> std::uint32_t {
        const auto it = fields.find(tag);
        if (it == fields.end()) return fallback;
        const auto v = values(r, it->second);
        if (v.empty()) throw TiffError("TIFF: empty tag " + std::to_string(tag));
        return v.front();
    };

    if (fields.count(kTileWidth) != 0) throw TiffError("TIFF: tiled images are not supported");
    if (scalar(kCompression, 1) != 1) throw TiffError("TIFF: compressed images are not supported");
    if (scalar(kSamplesPerPixel, 1) != 1) throw TiffError("TIFF: only single-channel images are supported");
    if (!fields.count(kWidth) || !fields.count(kHeight) || !fields.count(kStripOffsets)) {
        throw TiffError("TIFF: missing required tag");
    }

    Page p;
    p.width = scalar(kWidth, 0);
    p.height = scalar(kHeight, 0);
    const std::uint32_t bits = scalar(kBitsPerSample, 1);
    const std::uint32_t format = scalar(kSampleFormat, 1);
    if (p.width == 0 || p.height == 0) throw TiffError("TIFF: zero image size");
    const bool is_float = format == 3;
    if (!((format == 1 && (bits == 8 || bits == 16 || bits == 32)) || (is_float && (bits == 32 || bits == 64)))) {
        throw TiffError("TIFF: unsupported sample format " + std::to_string(format) + "/" + std::to_string(bits));
    }
    const std::size_t bytes_per = bits / 8;

    const auto offsets = values(r, fields.at(kStripOffsets));
    std::vector<std::uint32_t> counts;
    if (fields.count(kStripByteCounts)) {
        counts = values(r, fields.at(kStripByteCounts));
    } else if (offsets.size() == 1) {
        counts.push_back(static_cast<std::uint32_t>(p.width * p.height * bytes_per));
    } else {
        throw TiffError("TIFF: missing strip byte counts");
    }
    if (counts.size() != offsets.size()) throw TiffError("TIFF: strip tables disagree");

    const std::size_t total = p.width * p.height;
    p.samples.reserve(total);
    for (std::size_t s = 0; s < offsets.size() && p.samples.size() < total; ++s) {
        const std::size_t take = std::min<std::size_t>(counts[s] / bytes_per, total - p.samples.size());
        r.need(offsets[s], take * bytes_per);
        for (std::size_t i = 0; i < take; ++i) {
            const std::size_t off = offsets[s] + i * bytes_per;
            double v = 0.0;
            if (is_float && bits == 32) {
                v = std::bit_cast<float>(r.u32(off));
            } else if (is_float) {
                v = std::bit_cast<double>(r.u64(off));
            } else if (bits == 8) {
                v = r.bytes[off];
            } else if (bits == 16) {
                v = r.u16(off);
            } else {
                v = r.u32(off);
            }
            p.samples.push_back(v);
        }
    }
    if (p.samples.size() != total) throw TiffError("TIFF: strip data shorter than the image");
    return p;
}

}  // namespace

std::vector<std::uint8_t> encode_tiff(const Volume2DT& v) {
    if (v.size() == 0) throw TiffError("TIFF: cannot write an empty volume");
    const Shape& s = v.shape();
    const std::uint32_t page_bytes = static_cast<std::uint32_t>(s.frame_size() * 4);
    constexpr std::uint16_t kEntries = 11;
    constexpr std::uint32_t kIfdBytes = 2 + 12 * kEntries + 4;

    Writer w;
    w.buf.push_back('I');
    w.buf.push_back('I');
    w.u16(42);
    w.u32(8);
    for (std::size_t t = 0; t < s.nt; ++t) {
        const auto ifd = static_cast<std::uint32_t>(w.buf.size());
        const std::uint32_t data = ifd + kIfdBytes;
        const bool last = t + 1 == s.nt;
        w.u16(kEntries);
        w.entry(kWidth, kLong, static_cast<std::uint32_t>(s.nx));
        w.entry(kHeight, kLong, static_cast<std::uint32_t>(s.ny));
        w.entry(kBitsPerSample, kShort, 32);
        w.entry(kCompression, kShort, 1);
        w.entry(kPhotometric, kShort, 1);
        w.entry(kStripOffsets, kLong, data);
        w.entry(kSamplesPerPixel, kShort, 1);
        w.entry(kRowsPerStrip, kLong, static_cast<std::uint32_t>(s.ny));
        w.entry(kStripByteCounts, kLong, page_bytes);
        w.entry(kPlanarConfig, kShort, 1);
        w.entry(kSampleFormat, kShort, 3);
        w.u32(last ? 0 : data + page_bytes);
        for (double x : v.frame_values(t)) w.u32(std::bit_cast<std::uint32_t>(static_cast<float>(x)));
    }
    return std::move(w.buf);
}

Volume2DT decode_tiff(std::span<const std::uint8_t> bytes) {
    const Reader r(bytes);
    std::vector<Page> pages;
    std::size_t ifd = r.u32(4);
    while (ifd != 0) {
        if (pages.size() > 1'000'000) throw TiffError("TIFF: IFD chain does not terminate");
        std::size_t next = 0;
        pages.push_back(read_page(r, ifd, next));
        if (pages.back().width != pages.front().width || pages.back().height != pages.front().height) {
            throw TiffError("TIFF: pages differ in size");
        }
        ifd = next;
    }
    if (pages.empty()) throw TiffError("TIFF: no pages");
    Volume2DT v(Shape{pages[0].width, pages[0].height, pages.size()});
    for (std::size_t t = 0; t < pages.size(); ++t) {
        auto dst = v.frame_values(t);
        std::copy(pages[t].samples.begin(), pages[t].samples.end(), dst.begin());
    }
    return v;
}

void write_tiff(const std::filesystem::path& path, const Volume2DT& v) {
    const auto bytes = encode_tiff(v);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw TiffError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw TiffError("write to '" + path.string() + "' failed");
}

Volume2DT read_tiff(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TiffError("cannot open '" + path.string() + "'");
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_tiff(bytes);
}

}  // namespace pstaic
