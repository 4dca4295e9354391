#include "flowsal/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

namespace flowsal {

namespace {

constexpr float kFloMagic = 202021.25f;
// allocation guard against crafted headers: 64M px ~ 1 GiB of flow data
constexpr std::int64_t kMaxPixels = std::int64_t{1} << 26;

void put_le32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32(std::string& out, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    put_le32(out, v);
}

std::uint32_t get_le32(const std::string& buf, std::size_t off) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + 1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + 2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + 3])) << 24;
}

float get_f32(const std::string& buf, std::size_t off) {
    std::uint32_t v = get_le32(buf, off);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputUnreadable("cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return buf;
}

void spill(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("short write to " + path.string());
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

}  // namespace

VectorField2 read_flo(const std::filesystem::path& path) {
    const std::string buf = slurp(path);
    const std::string name = path.string();
    if (buf.size() < 4) throw TruncatedFile(name, buf.size(), "missing magic");
    if (get_f32(buf, 0) != kFloMagic) throw BadMagic(name, 0, "not a .flo file");
    if (buf.size() < 12) throw TruncatedFile(name, buf.size(), "missing dimensions");
    const std::int32_t w = static_cast<std::int32_t>(get_le32(buf, 4));
    const std::int32_t h = static_cast<std::int32_t>(get_le32(buf, 8));
    if (w < 2 || h < 2 || static_cast<std::int64_t>(w) * h > kMaxPixels) {
        throw DimensionMismatch(name, 4,
                                "implausible dimensions " + std::to_string(w) + "x" +
                                    std::to_string(h));
    }
    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    const std::size_t need = 12 + count * 8;
    if (buf.size() < need) {
        throw TruncatedFile(name, buf.size(),
                            "payload holds " + std::to_string((buf.size() - 12) / 8) + " of " +
                                std::to_string(count) + " pixels");
    }
    std::vector<double> u(count), v(count);
    for (std::size_t i = 0; i < count; ++i) {
        u[i] = static_cast<double>(get_f32(buf, 12 + i * 8));
        v[i] = static_cast<double>(get_f32(buf, 12 + i * 8 + 4));
    }
    VectorField2 field(GridShape{w, h}, std::move(u), std::move(v));
    if (!field.all_finite()) {
        throw NumericError("non-finite flow values in " + name);
    }
    return field;
}

void write_flo(const VectorField2& field, const std::filesystem::path& path) {
    const GridShape& s = field.shape();
    std::string out;
    out.reserve(12 + static_cast<std::size_t>(s.count()) * 8);
    put_f32(out, kFloMagic);
    put_le32(out, static_cast<std::uint32_t>(s.width));
    put_le32(out, static_cast<std::uint32_t>(s.height));
    for (int i = 0; i < s.count(); ++i) {
        put_f32(out, static_cast<float>(field.u()[static_cast<std::size_t>(i)]));
        put_f32(out, static_cast<float>(field.v()[static_cast<std::size_t>(i)]));
    }
    spill(path, out);
}

namespace {

// PNM header tokenizer: skips whitespace and # comments, tracks byte offset.
struct PnmCursor {
    const std::string& buf;
    const std::string name;
    std::size_t pos = 0;

    void skip_space() {
        while (pos < buf.size()) {
            const char c = buf[pos];
            if (c == '#') {
                while (pos < buf.size() && buf[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos;
            } else {
                break;
            }
        }
    }

    int next_int() {
        skip_space();
        const std::size_t start = pos;
        while (pos < buf.size() && buf[pos] >= '0' && buf[pos] <= '9') ++pos;
        if (pos == start) throw FormatError(name, start, "expected integer in PNM header");
        int value = 0;
        std::from_chars(buf.data() + start, buf.data() + pos, value);
        return value;
    }
};

}  // namespace

std::vector<std::uint8_t> read_pgm_bytes(const std::filesystem::path& path, GridShape& shape) {
    const std::string buf = slurp(path);
    const std::string name = path.string();
    if (buf.size() < 2) throw TruncatedFile(name, buf.size(), "missing PNM signature");
    const char p = buf[0], kind = buf[1];
    if (p != 'P' || (kind != '2' && kind != '3' && kind != '5' && kind != '6')) {
        throw BadMagic(name, 0, "not a supported PNM file (P2/P3/P5/P6)");
    }
    const bool binary = kind == '5' || kind == '6';
    const bool color = kind == '3' || kind == '6';
    PnmCursor cur{buf, name, 2};
    const int w = cur.next_int();
    const int h = cur.next_int();
    const int maxval = cur.next_int();
    if (w < 2 || h < 2 || static_cast<std::int64_t>(w) * h > kMaxPixels) {
        throw DimensionMismatch(name, 2, "implausible frame dimensions");
    }
    if (maxval <= 0 || maxval > 255) {
        throw FormatError(name, cur.pos, "only 8-bit PNM samples are supported");
    }
    const std::size_t channels = color ? 3 : 1;
    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    std::vector<std::uint8_t> raw(count * channels);
    if (binary) {
        ++cur.pos;  // single whitespace byte after maxval
        if (buf.size() < cur.pos + raw.size()) {
            throw TruncatedFile(name, buf.size(), "pixel payload short");
        }
        std::memcpy(raw.data(), buf.data() + cur.pos, raw.size());
    } else {
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const int v = cur.next_int();
            if (v < 0 || v > maxval) throw FormatError(name, cur.pos, "sample out of range");
            raw[i] = static_cast<std::uint8_t>(v);
        }
    }
    shape = GridShape{w, h};
    if (!color) {
        if (maxval != 255) {
            for (auto& b : raw) {
                b = static_cast<std::uint8_t>(std::lround(b * 255.0 / maxval));
            }
        }
        return raw;
    }
    std::vector<std::uint8_t> gray(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double r = raw[i * 3] * 255.0 / maxval;
        const double g = raw[i * 3 + 1] * 255.0 / maxval;
        const double b = raw[i * 3 + 2] * 255.0 / maxval;
        gray[i] = static_cast<std::uint8_t>(std::lround(0.299 * r + 0.587 * g + 0.114 * b));
    }
    return gray;
}

Frame read_frame(const std::filesystem::path& path) {
    GridShape shape;
    const std::vector<std::uint8_t> gray = read_pgm_bytes(path, shape);
    std::vector<double> intensity(gray.size());
    for (std::size_t i = 0; i < gray.size(); ++i) intensity[i] = gray[i] / 255.0;
    return Frame(shape, std::move(intensity));
}

void write_pgm(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes,
               GridShape shape) {
    if (bytes.size() != static_cast<std::size_t>(shape.count())) {
        throw ConfigError("pgm byte count does not match shape");
    }
    std::string out = "P5\n" + std::to_string(shape.width) + " " +
                      std::to_string(shape.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    spill(path, out);
}

void write_heatmap(const ScalarField& field, const std::filesystem::path& path) {
    if (!field.all_finite()) throw NumericError("heatmap input contains non-finite values");
    const double lo = field.min_value();
    const double hi = field.max_value();
    const double range = hi - lo;
    std::vector<std::uint8_t> bytes(field.values().size());
    if (range < 1e-300) {
        std::fill(bytes.begin(), bytes.end(), static_cast<std::uint8_t>(128));
    } else {
        for (std::size_t i = 0; i < bytes.size(); ++i) {
            const double t = (field.values()[i] - lo) / range;
            bytes[i] = static_cast<std::uint8_t>(std::lround(t * 255.0));
        }
    }
    write_pgm(path, bytes, field.shape());
    spill(std::filesystem::path(path.string() + ".range.txt"),
          "min " + format_double(lo) + "\nmax " + format_double(hi) + "\n");
}

void write_mask(const ScalarField& mask, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(mask.values().size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        bytes[i] = mask.values()[i] != 0.0 ? 255 : 0;
    }
    write_pgm(path, bytes, mask.shape());
}

void write_pfm(const ScalarField& field, const std::filesystem::path& path) {
    const GridShape& s = field.shape();
    std::string out = "Pf\n" + std::to_string(s.width) + " " + std::to_string(s.height) +
                      "\n-1.0\n";
    for (int y = s.height - 1; y >= 0; --y) {
        for (int x = 0; x < s.width; ++x) {
            put_f32(out, static_cast<float>(field.at(x, y)));
        }
    }
    spill(path, out);
}

std::vector<std::filesystem::path> list_files_sorted(
    const std::filesystem::path& dir, std::initializer_list<const char*> extensions) {
    if (!std::filesystem::is_directory(dir)) {
        throw InputUnreadable("input directory not found: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        for (const char* want : extensions) {
            if (ext == want) {
                files.push_back(entry.path());
                break;
            }
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

ScalarField read_pfm(const std::filesystem::path& path) {
    const std::string buf = slurp(path);
    const std::string name = path.string();
    if (buf.size() < 2 || buf[0] != 'P' || buf[1] != 'f') {
        throw BadMagic(name, 0, "not a grayscale PFM file");
    }
    PnmCursor cur{buf, name, 2};
    const int w = cur.next_int();
    const int h = cur.next_int();
    if (w < 2 || h < 2 || static_cast<std::int64_t>(w) * h > kMaxPixels) {
        throw DimensionMismatch(name, 2, "implausible map dimensions");
    }
    cur.skip_space();
    // scale line (sign encodes endianness; only little-endian is written)
    std::size_t end = buf.find('\n', cur.pos);
    if (end == std::string::npos) throw TruncatedFile(name, cur.pos, "missing scale line");
    const double scale = std::stod(buf.substr(cur.pos, end - cur.pos));
    if (scale >= 0) throw FormatError(name, cur.pos, "big-endian PFM is not supported");
    cur.pos = end + 1;
    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (buf.size() < cur.pos + count * 4) {
        throw TruncatedFile(name, buf.size(), "pixel payload short");
    }
    ScalarField field(GridShape{w, h});
    for (int y = h - 1; y >= 0; --y) {
        for (int x = 0; x < w; ++x) {
            field.at(x, y) = static_cast<double>(get_f32(buf, cur.pos));
            cur.pos += 4;
        }
    }
    return field;
}

}  // namespace flowsal
