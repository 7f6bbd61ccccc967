#include "stmd/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "stmd/errors.hpp"

namespace stmd {

namespace fs = std::filesystem;

std::string encode_pgm(const Grid2D& frame) {
    std::string out = "P5\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n255\n";
    const std::size_t header = out.size();
    out.resize(header + frame.size());
    auto values = frame.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const float v = std::clamp(values[i], 0.0f, 1.0f);
        out[header + i] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0f)));
    }
    return out;
}

void write_pgm(const fs::path& path, const Grid2D& frame) { write_file_atomic(path, encode_pgm(frame)); }

namespace {

// Next whitespace-delimited header token, skipping # comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

}  // namespace

Grid2D read_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open frame " + path.string());
    const std::string magic = pgm_token(in);
    if (magic != "P5" && magic != "P2") throw IoError("frame " + path.string() + " is not a PGM (P5/P2)");
    std::size_t width = 0, height = 0, maxval = 0;
    try {
        width = std::stoul(pgm_token(in));
        height = std::stoul(pgm_token(in));
        maxval = std::stoul(pgm_token(in));
    } catch (const std::exception&) {
        throw IoError("frame " + path.string() + " has a malformed PGM header");
    }
    if (width == 0 || height == 0 || maxval == 0 || maxval > 255) {
        throw IoError("frame " + path.string() + " must be 8-bit grayscale");
    }
    std::vector<float> values(width * height);
    const float scale = 1.0f / static_cast<float>(maxval);
    if (magic == "P5") {
        std::vector<unsigned char> raw(values.size());
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw IoError("frame " + path.string() + " is truncated");
        for (std::size_t i = 0; i < raw.size(); ++i) values[i] = static_cast<float>(raw[i]) * scale;
    } else {
        for (float& v : values) {
            const std::string tok = pgm_token(in);
            if (tok.empty()) throw IoError("frame " + path.string() + " is truncated");
            v = static_cast<float>(std::stoul(tok)) * scale;
        }
    }
    return Grid2D::from_values(height, width, std::move(values));
}

Grid2D read_png(const fs::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
        throw IoError("cannot read PNG frame " + path.string() + ": " + image.message);
    }
    image.format = PNG_FORMAT_GRAY;
    std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        png_image_free(&image);
        throw IoError("cannot decode PNG frame " + path.string() + ": " + image.message);
    }
    std::vector<float> values(buffer.size());
    for (std::size_t i = 0; i < buffer.size(); ++i) values[i] = static_cast<float>(buffer[i]) / 255.0f;
    return Grid2D::from_values(image.height, image.width, std::move(values));
}

Grid2D read_frame(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm") return read_pgm(path);
    if (ext == ".png") return read_png(path);
    throw IoError("unsupported frame format " + path.string());
}

std::vector<fs::path> list_frames(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("frame directory " + dir.string() + " does not exist");
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".pgm" || ext == ".png") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });
    return out;
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace stmd
