#include "crimescope/io.hpp"

#include <png.h>

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace crimescope::io {

namespace {

std::string npy_header(const char* descr, Eigen::Index rows, Eigen::Index cols) {
    std::ostringstream dict;
    dict << "{'descr': '" << descr << "', 'fortran_order': True, 'shape': (" << rows << ", "
         << cols << "), }";
    std::string d = dict.str();
    const std::size_t unpadded = 10 + d.size() + 1;  // magic+ver+len + dict + '\n'
    const std::size_t total = ((unpadded + 63) / 64) * 64;
    d.append(total - unpadded, ' ');
    d.push_back('\n');

    std::string h;
    h += "\x93NUMPY";
    h += '\x01';
    h += '\x00';
    const std::uint16_t hlen = static_cast<std::uint16_t>(d.size());
    h += static_cast<char>(hlen & 0xff);
    h += static_cast<char>((hlen >> 8) & 0xff);
    h += d;
    return h;
}

void write_npy_raw(const std::string& path, const char* descr, Eigen::Index rows,
                   Eigen::Index cols, const void* data, std::size_t bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    const std::string h = npy_header(descr, rows, cols);
    f.write(h.data(), static_cast<std::streamsize>(h.size()));
    f.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!f) throw std::runtime_error("write failed: " + path);
}

struct NpyInfo {
    std::string descr;
    bool fortran = false;
    Eigen::Index rows = 0, cols = 0;
    std::vector<char> payload;
};

NpyInfo read_npy(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, "\x93NUMPY", 6) != 0)
        throw std::runtime_error(path + ": not an npy file");
    unsigned char lenb[2];
    f.read(reinterpret_cast<char*>(lenb), 2);
    const std::size_t hlen = static_cast<std::size_t>(lenb[0]) | (static_cast<std::size_t>(lenb[1]) << 8);
    std::string dict(hlen, '\0');
    f.read(dict.data(), static_cast<std::streamsize>(hlen));

    NpyInfo info;
    auto grab = [&](const std::string& key) -> std::string {
        const auto pos = dict.find(key);
        if (pos == std::string::npos) throw std::runtime_error(path + ": bad npy header");
        return dict.substr(pos + key.size());
    };
    {
        std::string rest = grab("'descr':");
        const auto q1 = rest.find('\'');
        const auto q2 = rest.find('\'', q1 + 1);
        info.descr = rest.substr(q1 + 1, q2 - q1 - 1);
    }
    info.fortran = grab("'fortran_order':").find("True") < 8;
    {
        std::string rest = grab("'shape':");
        const auto p1 = rest.find('(');
        const auto p2 = rest.find(')');
        std::string nums = rest.substr(p1 + 1, p2 - p1 - 1);
        std::replace(nums.begin(), nums.end(), ',', ' ');
        std::istringstream ss(nums);
        long long r = 0, c = 1;
        ss >> r;
        if (!(ss >> c)) c = 1;
        info.rows = static_cast<Eigen::Index>(r);
        info.cols = static_cast<Eigen::Index>(c);
    }
    info.payload.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    return info;
}

template <typename Scalar, typename Array>
Array payload_to_array(const NpyInfo& info, const std::string& path) {
    Array out(info.rows, info.cols);
    const std::size_t need = sizeof(Scalar) * static_cast<std::size_t>(info.rows * info.cols);
    if (info.payload.size() < need) throw std::runtime_error(path + ": truncated npy payload");
    const Scalar* src = reinterpret_cast<const Scalar*>(info.payload.data());
    if (info.fortran) {
        std::memcpy(out.data(), src, need);
    } else {
        for (Eigen::Index i = 0; i < info.rows; ++i)
            for (Eigen::Index j = 0; j < info.cols; ++j)
                out(i, j) = src[static_cast<std::size_t>(i * info.cols + j)];
    }
    return out;
}

}  // namespace

void save_npy(const std::string& path, const core::CArray& a) {
    write_npy_raw(path, "<c16", a.rows(), a.cols(), a.data(),
                  sizeof(core::Complex) * static_cast<std::size_t>(a.size()));
}

void save_npy(const std::string& path, const core::RArray& a) {
    write_npy_raw(path, "<f8", a.rows(), a.cols(), a.data(),
                  sizeof(double) * static_cast<std::size_t>(a.size()));
}

void save_npy(const std::string& path, const core::BArray& a) {
    write_npy_raw(path, "|u1", a.rows(), a.cols(), a.data(),
                  static_cast<std::size_t>(a.size()));
}

core::CArray load_npy_complex(const std::string& path) {
    const NpyInfo info = read_npy(path);
    if (info.descr != "<c16") throw std::runtime_error(path + ": expected <c16, got " + info.descr);
    return payload_to_array<core::Complex, core::CArray>(info, path);
}

core::RArray load_npy_real(const std::string& path) {
    const NpyInfo info = read_npy(path);
    if (info.descr != "<f8") throw std::runtime_error(path + ": expected <f8, got " + info.descr);
    return payload_to_array<double, core::RArray>(info, path);
}

core::BArray load_npy_u8(const std::string& path) {
    const NpyInfo info = read_npy(path);
    if (info.descr != "|u1") throw std::runtime_error(path + ": expected |u1, got " + info.descr);
    return payload_to_array<std::uint8_t, core::BArray>(info, path);
}

namespace {

void write_png_gray(const std::string& path, const core::RArray* img01, const core::BArray* mask) {
    const Eigen::Index h = img01 ? img01->rows() : mask->rows();
    const Eigen::Index w = img01 ? img01->cols() : mask->cols();
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("cannot write " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop pinfo = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &pinfo);
        std::fclose(fp);
        throw std::runtime_error("libpng failure writing " + path);
    }
    png_init_io(png, fp);
    const int depth = img01 ? 16 : 8;
    png_set_IHDR(png, pinfo, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), depth,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, pinfo);

    if (img01) {
        std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * 2);
        for (Eigen::Index i = 0; i < h; ++i) {
            for (Eigen::Index j = 0; j < w; ++j) {
                const double v = std::clamp((*img01)(i, j), 0.0, 1.0);
                const auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
                row[static_cast<std::size_t>(2 * j)] = static_cast<std::uint8_t>(q >> 8);
                row[static_cast<std::size_t>(2 * j + 1)] = static_cast<std::uint8_t>(q & 0xff);
            }
            png_write_row(png, row.data());
        }
    } else {
        std::vector<std::uint8_t> row(static_cast<std::size_t>(w));
        for (Eigen::Index i = 0; i < h; ++i) {
            for (Eigen::Index j = 0; j < w; ++j)
                row[static_cast<std::size_t>(j)] = (*mask)(i, j) ? 255 : 0;
            png_write_row(png, row.data());
        }
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &pinfo);
    std::fclose(fp);
}

}  // namespace

void write_png16(const std::string& path, const core::RArray& img01) {
    write_png_gray(path, &img01, nullptr);
}

void write_png8_mask(const std::string& path, const core::BArray& mask) {
    write_png_gray(path, nullptr, &mask);
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

void ensure_directory(const std::string& path) {
    std::filesystem::create_directories(path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace crimescope::io
