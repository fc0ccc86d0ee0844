#pragma once

#include <string>

#include "crimescope/core.hpp"

namespace crimescope::io {

// Minimal NumPy .npy v1.0 writers/readers (little-endian, Fortran order,
// matching Eigen's column-major layout).
void save_npy(const std::string& path, const core::CArray& a);   // <c16
void save_npy(const std::string& path, const core::RArray& a);   // <f8
void save_npy(const std::string& path, const core::BArray& a);   // |u1
core::CArray load_npy_complex(const std::string& path);
core::RArray load_npy_real(const std::string& path);
core::BArray load_npy_u8(const std::string& path);

// Grayscale PNG writers. Values are clipped to [0, 1] and scaled to the full
// bit depth.
void write_png16(const std::string& path, const core::RArray& img01);
void write_png8_mask(const std::string& path, const core::BArray& mask);

std::string sha256_hex(const std::string& data);

void ensure_directory(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace crimescope::io
