#pragma once

#include <filesystem>

#include "modlab/grid.hpp"

namespace modlab {

// Binary layout: "RMLF", u32 version, u32 d, u32 n, f64 L, then n^d f64 values
// in row-major order; all little-endian.
inline constexpr std::uint32_t kFieldFormatVersion = 1;

void write_field(const ScalarField& f, const std::filesystem::path& path);
ScalarField read_field(const std::filesystem::path& path);

/// One row per point: i0,...,i{d-1},value.
void write_field_csv(const ScalarField& f, const std::filesystem::path& path);

}  // namespace modlab
