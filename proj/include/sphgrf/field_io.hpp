#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sphgrf/grid.hpp"

namespace sphgrf {

/// Shortest decimal string that round-trips to the same double.
[[nodiscard]] std::string format_double(double v);

/// CSV with header "theta,phi,value", one row per grid point (row-major).
void write_field_csv(const FieldSample& field, const std::filesystem::path& path);

/// Binary layout, little-endian:
///   bytes 0..7   magic "SGRF1\0\0\0"
///   bytes 8..15  N_theta (uint64)
///   bytes 16..23 N_phi   (uint64)
///   then N_theta * N_phi IEEE-754 doubles, row-major in (theta, phi).
void write_field_binary(const FieldSample& field, const std::filesystem::path& path);

struct RawField {
    std::uint64_t n_theta = 0;
    std::uint64_t n_phi = 0;
    std::vector<double> values;
};

[[nodiscard]] RawField read_field_binary(const std::filesystem::path& path);

}  // namespace sphgrf
