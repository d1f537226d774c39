#include "sphgrf/field_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "sphgrf/errors.hpp"

namespace sphgrf {

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'G', 'R', 'F', '1', '\0', '\0', '\0'};

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<unsigned char, 8> b{};
    for (int k = 0; k < 8; ++k) b[static_cast<std::size_t>(k)] = static_cast<unsigned char>(v >> (8 * k));
    out.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | p[k];
    return v;
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void write_field_csv(const FieldSample& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string());
    out << "theta,phi,value\n";
    const auto& g = field.grid;
    for (int i = 0; i < g.n_theta(); ++i) {
        const std::string th = format_double(g.thetas()[static_cast<std::size_t>(i)]);
        for (int j = 0; j < g.n_phi(); ++j) {
            out << th << ',' << format_double(g.phis()[static_cast<std::size_t>(j)]) << ','
                << format_double(field.at(i, j)) << '\n';
        }
    }
    if (!out) throw IoError("failed writing " + path.string());
}

void write_field_binary(const FieldSample& field, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string());
    out.write(kMagic.data(), kMagic.size());
    put_u64(out, static_cast<std::uint64_t>(field.grid.n_theta()));
    put_u64(out, static_cast<std::uint64_t>(field.grid.n_phi()));
    for (double v : field.values) put_u64(out, std::bit_cast<std::uint64_t>(v));
    if (!out) throw IoError("failed writing " + path.string());
}

RawField read_field_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::array<unsigned char, 24> header{};
    if (!in.read(reinterpret_cast<char*>(header.data()), header.size())) {
        throw IoError("truncated header in " + path.string());
    }
    if (std::memcmp(header.data(), kMagic.data(), 5) != 0) {
        throw IoError("bad magic in " + path.string());
    }
    RawField f;
    f.n_theta = get_u64(header.data() + 8);
    f.n_phi = get_u64(header.data() + 16);
    f.values.resize(f.n_theta * f.n_phi);
    std::array<unsigned char, 8> b{};
    for (double& v : f.values) {
        if (!in.read(reinterpret_cast<char*>(b.data()), 8)) {
            throw IoError("truncated data in " + path.string());
        }
        v = std::bit_cast<double>(get_u64(b.data()));
    }
    return f;
}

}  // namespace sphgrf
