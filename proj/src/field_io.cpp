#include "modlab/field_io.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace modlab {

static_assert(std::endian::native == std::endian::little, "field format assumes a little-endian host");

namespace {
template <class T>
void put(std::ofstream& out, T v)
{
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in)
{
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error("truncated field file");
    return v;
}
}  // namespace

void write_field(const ScalarField& f, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out.write("RMLF", 4);
    put<std::uint32_t>(out, kFieldFormatVersion);
    put<std::uint32_t>(out, f.grid().dim);
    put<std::uint32_t>(out, f.grid().n);
    put<double>(out, f.grid().length);
    out.write(reinterpret_cast<const char*>(f.values().data()),
              static_cast<std::streamsize>(f.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

ScalarField read_field(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "RMLF", 4) != 0) throw std::runtime_error("bad field magic in " + path.string());
    if (get<std::uint32_t>(in) != kFieldFormatVersion) throw std::runtime_error("unsupported field version");
    GridSpec g;
    g.dim = static_cast<int>(get<std::uint32_t>(in));
    g.n = static_cast<int>(get<std::uint32_t>(in));
    g.length = get<double>(in);
    g.validate();
    std::vector<double> values(g.size());
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated field file");
    return ScalarField(g, std::move(values));
}

void write_field_csv(const ScalarField& f, const std::filesystem::path& path)
{
    auto out = fmt::output_file(path.string());
    const auto& g = f.grid();
    for (int a = 0; a < g.dim; ++a) out.print("i{},", a);
    out.print("value\n");
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto idx = multi_index(g, i);
        for (int a = 0; a < g.dim; ++a) out.print("{},", idx[a]);
        out.print("{:.17g}\n", f[i]);
    }
}

}  // namespace modlab
