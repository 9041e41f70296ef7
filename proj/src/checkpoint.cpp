#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "cnls/error.hpp"
#include "cnls/evolution.hpp"

namespace cnls {
namespace {

constexpr std::array<char, 4> kMagic{'C', 'N', 'L', 'S'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 1 + 4 + 8 + 8 + 1;

template <typename U>
void put_le(std::vector<char>& out, U value) {
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    out.push_back(static_cast<char>((value >> (8 * b)) & 0xff));
  }
}

void put_f64(std::vector<char>& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

template <typename U>
U get_le(const char* p) {
  U value = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    value |= static_cast<U>(static_cast<unsigned char>(p[b])) << (8 * b);
  }
  return value;
}

double get_f64(const char* p) { return std::bit_cast<double>(get_le<std::uint64_t>(p)); }

}  // namespace

void write_checkpoint(const std::string& path, const ComplexField& u, double t, Coupling mu) {
  require_spatial(u, "write_checkpoint");
  std::vector<char> bytes;
  bytes.reserve(kHeaderBytes + 16 * u.size());
  bytes.insert(bytes.end(), kMagic.begin(), kMagic.end());
  bytes.push_back(static_cast<char>(kVersion));
  put_le(bytes, static_cast<std::uint32_t>(u.grid().n()));
  put_f64(bytes, u.grid().box_length());
  put_f64(bytes, t);
  bytes.push_back(static_cast<char>(static_cast<std::int8_t>(mu)));
  for (const Complex& z : u.data()) {
    put_f64(bytes, z.real());
    put_f64(bytes, z.imag());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open checkpoint for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing checkpoint: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing checkpoint: " + path);
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic.data(), 4) != 0) {
    throw Error("corrupt checkpoint header: " + path);
  }
  if (static_cast<std::uint8_t>(bytes[4]) != kVersion) {
    throw Error("unsupported checkpoint version in " + path);
  }
  const auto n = get_le<std::uint32_t>(bytes.data() + 5);
  const double length = get_f64(bytes.data() + 9);
  const double t = get_f64(bytes.data() + 17);
  const auto mu = static_cast<std::int8_t>(bytes[25]);
  if (n < 2 || n > 4096 || mu < -1 || mu > 1) throw Error("corrupt checkpoint header: " + path);
  const std::size_t count = static_cast<std::size_t>(n) * n * n;
  if (bytes.size() != kHeaderBytes + 16 * count) {
    throw Error("truncated checkpoint: " + path);
  }
  Grid grid(static_cast<int>(n), length);
  ComplexField field(grid, Representation::Spatial);
  const char* p = bytes.data() + kHeaderBytes;
  for (std::size_t i = 0; i < count; ++i, p += 16) {
    field[i] = Complex(get_f64(p), get_f64(p + 8));
  }
  return Checkpoint{std::move(field), t, static_cast<Coupling>(mu)};
}

}  // namespace cnls
