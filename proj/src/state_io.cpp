#include "kglri/state_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace kglri {

namespace {

constexpr char kMagic[8] = {'K', 'G', 'L', 'R', 'I', 'S', 'T', '1'};
constexpr std::uint32_t kFormatVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

double read_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_field(std::ostream& os, const SpectralField& f) {
  for (const auto& z : f.coeffs) {
    write_f64(os, z.real());
    write_f64(os, z.imag());
  }
}

void read_field(std::istream& is, SpectralField& f) {
  for (auto& z : f.coeffs) {
    double re = read_f64(is);
    double im = read_f64(is);
    z = {re, im};
  }
}

}  // namespace

void write_state(const std::string& path, const State& state, double rho) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_state: cannot open " + path);
  os.write(kMagic, sizeof(kMagic));
  write_u32(os, kFormatVersion);
  write_u32(os, static_cast<std::uint32_t>(state.u.grid.dim));
  write_u32(os, static_cast<std::uint32_t>(state.u.grid.n));
  write_u32(os, 0);
  write_f64(os, state.u.grid.a);
  write_f64(os, state.u.grid.b);
  write_f64(os, rho);
  write_f64(os, state.t);
  write_field(os, state.u);
  write_field(os, state.v);
  if (!os) throw std::runtime_error("write_state: write failed for " + path);
}

LoadedState read_state(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_state: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("read_state: bad magic in " + path);
  std::uint32_t version = read_u32(is);
  if (version != kFormatVersion)
    throw std::runtime_error("read_state: unsupported format version " +
                             std::to_string(version));
  int dim = static_cast<int>(read_u32(is));
  int n = static_cast<int>(read_u32(is));
  read_u32(is);  // reserved
  double a = read_f64(is);
  double b = read_f64(is);
  LoadedState out;
  out.rho = read_f64(is);
  out.state.t = read_f64(is);
  TorusGrid grid = make_grid(dim, n, a, b);
  out.state.u = SpectralField(grid);
  out.state.v = SpectralField(grid);
  read_field(is, out.state.u);
  read_field(is, out.state.v);
  if (!is) throw std::runtime_error("read_state: truncated file " + path);
  return out;
}

}  // namespace kglri
