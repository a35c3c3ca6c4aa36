#include "magnls/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace magnls {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

struct Header {
  std::uint32_t version = 0;
  std::uint32_t cutoff = 0;
  std::uint32_t axial_points = 0;
  double axial_length = 0;
  double time = 0;
};

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw std::runtime_error("read_snapshot: truncated header in " + path);
  }
  return v;
}

Header read_header(std::ifstream& in, const std::string& path) {
  char magic[4];
  if (!in.read(magic, 4)) throw std::runtime_error("read_snapshot: cannot read " + path);
  if (std::memcmp(magic, "MNLS", 4) != 0) {
    throw std::runtime_error("read_snapshot: bad magic in " + path + " (expected MNLS)");
  }
  Header h;
  h.version = get<std::uint32_t>(in, path);
  if (h.version != snapshot_version) {
    throw std::runtime_error("read_snapshot: unsupported version " + std::to_string(h.version) +
                             " in " + path);
  }
  h.cutoff = get<std::uint32_t>(in, path);
  h.axial_points = get<std::uint32_t>(in, path);
  h.axial_length = get<double>(in, path);
  h.time = get<double>(in, path);
  return h;
}

SpectralField read_payload(std::ifstream& in, const std::string& path, const Header& h,
                           std::shared_ptr<const Discretization> disc) {
  const int modes = disc->mode_count();
  const int rows = disc->axial_points();
  std::vector<double> buf(2 * static_cast<std::size_t>(modes) * rows);
  if (!in.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(double)))) {
    throw std::runtime_error("read_snapshot: truncated payload in " + path + " (expected " +
                             std::to_string(modes) + " modes x " + std::to_string(rows) +
                             " wavenumbers)");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error("read_snapshot: trailing bytes in " + path);
  }
  Eigen::MatrixXcd data(rows, modes);
  std::size_t k = 0;
  for (int m = 0; m < modes; ++m) {
    for (int r = 0; r < rows; ++r, k += 2) data(r, m) = cplx(buf[k], buf[k + 1]);
  }
  return SpectralField(std::move(disc), Representation::modal, std::move(data), h.time);
}

}  // namespace

void write_snapshot(const SpectralField& field, const std::string& path) {
  if (field.representation() != Representation::modal) {
    throw std::invalid_argument("write_snapshot: expected a modal field");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
  out.write("MNLS", 4);
  put<std::uint32_t>(out, snapshot_version);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(field.disc().cutoff()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(field.disc().axial_points()));
  put<double>(out, field.disc().axial.length);
  put<double>(out, field.time());
  const Eigen::MatrixXcd& d = field.data();
  for (Eigen::Index m = 0; m < d.cols(); ++m) {
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
      put<double>(out, d(r, m).real());
      put<double>(out, d(r, m).imag());
    }
  }
  if (!out) throw std::runtime_error("write_snapshot: write failed for " + path);
}

SpectralField read_snapshot(const std::string& path, std::shared_ptr<const Discretization> disc) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
  const Header h = read_header(in, path);
  if (static_cast<int>(h.cutoff) != disc->cutoff() ||
      static_cast<int>(h.axial_points) != disc->axial_points() ||
      h.axial_length != disc->axial.length) {
    throw std::runtime_error("read_snapshot: " + path + " does not match the discretization");
  }
  return read_payload(in, path, h, std::move(disc));
}

SpectralField read_snapshot(const std::string& path, const PotentialSpec& potential) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
  const Header h = read_header(in, path);
  if (h.cutoff > 64 || h.axial_points > (1u << 20)) {
    throw std::runtime_error("read_snapshot: implausible header sizes in " + path);
  }
  auto disc = make_discretization(static_cast<int>(h.cutoff), 2 * static_cast<int>(h.cutoff) + 2,
                                  h.axial_length, static_cast<int>(h.axial_points), potential, 1);
  return read_payload(in, path, h, std::move(disc));
}

}  // namespace magnls
