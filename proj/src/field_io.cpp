#include "hesc/field_io.hpp"

#include "hesc/error.hpp"
#include "hesc/text.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hesc {
namespace {

using text::format_number;

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

void put_le(std::string& buf, double value) {
  const auto bits = std::bit_cast<std::uint64_t>(value);
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

double get_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= std::uint64_t(p[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

void write_qf2d1(int n, double length, Representation kind, const std::vector<cplx>& samples,
                 const std::filesystem::path& path) {
  std::string buf = "QF2D1 n=" + std::to_string(n) + " L=" + format_number(length) +
                    " kind=" + (kind == Representation::position ? "position" : "momentum") + "\n";
  buf.reserve(buf.size() + samples.size() * 16);
  for (const cplx& a : samples) {
    put_le(buf, a.real());
    put_le(buf, a.imag());
  }
  auto out = open_out(path, true);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish(out, path);
}

}  // namespace

void write_field(const WavePacket& field, const std::filesystem::path& path) {
  write_qf2d1(field.grid().n(), field.grid().length(), field.representation(),
              {field.samples().begin(), field.samples().end()}, path);
}

void write_field(const ReconField& field, const std::filesystem::path& path) {
  std::vector<cplx> samples(field.values.begin(), field.values.end());
  write_qf2d1(field.M, 2.0 * field.half_width, Representation::position, samples, path);
}

void write_field(const Grid2D& grid, const std::vector<double>& values, const std::filesystem::path& path) {
  if (values.size() != grid.size()) throw InvalidArgument("field size does not match grid");
  write_qf2d1(grid.n(), grid.length(), Representation::position, {values.begin(), values.end()}, path);
}

WavePacket read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  if (!in || header.size() > 256) throw IoError(path.string() + ": missing QF2D1 header");
  const auto words = text::split_whitespace(header);
  if (words.size() != 4 || words[0] != "QF2D1") throw IoError(path.string() + ": bad magic, not a QF2D1 file");

  auto field = [&](std::string_view word, std::string_view key) -> std::string_view {
    if (word.substr(0, key.size()) != key) throw IoError(path.string() + ": malformed header field '" + std::string(word) + "'");
    return word.substr(key.size());
  };
  const auto n = text::parse_int(field(words[1], "n="));
  const auto length = text::parse_double(field(words[2], "L="));
  const auto kind = field(words[3], "kind=");
  if (!n || !length || (kind != "position" && kind != "momentum"))
    throw IoError(path.string() + ": malformed QF2D1 header");

  Grid2D grid = [&] {
    try {
      return Grid2D(static_cast<int>(*n), *length);
    } catch (const Error& e) {
      throw IoError(path.string() + ": " + e.what());
    }
  }();

  const std::size_t bytes = grid.size() * 16;
  std::string raw(bytes, '\0');
  in.read(raw.data(), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) throw IoError(path.string() + ": truncated sample data");
  if (in.peek() != std::char_traits<char>::eof()) throw IoError(path.string() + ": trailing bytes after samples");

  std::vector<cplx> samples(grid.size());
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = {get_le(p + 16 * i), get_le(p + 16 * i + 8)};
  return WavePacket(grid, kind == "position" ? Representation::position : Representation::momentum,
                    std::move(samples));
}

void write_sinogram(const Sinogram& sino, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "# sinogram K=" << sino.K() << " J=" << sino.J() << " smax=" << format_number(sino.s_max())
     << " provenance=" << to_string(sino.provenance) << "\n";
  for (int k = 0; k < sino.K(); ++k)
    for (int j = 0; j < sino.J(); ++j)
      os << k << ',' << format_number(sino.angles[k]) << ',' << format_number(sino.offsets[j]) << ','
         << format_number(sino.at(k, j)) << ',' << int(sino.flags[std::size_t(k) * sino.J() + j]) << "\n";
  auto out = open_out(path, false);
  out << os.str();
  finish(out, path);
}

Sinogram read_sinogram(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  const auto words = text::split_whitespace(line);
  if (words.size() != 6 || words[0] != "#" || words[1] != "sinogram")
    throw IoError(path.string() + ": not a sinogram file");
  auto value = [&](std::string_view word, std::string_view key) {
    if (word.substr(0, key.size()) != key) throw IoError(path.string() + ": malformed sinogram header");
    return word.substr(key.size());
  };
  const auto K = text::parse_int(value(words[2], "K="));
  const auto J = text::parse_int(value(words[3], "J="));
  const auto smax = text::parse_double(value(words[4], "smax="));
  if (!K || !J || !smax) throw IoError(path.string() + ": malformed sinogram header");
  Sinogram s;
  try {
    s = Sinogram::layout(static_cast<int>(*K), static_cast<int>(*J), *smax, parse_provenance(value(words[5], "provenance=")));
  } catch (const Error& e) {
    throw IoError(path.string() + ": " + e.what());
  }

  long long rows = 0;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    const auto cols = text::split(line, ',');
    if (cols.size() != 5) throw IoError(path.string() + ": sinogram row needs 5 columns");
    const auto k = text::parse_int(cols[0]);
    const auto a = text::parse_double(cols[1]);
    const auto off = text::parse_double(cols[2]);
    const auto v = text::parse_double(cols[3]);
    const auto f = text::parse_int(cols[4]);
    if (!k || !a || !off || !v || !f || *k < 0 || *k >= *K) throw IoError(path.string() + ": malformed sinogram row");
    const long long j = rows % *J;
    if (*k != rows / *J) throw IoError(path.string() + ": sinogram rows out of order");
    s.angles[*k] = *a;
    s.offsets[j] = *off;
    s.at(static_cast<int>(*k), static_cast<int>(j)) = *v;
    s.flags[rows] = static_cast<std::uint8_t>(*f);
    ++rows;
  }
  if (rows != *K * *J) throw IoError(path.string() + ": expected " + std::to_string(*K * *J) + " sinogram rows");
  return s;
}

void write_scattering_csv(const std::vector<ScatteringResult>& results, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "pbar_x,pbar_y,re_element,im_element,converged,r_final\n";
  for (const auto& r : results)
    os << format_number(r.boost.pbar.x) << ',' << format_number(r.boost.pbar.y) << ','
       << format_number(r.element.real()) << ',' << format_number(r.element.imag()) << ',' << (r.converged ? 1 : 0)
       << ',' << format_number(r.r_final) << "\n";
  auto out = open_out(path, false);
  out << os.str();
  finish(out, path);
}

void emit_plotdata(const std::vector<LimitEntry>& scan, const std::filesystem::path& path) {
  if (scan.empty()) throw InvalidArgument("empty scan");
  std::ostringstream os;
  os << "# pbar: boost magnitude (hbar = 1); value, oracle: complex scan value and its reference in units of "
        "energy x length; delta = |value - oracle|\n";
  os << "pbar,value_re,value_im,oracle_re,oracle_im,delta\n";
  for (const auto& e : scan)
    os << format_number(norm(e.pbar)) << ',' << format_number(e.value.real()) << ','
       << format_number(e.value.imag()) << ',' << format_number(e.oracle.real()) << ','
       << format_number(e.oracle.imag()) << ',' << format_number(e.delta) << "\n";
  auto out = open_out(path, false);
  out << os.str();
  finish(out, path);
}

void emit_plotdata(const Sinogram& sino, const std::filesystem::path& path) {
  if (sino.values.empty()) throw InvalidArgument("empty sinogram");
  write_sinogram(sino, path);
}

}  // namespace hesc
