#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "subdiff/errors.hpp"
#include "subdiff/field_io.hpp"

namespace subdiff::field_io {

using fracpde::FieldOnGrid;
using fracpde::SpaceGrid;
using fracpde::TimeGrid;

namespace {

constexpr std::array<char, 4> kMagic{'S', 'D', 'F', 'G'};
constexpr std::uint32_t kVersion = 1;

void append_double(std::string& line, double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  (void)ec;
  line.append(buf.data(), end);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw PreconditionError("field csv: cannot parse number '" + std::string(s) + "'");
  return v;
}

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
    throw PreconditionError("field binary: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_csv(std::ostream& out, const FieldOnGrid& field) {
  out << "t,x,value\n";
  std::string line;
  for (std::size_t n = 0; n < field.time().nodes(); ++n) {
    const auto s = field.slice(n);
    for (std::size_t m = 0; m < s.size(); ++m) {
      line.clear();
      append_double(line, field.time().t(n));
      line.push_back(',');
      append_double(line, field.space().x(m));
      line.push_back(',');
      append_double(line, s[m]);
      line.push_back('\n');
      out << line;
    }
  }
}

FieldOnGrid read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,x,value")
    throw PreconditionError("field csv: missing 't,x,value' header");
  std::vector<double> ts, xs, vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw PreconditionError("field csv: expected three columns");
    const std::string_view view(line);
    ts.push_back(parse_double(view.substr(0, c1)));
    xs.push_back(parse_double(view.substr(c1 + 1, c2 - c1 - 1)));
    vs.push_back(parse_double(view.substr(c2 + 1)));
  }
  if (vs.empty()) throw PreconditionError("field csv: no data rows");
  std::size_t points = 1;
  while (points < ts.size() && ts[points] == ts[0]) ++points;
  if (vs.size() % points != 0) throw PreconditionError("field csv: ragged slices");
  const std::size_t slices = vs.size() / points;
  if (points < 2 || slices < 2) throw PreconditionError("field csv: need at least a 2 x 2 grid");
  const double dx = xs[1] - xs[0];
  const double half_width = -xs[0];
  const double dt = ts[points] - ts[0];
  if (std::abs(half_width * 2.0 - dx * static_cast<double>(points)) > 1e-9 * half_width)
    throw PreconditionError("field csv: x column is not a periodic grid on [-L, L)");
  FieldOnGrid field(TimeGrid{dt, slices - 1}, SpaceGrid{half_width, points});
  field.values() = std::move(vs);
  return field;
}

void write_binary(std::ostream& out, const FieldOnGrid& field) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint64_t>(out, field.time().nodes());
  put_le<std::uint64_t>(out, field.space().points);
  put_le<double>(out, field.time().step);
  put_le<double>(out, field.space().half_width);
  for (double v : field.values()) put_le<double>(out, v);
}

FieldOnGrid read_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw PreconditionError("field binary: bad magic");
  if (get_le<std::uint32_t>(in) != kVersion) throw UnsupportedError("field binary: unknown version");
  const auto nodes = get_le<std::uint64_t>(in);
  const auto points = get_le<std::uint64_t>(in);
  const double dt = get_le<double>(in);
  const double half_width = get_le<double>(in);
  if (nodes == 0 || points == 0) throw PreconditionError("field binary: empty grid");
  FieldOnGrid field(TimeGrid{dt, nodes - 1}, SpaceGrid{half_width, points});
  for (double& v : field.values()) v = get_le<double>(in);
  return field;
}

void save(const std::filesystem::path& path, const FieldOnGrid& field) {
  const bool csv = path.extension() == ".csv";
  std::ofstream out(path, csv ? std::ios::out : std::ios::out | std::ios::binary);
  if (!out) throw ResourceError("cannot open " + path.string() + " for writing");
  if (csv)
    write_csv(out, field);
  else
    write_binary(out, field);
  if (!out) throw ResourceError("write failed: " + path.string());
}

FieldOnGrid load(const std::filesystem::path& path) {
  const bool csv = path.extension() == ".csv";
  std::ifstream in(path, csv ? std::ios::in : std::ios::in | std::ios::binary);
  if (!in) throw ResourceError("cannot open " + path.string());
  return csv ? read_csv(in) : read_binary(in);
}

}  // namespace subdiff::field_io
