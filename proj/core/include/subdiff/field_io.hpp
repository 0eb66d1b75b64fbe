#pragma once

#include <filesystem>
#include <iosfwd>

#include "subdiff/fracpde.hpp"

namespace subdiff::field_io {

// CSV: header "t,x,value", one row per (n, m) in slice-major order, values
// printed with 17 significant digits so that the text round-trips exactly.
void write_csv(std::ostream& out, const fracpde::FieldOnGrid& field);
fracpde::FieldOnGrid read_csv(std::istream& in);

// Binary layout, all little-endian:
//   char[4]  magic "SDFG"
//   uint32   version (1)
//   uint64   time nodes NT+1
//   uint64   space points M
//   float64  time step
//   float64  half width L
//   float64  values[(NT+1) * M], slice-major
void write_binary(std::ostream& out, const fracpde::FieldOnGrid& field);
fracpde::FieldOnGrid read_binary(std::istream& in);

void save(const std::filesystem::path& path, const fracpde::FieldOnGrid& field);
// Format chosen by extension: ".csv" is text, anything else binary.
fracpde::FieldOnGrid load(const std::filesystem::path& path);

}  // namespace subdiff::field_io
