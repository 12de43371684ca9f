#include "qtrack/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace qtrack {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open for writing: " + path);
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::write_field(const std::string& field, bool& first) {
  if (!first) out_ << ',';
  first = false;
  out_ << field;
}

void CsvWriter::close() { out_.close(); }

}  // namespace qtrack
