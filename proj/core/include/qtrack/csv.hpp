#ifndef QTRACK_CSV_HPP
#define QTRACK_CSV_HPP

#include <cstdint>
#include <fstream>
#include <string>

namespace qtrack {

// Deterministic numeric formatting ("%.12g") so identical runs produce
// byte-identical files.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    (write_field(to_field(fields), first), ...);
    out_ << '\n';
  }

  void close();

 private:
  static std::string to_field(const std::string& s) { return s; }
  static std::string to_field(const char* s) { return s; }
  static std::string to_field(double v) { return format_double(v); }
  static std::string to_field(int v) { return std::to_string(v); }
  static std::string to_field(long v) { return std::to_string(v); }
  static std::string to_field(std::uint64_t v) { return std::to_string(v); }

  void write_field(const std::string& field, bool& first);

  std::ofstream out_;
};

}  // namespace qtrack

#endif  // QTRACK_CSV_HPP
