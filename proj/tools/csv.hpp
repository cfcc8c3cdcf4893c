#ifndef VAXSIR_TOOLS_CSV_HPP
#define VAXSIR_TOOLS_CSV_HPP

#include <cstdio>
#include <stdexcept>
#include <string>

namespace cli {

/* Round-trippable decimal for a double. */
inline std::string num17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string num6(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

/* Line-at-a-time CSV writer, "\n" endings, no quoting (fields never contain
 * commas). */
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : f_(std::fopen(path.c_str(), "wb")) {
        if (!f_) throw std::runtime_error("cannot open " + path + " for writing");
    }
    ~CsvWriter() {
        if (f_) std::fclose(f_);
    }
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void header(const std::string& line) { raw(line); }

    void field(const std::string& s) {
        if (!first_) row_ += ',';
        row_ += s;
        first_ = false;
    }
    void field(double x) { field(num17(x)); }
    void field(int x) { field(std::to_string(x)); }
    void field(long x) { field(std::to_string(x)); }

    void end_row() {
        raw(row_);
        row_.clear();
        first_ = true;
    }

  private:
    void raw(const std::string& line) {
        std::fwrite(line.data(), 1, line.size(), f_);
        std::fputc('\n', f_);
    }

    FILE* f_;
    std::string row_;
    bool first_ = true;
};

} // namespace cli

#endif
