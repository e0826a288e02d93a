#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qkdlab {

/// Shortest round-trip decimal for stable, locale-independent CSV cells.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Comma-separated writer. Every file carries one metadata comment line
/// followed by a header row.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& meta,
              const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
        out_ << "# " << meta << "\n";
        write_cells(header);
    }

    void row(const std::vector<std::string>& cells) { write_cells(cells); }

private:
    void write_cells(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
};

}  // namespace qkdlab
