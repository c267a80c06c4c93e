#include "ocstab/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace ocstab {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()), in_row_(0), path_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << header[i];
    }
    out_ << '\n';
}

void CsvWriter::begin_row() { in_row_ = 0; }

CsvWriter& CsvWriter::cell(double v) { return cell(format(v)); }

CsvWriter& CsvWriter::cell(int v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
    if (in_row_) out_ << ',';
    out_ << v;
    ++in_row_;
    return *this;
}

void CsvWriter::end_row() {
    if (in_row_ != columns_)
        throw std::runtime_error("CsvWriter: row width mismatch in " + path_);
    out_ << '\n';
    in_row_ = 0;
}

std::string CsvWriter::format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

}  // namespace ocstab
