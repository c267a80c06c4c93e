#ifndef OCSTAB_CSV_HPP
#define OCSTAB_CSV_HPP

#include <fstream>
#include <string>
#include <vector>

namespace ocstab {

/// One table per file: header line, comma separator, '.' decimal point,
/// scientific notation with 17 significant digits.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void begin_row();
    CsvWriter& cell(double v);
    CsvWriter& cell(const std::string& v);
    CsvWriter& cell(int v);
    void end_row();

    static std::string format(double v);

private:
    std::ofstream out_;
    size_t columns_;
    size_t in_row_;
    std::string path_;
};

}  // namespace ocstab

#endif
