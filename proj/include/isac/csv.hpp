#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isac {

// Comment lines are written with a leading "# ".
struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
    void write(std::ostream& os) const;
    static CsvTable read(std::istream& is);
};

// 12 significant digits.
std::string format_number(double v);

}  // namespace isac
