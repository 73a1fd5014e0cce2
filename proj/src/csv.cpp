#include "isac/csv.hpp"

#include "isac/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace isac {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void CsvTable::add_row(std::vector<double> row) {
    if (row.size() != header.size())
        throw ArgumentError("CSV row has " + std::to_string(row.size()) + " fields, header has " +
                            std::to_string(header.size()));
    rows.push_back(std::move(row));
}

void CsvTable::write(std::ostream& os) const {
    for (const auto& c : comments) os << "# " << c << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
        os << '\n';
    }
}

CsvTable CsvTable::read(std::istream& is) {
    CsvTable t;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.comments.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) throw ParseError("row width differs from the header", lineno, 1);
        std::vector<double> row;
        int col = 1;
        for (const auto& x : fields) {
            char* end = nullptr;
            const double v = std::strtod(x.c_str(), &end);
            if (x.empty() || *end != '\0') throw ParseError("not a number: '" + x + "'", lineno, col);
            row.push_back(v);
            col += static_cast<int>(x.size()) + 1;
        }
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError("missing header row", lineno + 1, 1);
    return t;
}

}  // namespace isac
