#include "owfsim/record.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace owfsim {

std::string string_column(std::size_t string_index, std::string_view signal) {
    return "s" + std::to_string(string_index + 1) + "_" + std::string(signal);
}

std::vector<std::string> record_columns(std::size_t n_strings) {
    std::vector<std::string> cols{"t"};
    for (std::size_t k = 0; k < n_strings; ++k)
        for (auto sig : kStringSignals) cols.push_back(string_column(k, sig));
    for (auto sig : kLinkSignals) cols.emplace_back(sig);
    return cols;
}

std::size_t RunRecord::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::out_of_range("run record: no column '" + std::string(name) + "'");
}

const std::vector<double>& RunRecord::column(std::string_view name) const { return data.at(column_index(name)); }

void write_csv(const RunRecord& record, std::ostream& out) {
    for (std::size_t c = 0; c < record.columns.size(); ++c) {
        if (c) out << ',';
        out << record.columns[c];
    }
    out << '\n';
    std::array<char, 32> buf{};
    const std::size_t rows = record.rows();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < record.data.size(); ++c) {
            if (c) out << ',';
            const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), record.data[c][r]);
            out.write(buf.data(), res.ptr - buf.data());
        }
        out << '\n';
    }
}

RunRecord read_csv(std::istream& in) {
    RunRecord record;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
    {
        std::stringstream ss(line);
        std::string name;
        while (std::getline(ss, name, ',')) record.columns.push_back(name);
    }
    if (record.columns.empty() || record.columns.front() != "t")
        throw std::invalid_argument("csv: first column must be 't'");
    record.data.assign(record.columns.size(), {});

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t c = 0;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (p <= end) {
            const char* comma = std::find(p, end, ',');
            double v = 0.0;
            const auto res = std::from_chars(p, comma, v);
            if (res.ec != std::errc() || res.ptr != comma || c >= record.columns.size())
                throw std::invalid_argument("csv: malformed value on line " + std::to_string(line_no));
            record.data[c++].push_back(v);
            p = comma + 1;
        }
        if (c != record.columns.size())
            throw std::invalid_argument("csv: wrong field count on line " + std::to_string(line_no));
    }
    return record;
}

}  // namespace owfsim
