#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace riskev::csv {

/// RFC 4180 field: quoted when it contains a comma, quote, CR or LF.
inline std::string field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

/// One CRLF-terminated record.
inline void write_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) os << ',';
        os << field(fields[i]);
    }
    os << "\r\n";
}

}  // namespace riskev::csv
