#pragma once

#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "ltlab/ltcheck.hpp"

namespace ltlab {

enum class ReportFormat { json, csv, human };

inline ReportFormat parse_format(const std::string& name) {
    if (name == "json") return ReportFormat::json;
    if (name == "csv") return ReportFormat::csv;
    if (name == "human") return ReportFormat::human;
    throw std::invalid_argument("unknown report format '" + name + "'");
}

namespace detail {

inline std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// Render check reports: a JSON array with stable key order, CSV with the
/// fixed header `spec,d,gamma,lhs,rhs,constant,ratio,pass`, or an aligned
/// human-readable table.
inline std::string emit_report(const std::vector<LTReport>& reports, ReportFormat format) {
    if (format == ReportFormat::json) {
        Json arr = Json::array();
        for (const auto& r : reports) arr.push_back(to_json(r));
        return arr.dump(2) + "\n";
    }
    if (format == ReportFormat::csv) {
        std::ostringstream os;
        os << "spec,d,gamma,lhs,rhs,constant,ratio,pass\n";
        for (const auto& r : reports)
            os << r.spec_label << ',' << r.d << ',' << detail::num17(r.gamma) << ','
               << detail::num17(r.lhs) << ',' << detail::num17(r.rhs_integral) << ','
               << detail::num17(r.constant) << ',' << detail::num17(r.ratio) << ','
               << (r.pass ? "true" : "false") << '\n';
        return os.str();
    }
    std::size_t width = 4;
    for (const auto& r : reports) width = std::max(width, r.spec_label.size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(width) + 2) << "spec"
       << std::right << std::setw(3) << "d" << std::setw(7) << "gamma" << std::setw(14) << "lhs"
       << std::setw(14) << "rhs" << std::setw(11) << "constant" << std::setw(11) << "ratio"
       << std::setw(6) << "pass" << '\n';
    for (const auto& r : reports) {
        os << std::left << std::setw(static_cast<int>(width) + 2) << r.spec_label << std::right
           << std::setw(3) << r.d << std::setw(7) << std::setprecision(3) << r.gamma
           << std::setw(14) << std::setprecision(6) << r.lhs << std::setw(14) << r.rhs_integral
           << std::setw(11) << std::setprecision(5) << r.constant << std::setw(11) << r.ratio
           << std::setw(6) << (r.pass ? "yes" : "NO") << '\n';
    }
    return os.str();
}

}  // namespace ltlab
