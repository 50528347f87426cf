#pragma once

/// Deterministic report serialization. Field order is fixed by
/// construction and every float is printed with 17 significant digits,
/// so identical inputs produce byte-identical output. CSV uses ','
/// separators, '.' decimal points, LF line endings, and always carries
/// a header row.

#include <string>

#include "gmt/coarea.hpp"
#include "gmt/expr.hpp"
#include "gmt/measures.hpp"
#include "gmt/nets.hpp"
#include "gmt/study.hpp"

namespace gmt {

namespace detail {

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c; break;
        }
    }
    return out;
}

} // namespace detail

inline std::string area_report_json(const HausdorffResult& r, double abs_tol) {
    using detail::format_double;
    std::string out = "{\"value\":" + format_double(r.value);
    out += ",\"abs_tol\":" + format_double(abs_tol);
    out += ",\"chart_count\":" + std::to_string(r.charts.size());
    out += ",\"per_chart\":[";
    for (std::size_t i = 0; i < r.charts.size(); ++i) {
        if (i) out += ",";
        out += "{\"index\":" + std::to_string(i);
        out += ",\"value\":" + format_double(r.charts[i].value);
        out += ",\"depth\":" + std::to_string(r.charts[i].depth);
        out += ",\"evaluations\":" + std::to_string(r.charts[i].evaluations) + "}";
    }
    out += "]}\n";
    return out;
}

inline std::string coarea_report_json(const CoareaReport& r) {
    using detail::format_double;
    std::string out = "{\"lhs\":" + format_double(r.lhs);
    out += ",\"rhs\":" + format_double(r.rhs);
    out += ",\"abs_err\":" + format_double(r.abs_err);
    out += ",\"rel_err\":" + format_double(r.rel_err);
    out += ",\"excluded_t_measure\":" + format_double(r.excluded_t_measure);
    out += ",\"per_slice\":[";
    for (std::size_t i = 0; i < r.slices.size(); ++i) {
        if (i) out += ",";
        out += "{\"t\":" + format_double(r.slices[i].t);
        out += ",\"value\":" + format_double(r.slices[i].value);
        out += ",\"status\":\"" + detail::json_escape(r.slices[i].status) + "\"}";
    }
    out += "]}\n";
    return out;
}

inline std::string coarea_slices_csv(const CoareaReport& r) {
    using detail::format_double;
    std::string out = "t,value,status\n";
    for (const auto& s : r.slices)
        out += format_double(s.t) + "," + format_double(s.value) + "," + s.status + "\n";
    return out;
}

inline std::string convergence_csv(const ConvergenceReport& r) {
    using detail::format_double;
    std::string out = "step,cells,sum,delta\n";
    for (const auto& s : r.steps) {
        out += std::to_string(s.step) + "," + std::to_string(s.cells) + "," +
               format_double(s.sum) + ",";
        if (!std::isnan(s.delta)) out += format_double(s.delta);
        out += "\n";
    }
    return out;
}

inline std::string limit_study_csv(const LimitStudyResult& r) {
    using detail::format_double;
    std::string out = "k,integral,gap\n";
    for (const auto& row : r.rows)
        out += std::to_string(row.k) + "," + format_double(row.value) + "," +
               format_double(row.gap) + "\n";
    return out;
}

inline std::string limit_study_json(const LimitStudyResult& r) {
    using detail::format_double;
    std::string out = "{\"limit_value\":" + format_double(r.limit_value);
    out += ",\"converged\":" + std::string(r.converged ? "true" : "false");
    out += ",\"final_gap\":" + format_double(r.final_gap);
    out += ",\"rows\":[";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        if (i) out += ",";
        out += "{\"k\":" + std::to_string(r.rows[i].k);
        out += ",\"integral\":" + format_double(r.rows[i].value);
        out += ",\"gap\":" + format_double(r.rows[i].gap) + "}";
    }
    out += "]}\n";
    return out;
}

} // namespace gmt
