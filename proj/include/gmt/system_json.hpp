#pragma once

/// JSON round trip for inductive systems, so property-test failures can
/// be captured and replayed.

#include <memory>
#include <string>

#include <json.hpp>

#include "gmt/errors.hpp"
#include "gmt/measures.hpp"

namespace gmt {

inline nlohmann::json system_to_json(const InductiveSystem& s) {
    nlohmann::json j;
    j["cells"] = s.algebra->labels;
    nlohmann::json leq = nlohmann::json::array();
    for (int i = 0; i < s.index.size; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < s.index.size; ++k) row.push_back(s.index.related(i, k) ? 1 : 0);
        leq.push_back(row);
    }
    j["leq"] = leq;
    nlohmann::json omegas = nlohmann::json::array();
    for (int i = 0; i < s.index.size; ++i) {
        nlohmann::json cells = nlohmann::json::array();
        for (int c = 0; c < s.algebra->cell_count(); ++c)
            if (cell_in(s.omegas[static_cast<std::size_t>(i)], c)) cells.push_back(c);
        omegas.push_back(cells);
    }
    j["omegas"] = omegas;
    nlohmann::json masses = nlohmann::json::array();
    for (int i = 0; i < s.index.size; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& m : s.measures[static_cast<std::size_t>(i)].mass) {
            if (m.is_infinite())
                row.push_back("inf");
            else
                row.push_back(m.value());
        }
        masses.push_back(row);
    }
    j["masses"] = masses;
    return j;
}

inline InductiveSystem system_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("cells") || !j.contains("leq") || !j.contains("omegas") ||
        !j.contains("masses"))
        throw InvariantError("inductive-system JSON needs cells, leq, omegas, and masses");

    auto algebra = std::make_shared<CellAlgebra>();
    for (const auto& label : j["cells"]) algebra->labels.push_back(label.get<std::string>());
    algebra->validate();

    InductiveSystem s;
    s.algebra = algebra;
    s.index.size = static_cast<int>(j["leq"].size());
    s.index.leq.assign(static_cast<std::size_t>(s.index.size) * s.index.size, 0);
    for (int i = 0; i < s.index.size; ++i) {
        const auto& row = j["leq"][static_cast<std::size_t>(i)];
        if (static_cast<int>(row.size()) != s.index.size)
            throw InvariantError("leq relation table must be square");
        for (int k = 0; k < s.index.size; ++k)
            if (row[static_cast<std::size_t>(k)].get<int>() != 0) s.index.set_related(i, k);
    }

    for (const auto& cells : j["omegas"]) {
        CellSet set = 0;
        for (const auto& c : cells) {
            const int cell = c.get<int>();
            if (cell < 0 || cell >= algebra->cell_count())
                throw InvariantError("omega cell index out of range");
            set = with_cell(set, cell);
        }
        s.omegas.push_back(set);
    }

    for (const auto& row : j["masses"]) {
        MeasureTable table;
        table.algebra = algebra;
        for (const auto& m : row) {
            if (m.is_string()) {
                if (m.get<std::string>() != "inf")
                    throw InvariantError("mass entries are numbers or the string \"inf\"");
                table.mass.push_back(ExtendedReal::infinity());
            } else {
                table.mass.push_back(ExtendedReal(m.get<double>()));
            }
        }
        s.measures.push_back(std::move(table));
    }

    s.validate();
    return s;
}

} // namespace gmt
