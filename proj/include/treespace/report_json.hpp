#pragma once

#include <string>
#include <variant>

#include "json.hpp"
#include "treespace/error.hpp"
#include "treespace/extremal.hpp"
#include "treespace/newick.hpp"
#include "treespace/rearrange.hpp"
#include "treespace/verify.hpp"

namespace treespace {

// Operation records: {"bisect_mask": u64, "reconnect_a": u64|null,
// "reconnect_b": u64|null}. Masks are over leaf indices; null is the
// single-leaf root slot.

inline nlohmann::json op_to_json(const RearrangementOp& op) {
    auto slot = [](Attachment a) -> nlohmann::json {
        if (a.is_root()) {
            return nullptr;
        }
        return a.mask;
    };
    return {{"bisect_mask", op.bisect.mask},
            {"reconnect_a", slot(op.reconnect_a)},
            {"reconnect_b", slot(op.reconnect_b)}};
}

inline RearrangementOp op_from_json(const nlohmann::json& j, std::size_t n) {
    try {
        auto slot = [](const nlohmann::json& v) {
            return v.is_null() ? Attachment::root() : Attachment::edge(v.get<LeafMask>());
        };
        RearrangementOp op;
        op.bisect = Split{j.at("bisect_mask").get<LeafMask>(), n};
        op.reconnect_a = slot(j.at("reconnect_a"));
        op.reconnect_b = slot(j.at("reconnect_b"));
        return op;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidOp, std::string("malformed operation record: ") + e.what());
    }
}

inline nlohmann::json histogram_to_json(const std::map<Count, Count>& histogram) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [multiplicity, count] : histogram) {
        out[std::to_string(multiplicity)] = count;
    }
    return out;
}

inline nlohmann::json report_to_json(const NeighbourhoodReport& r) {
    return {{"n", r.n},
            {"op", std::string(to_string(r.kind))},
            {"op_count", r.op_count},
            {"neighbourhood_size", r.neighbourhood_size},
            {"multiplicity_histogram", histogram_to_json(r.multiplicity_histogram)}};
}

inline nlohmann::json scan_to_json(const ExtremalScanResult& s) {
    auto newicks = [](const std::set<CanonicalForm>& forms) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& f : forms) {
            arr.push_back(f.split_masks);
        }
        return arr;
    };
    return {{"n", s.n},
            {"trees_scanned", s.trees_scanned},
            {"max_value", s.max_value},
            {"min_value", s.min_value},
            {"max_gamma", s.max_gamma},
            {"min_gamma", s.min_gamma},
            {"argmax_count", s.argmax_forms.size()},
            {"argmin_count", s.argmin_forms.size()},
            {"argmax_split_masks", newicks(s.argmax_forms)},
            {"argmin_split_masks", newicks(s.argmin_forms)},
            {"argmax_all_caterpillar", s.argmax_all_caterpillar},
            {"argmin_all_complete", s.argmin_all_complete}};
}

inline nlohmann::json suite_to_json(const SuiteReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (const auto& [key, value] : row) {
            std::visit([&obj, &key](const auto& v) { obj[key] = v; }, value);
        }
        rows.push_back(obj);
    }
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& c : r.counterexamples) {
        failures.push_back({{"check", c.check}, {"newick", c.newick}, {"detail", c.detail}});
    }
    return {{"suite", r.suite}, {"passed", r.passed}, {"rows", rows}, {"counterexamples", failures}};
}

}  // namespace treespace
