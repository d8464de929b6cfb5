#pragma once

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "program.hpp"

namespace sprig {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::string feature_label(const Program& p, int index) {
    if (index >= 0 && static_cast<std::size_t>(index) < p.feature_names.size())
        return p.feature_names[index];
    return "x" + std::to_string(index);
}

inline Json node_to_json(const Program& p, const Node& n) {
    Json j;
    j["kind"] = std::string(op_name(n.op));
    if (n.op == Op::Feature || n.op == Op::SplitGreedy)
        j["feature"] = feature_label(p, n.feature);
    j["weight"] = n.weight;
    j["weight_enabled"] = n.weight_enabled;
    if (is_split(n.op)) j["threshold"] = n.threshold;
    Json children = Json::array();
    for (const auto& c : n.children) children.push_back(node_to_json(p, c));
    j["children"] = std::move(children);
    return j;
}

inline Node node_from_json(const Json& j, std::vector<std::string>& names, const std::string& path) {
    if (!j.is_object()) throw ParseError("expected object at " + path);
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ParseError("missing or invalid 'kind' at " + path);
    Node n;
    n.op = op_from_name(j["kind"].get<std::string>());
    if (j.contains("weight")) {
        if (!j["weight"].is_number()) throw ParseError("invalid 'weight' at " + path);
        n.weight = j["weight"].get<double>();
    }
    if (j.contains("weight_enabled")) {
        if (!j["weight_enabled"].is_boolean()) throw ParseError("invalid 'weight_enabled' at " + path);
        n.weight_enabled = j["weight_enabled"].get<bool>();
    }
    if (n.op == Op::Feature || n.op == Op::SplitGreedy) {
        if (!j.contains("feature") || !j["feature"].is_string())
            throw ParseError("missing 'feature' at " + path);
        const auto name = j["feature"].get<std::string>();
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            names.push_back(name);
            n.feature = static_cast<int>(names.size()) - 1;
        } else {
            n.feature = static_cast<int>(it - names.begin());
        }
    }
    if (is_split(n.op)) {
        if (!j.contains("threshold") || !j["threshold"].is_number())
            throw ParseError("missing 'threshold' at " + path);
        n.threshold = j["threshold"].get<double>();
    }
    const auto& children = j.contains("children") ? j["children"] : Json::array();
    if (!children.is_array()) throw ParseError("invalid 'children' at " + path);
    if (static_cast<int>(children.size()) != arity(n.op))
        throw ParseError("wrong arity for '" + std::string(op_name(n.op)) + "' at " + path);
    int i = 0;
    for (const auto& cj : children) {
        n.children.push_back(node_from_json(cj, names, path + ".children[" + std::to_string(i) + "]"));
        ++i;
    }
    return n;
}

} // namespace detail

// Model document: nested node tree plus task, logistic offset, complexity
// and size. Weights and thresholds round-trip bit-exactly (shortest
// round-trip float printing on write, exact parse on read).
inline Json serialize(const Program& p, const ComplexityTable& table = {}) {
    Json doc;
    doc["task"] = std::string(task_name(p.task));
    doc["nodes"] = Json::array({ detail::node_to_json(p, p.root) });
    if (p.root.op == Op::LogisticRoot) doc["offset"] = p.root.threshold;
    doc["complexity"] = p.complexity(table);
    doc["size"] = p.size();
    return doc;
}

inline Program deserialize(const Json& doc) {
    if (!doc.is_object()) throw ParseError("model document must be an object");
    if (!doc.contains("task") || !doc["task"].is_string())
        throw ParseError("missing 'task'");
    if (!doc.contains("nodes") || !doc["nodes"].is_array() || doc["nodes"].size() != 1)
        throw ParseError("'nodes' must be a one-element array");
    Program p;
    p.task = task_from_name(doc["task"].get<std::string>());
    p.root = detail::node_from_json(doc["nodes"][0], p.feature_names, "nodes[0]");
    if (p.root.op == Op::LogisticRoot && doc.contains("offset")) {
        if (!doc["offset"].is_number()) throw ParseError("invalid 'offset'");
        p.root.threshold = doc["offset"].get<double>();
    }
    validate(p);
    return p;
}

inline std::string to_json_string(const Program& p, const ComplexityTable& table = {}) {
    return serialize(p, table).dump(2) + "\n";
}

inline Program from_json_string(const std::string& text) {
    Json doc = Json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) throw ParseError("model document is not valid JSON");
    return deserialize(doc);
}

// ---------------------------------------------------------------------------
// Human-readable renderings
// ---------------------------------------------------------------------------

namespace detail {

inline std::string short_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string infix_rec(const Program& p, const Node& n) {
    std::string body;
    switch (n.op) {
    case Op::Constant:
        return short_num(n.weight_enabled ? n.weight : 1.0);
    case Op::Feature:
        body = feature_label(p, n.feature);
        break;
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: {
        const char* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - "
                        : n.op == Op::Mul ? "*" : "/";
        body = "(" + infix_rec(p, n.children[0]) + sym + infix_rec(p, n.children[1]) + ")";
        break;
    }
    case Op::Pow: case Op::Min: case Op::Max: {
        const char* f = n.op == Op::Pow ? "pow" : n.op == Op::Min ? "min" : "max";
        body = std::string(f) + "(" + infix_rec(p, n.children[0]) + ", " +
               infix_rec(p, n.children[1]) + ")";
        break;
    }
    case Op::SplitGreedy:
        body = "ifelse(" + feature_label(p, n.feature) + " > " + short_num(n.threshold) + ", " +
               infix_rec(p, n.children[0]) + ", " + infix_rec(p, n.children[1]) + ")";
        break;
    case Op::SplitFlexible:
        body = "ifelse(" + infix_rec(p, n.children[0]) + " > " + short_num(n.threshold) + ", " +
               infix_rec(p, n.children[1]) + ", " + infix_rec(p, n.children[2]) + ")";
        break;
    case Op::LogisticRoot:
        body = "logistic(" + infix_rec(p, n.children[0]) + " + " + short_num(n.threshold) + ")";
        return body; // never weighted
    default:
        body = std::string(op_name(n.op)) + "(" + infix_rec(p, n.children[0]) + ")";
        break;
    }
    if (n.weight_enabled) return short_num(n.weight) + "*" + body;
    return body;
}

// Split chains render as if/else blocks; the `wrap` callback applies any
// enclosing pointwise transform (weights, the logistic root) to each leaf
// expression, which is equivalent to applying it to the merged output.
inline void pseudo_rec(const Program& p, const Node& n, std::string indent,
                       const std::function<std::string(std::string)>& wrap,
                       std::ostringstream& out) {
    if (n.op == Op::SplitGreedy || n.op == Op::SplitFlexible) {
        const bool greedy = n.op == Op::SplitGreedy;
        std::string cond = greedy ? feature_label(p, n.feature)
                                  : "(" + infix_rec(p, n.children[0]) + ")";
        auto inner = wrap;
        if (n.weight_enabled) {
            const double w = n.weight;
            inner = [&p, w, wrap](std::string e) { return wrap(short_num(w) + "*(" + e + ")"); };
        }
        out << indent << "if " << cond << " > " << short_num(n.threshold) << ":\n";
        pseudo_rec(p, n.children[greedy ? 0 : 1], indent + "    ", inner, out);
        out << indent << "else:\n";
        pseudo_rec(p, n.children[greedy ? 1 : 2], indent + "    ", inner, out);
        return;
    }
    if (n.op == Op::LogisticRoot) {
        const double b = n.threshold;
        auto inner = [b, wrap](std::string e) {
            return wrap("logistic(" + e + " + " + short_num(b) + ")");
        };
        pseudo_rec(p, n.children[0], indent, inner, out);
        return;
    }
    out << indent << "return " << wrap(infix_rec(p, n)) << "\n";
}

} // namespace detail

inline std::string to_infix(const Program& p) { return detail::infix_rec(p, p.root); }

// Nested if/else rendering of the decision structure.
inline std::string to_pseudocode(const Program& p) {
    std::ostringstream out;
    out << "def predict(row):\n";
    detail::pseudo_rec(p, p.root, "    ", [](std::string e) { return e; }, out);
    return out.str();
}

} // namespace sprig
