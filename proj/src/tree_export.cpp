#include <string>

#include "tocdetect/tree.hpp"

namespace tocd {

namespace {

std::string leaf_label(const LeafNode& leaf) {
    return std::string(label_name(leaf.label)) + " (" + std::to_string(leaf.counts.toc) + "/" +
           std::to_string(leaf.counts.non_toc) + ")";
}

// Text layout:
//   [feature]                 one header per split
//     <= 0.5 → TOC (3/0)      leaf children inline
//     > 0.5                   internal children on the following lines
//       [other_feature] ...
void render_text(const TreeNode& node, int indent, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    if (const auto* leaf = std::get_if<LeafNode>(&node.node)) {
        out += pad + "→ " + leaf_label(*leaf) + "\n";
        return;
    }
    auto branch = [&](const std::string& condition, const TreeNode& child) {
        const std::string line = pad + "  " + condition;
        if (const auto* leaf = std::get_if<LeafNode>(&child.node)) {
            out += line + " → " + leaf_label(*leaf) + "\n";
        } else {
            out += line + "\n";
            render_text(child, indent + 4, out);
        }
    };
    if (const auto* num = std::get_if<NumericSplitNode>(&node.node)) {
        out += pad + "[" + std::string(feature_name(num->feature)) + "]\n";
        branch("<= " + format_real(num->threshold), *num->le);
        branch("> " + format_real(num->threshold), *num->gt);
        return;
    }
    const auto& cat = std::get<CategoricalSplitNode>(node.node);
    out += pad + "[" + std::string(feature_name(cat.feature)) + "] (unseen → " +
           std::string(label_name(cat.majority)) + ")\n";
    for (const auto& [key, child] : cat.branches) branch("= " + key, *child);
}

std::string dot_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out;
}

int render_dot(const TreeNode& node, int& next_id, std::string& out) {
    const int id = next_id++;
    const std::string name = "n" + std::to_string(id);
    if (const auto* leaf = std::get_if<LeafNode>(&node.node)) {
        out += "  " + name + " [shape=ellipse, label=\"" + dot_escape(leaf_label(*leaf)) + "\"];\n";
        return id;
    }
    auto edge = [&](const TreeNode& child, const std::string& condition) {
        const int child_id = render_dot(child, next_id, out);
        out += "  " + name + " -> n" + std::to_string(child_id) + " [label=\"" +
               dot_escape(condition) + "\"];\n";
    };
    if (const auto* num = std::get_if<NumericSplitNode>(&node.node)) {
        out += "  " + name + " [shape=box, label=\"" + dot_escape(feature_name(num->feature)) + "\"];\n";
        edge(*num->le, "<= " + format_real(num->threshold));
        edge(*num->gt, "> " + format_real(num->threshold));
        return id;
    }
    const auto& cat = std::get<CategoricalSplitNode>(node.node);
    out += "  " + name + " [shape=box, label=\"" + dot_escape(feature_name(cat.feature)) + "\"];\n";
    for (const auto& [key, child] : cat.branches) edge(*child, "= " + key);
    return id;
}

}  // namespace

std::string export_text(const TrainedModel& model) {
    std::string out;
    render_text(*model.root, 0, out);
    return out;
}

std::string export_dot(const TrainedModel& model) {
    std::string out = "digraph toc_tree {\n  node [fontname=\"Helvetica\"];\n";
    int next_id = 0;
    render_dot(*model.root, next_id, out);
    out += "}\n";
    return out;
}

}  // namespace tocd
