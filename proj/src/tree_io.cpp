#include <cmath>
#include <set>

#include <json.hpp>

#include "tocdetect/error.hpp"
#include "tocdetect/tree.hpp"

namespace tocd {

using nlohmann::json;

namespace {

constexpr int kMaxNodeDepth = 4096;

json counts_to_json(const ClassCounts& c) { return {{"toc", c.toc}, {"non_toc", c.non_toc}}; }

json node_to_json(const TreeNode& n) {
    if (const auto* leaf = std::get_if<LeafNode>(&n.node)) {
        return {{"leaf", {{"label", label_name(leaf->label)}, {"counts", counts_to_json(leaf->counts)}}}};
    }
    if (const auto* num = std::get_if<NumericSplitNode>(&n.node)) {
        return {{"num",
                 {{"feature", feature_name(num->feature)},
                  {"threshold", num->threshold},
                  {"le", node_to_json(*num->le)},
                  {"gt", node_to_json(*num->gt)},
                  {"majority", label_name(num->majority)},
                  {"counts", counts_to_json(num->counts)}}}};
    }
    const auto& cat = std::get<CategoricalSplitNode>(n.node);
    json branches = json::object();
    for (const auto& [key, child] : cat.branches) branches[key] = node_to_json(*child);
    return {{"cat",
             {{"feature", feature_name(cat.feature)},
              {"branches", std::move(branches)},
              {"majority", label_name(cat.majority)},
              {"counts", counts_to_json(cat.counts)}}}};
}

[[noreturn]] void corrupt(const std::string& why) {
    throw Error(ErrorCode::CorruptModel, "corrupt model file: " + why);
}

const json& field(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) corrupt(std::string("missing field '") + key + "'");
    return obj.at(key);
}

ClassLabel label_from_json(const json& j) {
    if (!j.is_string()) corrupt("label is not a string");
    auto label = label_from_name(j.get<std::string>());
    if (!label) corrupt("unknown label '" + j.get<std::string>() + "'");
    return *label;
}

ClassCounts counts_from_json(const json& j) {
    const json& toc = field(j, "toc");
    const json& non = field(j, "non_toc");
    if (!toc.is_number_integer() || !non.is_number_integer()) corrupt("counts must be integers");
    ClassCounts c{toc.get<std::int64_t>(), non.get<std::int64_t>()};
    if (c.toc < 0 || c.non_toc < 0) corrupt("negative count");
    return c;
}

class NodeReader {
public:
    explicit NodeReader(const std::vector<Feature>& columns)
        : columns_(columns.begin(), columns.end()) {}

    NodePtr read(const json& j, int depth) const {
        if (depth > kMaxNodeDepth) corrupt("tree is too deep");
        if (!j.is_object() || j.size() != 1) corrupt("node must be a single-key object");
        const auto& [tag, body] = *j.items().begin();
        if (tag == "leaf") {
            LeafNode leaf{label_from_json(field(body, "label")), counts_from_json(field(body, "counts"))};
            if (leaf.counts.total() < 1) corrupt("leaf with no rows");
            if (leaf.label != leaf.counts.majority()) corrupt("leaf label is not the majority");
            return std::make_shared<const TreeNode>(TreeNode{leaf});
        }
        if (tag == "num") {
            const Feature f = feature(field(body, "feature"));
            if (!is_numeric(feature_kind(f))) corrupt("numeric split on categorical feature");
            const json& t = field(body, "threshold");
            if (!t.is_number() || !std::isfinite(t.get<double>())) corrupt("threshold is not finite");
            NumericSplitNode node{f,
                                  t.get<double>(),
                                  read(field(body, "le"), depth + 1),
                                  read(field(body, "gt"), depth + 1),
                                  label_from_json(field(body, "majority")),
                                  counts_from_json(field(body, "counts"))};
            return std::make_shared<const TreeNode>(TreeNode{std::move(node)});
        }
        if (tag == "cat") {
            const Feature f = feature(field(body, "feature"));
            if (is_numeric(feature_kind(f))) corrupt("categorical split on numeric feature");
            const json& branches = field(body, "branches");
            if (!branches.is_object() || branches.size() < 2) corrupt("split needs two branches");
            CategoricalSplitNode node{f, {}, label_from_json(field(body, "majority")),
                                      counts_from_json(field(body, "counts"))};
            for (const auto& [key, child] : branches.items()) {
                node.branches.emplace_back(key, read(child, depth + 1));
            }
            return std::make_shared<const TreeNode>(TreeNode{std::move(node)});
        }
        corrupt("unknown node tag '" + tag + "'");
    }

private:
    Feature feature(const json& j) const {
        if (!j.is_string()) corrupt("feature is not a string");
        auto f = feature_from_name(j.get<std::string>());
        if (!f) corrupt("unknown feature '" + j.get<std::string>() + "'");
        if (!columns_.count(*f)) corrupt("feature '" + j.get<std::string>() + "' is not a model column");
        return *f;
    }

    std::set<Feature> columns_;
};

std::vector<std::string> string_list(const json& j, const char* what) {
    if (!j.is_array()) corrupt(std::string(what) + " is not an array");
    std::vector<std::string> out;
    for (const json& item : j) {
        if (!item.is_string()) corrupt(std::string(what) + " holds a non-string");
        out.push_back(item.get<std::string>());
    }
    return out;
}

}  // namespace

std::string save_model(const TrainedModel& model) {
    json columns = json::array();
    for (Feature f : model.columns) columns.push_back(feature_name(f));
    json doc = {
        {"version", kModelFormatVersion},
        {"columns", std::move(columns)},
        {"feature_config",
         {{"title_terms", model.config.title_terms},
          {"section_keywords", model.config.section_keywords},
          {"max_page_number_digits", model.config.max_page_number_digits}}},
        {"summary",
         {{"rows", model.summary.rows},
          {"toc", model.summary.labels.toc},
          {"non_toc", model.summary.labels.non_toc}}},
        {"root", node_to_json(*model.root)},
    };
    return doc.dump(2) + "\n";
}

TrainedModel load_model(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        corrupt(e.what());
    }
    if (!doc.is_object()) corrupt("top level is not an object");
    const json& version = field(doc, "version");
    if (!version.is_number_integer()) corrupt("version is not an integer");
    if (version.get<std::int64_t>() != kModelFormatVersion) {
        throw Error(ErrorCode::UnsupportedVersion,
                    "model format version " + version.dump() + " is not supported (expected " +
                        std::to_string(kModelFormatVersion) + ")");
    }

    TrainedModel model;
    std::set<Feature> seen;
    for (const std::string& name : string_list(field(doc, "columns"), "columns")) {
        auto f = feature_from_name(name);
        if (!f) corrupt("unknown column '" + name + "'");
        if (!seen.insert(*f).second) corrupt("duplicate column '" + name + "'");
        model.columns.push_back(*f);
    }
    if (model.columns.empty()) corrupt("no columns");

    const json& cfg = field(doc, "feature_config");
    model.config.title_terms = string_list(field(cfg, "title_terms"), "title_terms");
    auto keywords = string_list(field(cfg, "section_keywords"), "section_keywords");
    model.config.section_keywords = {keywords.begin(), keywords.end()};
    const json& digits = field(cfg, "max_page_number_digits");
    if (!digits.is_number_integer()) corrupt("max_page_number_digits is not an integer");
    model.config.max_page_number_digits = digits.get<int>();
    try {
        model.config.validate();
    } catch (const Error& e) {
        corrupt(e.what());
    }

    const json& summary = field(doc, "summary");
    const json& rows = field(summary, "rows");
    if (!rows.is_number_integer()) corrupt("summary.rows is not an integer");
    model.summary.rows = rows.get<std::int64_t>();
    model.summary.labels = counts_from_json(summary);
    if (model.summary.rows != model.summary.labels.total()) corrupt("summary counts disagree");

    model.root = NodeReader(model.columns).read(field(doc, "root"), 0);
    return model;
}

}  // namespace tocd
