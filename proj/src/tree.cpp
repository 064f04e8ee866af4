#include "tocdetect/tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tocdetect/error.hpp"

namespace tocd {

double entropy(const ClassCounts& counts) {
    const auto total = static_cast<double>(counts.total());
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (std::int64_t c : {counts.toc, counts.non_toc}) {
        if (c <= 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h;
}

namespace {

ClassCounts count_labels(const Dataset& data, std::span<const std::size_t> rows) {
    ClassCounts c;
    for (std::size_t r : rows) c.add(data.rows[r].label);
    return c;
}

/// Columns (indices into data.columns) sorted by canonical feature order.
std::vector<int> canonical_order(const Dataset& data, std::span<const int> columns) {
    std::vector<int> order(columns.begin(), columns.end());
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return data.columns[a] < data.columns[b]; });
    return order;
}

/// Shared scan behind best_split. With `allow_uninformative`, any split that
/// separates the rows into two or more groups is a candidate, even at zero gain.
std::optional<SplitCandidate> find_split(const Dataset& data, std::span<const std::size_t> rows,
                                         std::span<const int> columns, bool allow_uninformative) {
    if (rows.empty()) return std::nullopt;
    const ClassCounts parent = count_labels(data, rows);
    const double parent_h = entropy(parent);
    const auto n = static_cast<double>(rows.size());

    std::optional<SplitCandidate> best;
    auto consider = [&](Feature f, auto split, double gain) {
        if (!allow_uninformative && gain <= kGainTolerance) return;
        if (best && gain <= best->gain + kGainTolerance) return;
        best = SplitCandidate{f, split, gain};
    };

    for (int col : canonical_order(data, columns)) {
        const Feature f = data.columns[static_cast<std::size_t>(col)];
        if (is_numeric(feature_kind(f))) {
            std::vector<std::pair<double, ClassLabel>> values;
            values.reserve(rows.size());
            for (std::size_t r : rows) {
                values.emplace_back(numeric_value(data.rows[r].values[col]), data.rows[r].label);
            }
            std::sort(values.begin(), values.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            ClassCounts left;
            for (std::size_t i = 0; i + 1 < values.size(); ++i) {
                left.add(values[i].second);
                const double lo = values[i].first;
                const double hi = values[i + 1].first;
                if (lo == hi) continue;
                double threshold = lo + (hi - lo) / 2.0;
                if (!(threshold < hi)) threshold = lo;
                const ClassCounts right{parent.toc - left.toc, parent.non_toc - left.non_toc};
                const double gain = parent_h - (static_cast<double>(left.total()) / n) * entropy(left) -
                                    (static_cast<double>(right.total()) / n) * entropy(right);
                consider(f, NumericSplit{threshold}, gain);
            }
        } else {
            std::map<std::string, ClassCounts> groups;
            for (std::size_t r : rows) groups[category_key(data.rows[r].values[col])].add(data.rows[r].label);
            if (groups.size() < 2) continue;
            double children = 0.0;
            for (const auto& [key, counts] : groups) {
                children += (static_cast<double>(counts.total()) / n) * entropy(counts);
            }
            consider(f, CategoricalSplit{}, parent_h - children);
        }
    }
    return best;
}

NodePtr make_leaf(const ClassCounts& counts) {
    return std::make_shared<const TreeNode>(TreeNode{LeafNode{counts.majority(), counts}});
}

class Learner {
public:
    Learner(const Dataset& data, const LearnParams& params) : data_(data), params_(params) {}

    NodePtr build(const std::vector<std::size_t>& rows, const std::vector<int>& columns,
                  int depth) const {
        const ClassCounts counts = count_labels(data_, rows);
        const bool pure = counts.toc == 0 || counts.non_toc == 0;
        const bool too_small =
            rows.size() < 2 * static_cast<std::size_t>(std::max(1, params_.min_rows));
        const bool too_deep = params_.max_depth && depth >= *params_.max_depth;
        if (pure || too_small || too_deep) return make_leaf(counts);

        auto split = find_split(data_, rows, columns, false);
        // Consistent data can still have every gain at zero (XOR-like
        // columns); splitting anyway keeps the tree able to fit it.
        if (!split) split = find_split(data_, rows, columns, true);
        if (!split) return make_leaf(counts);

        const int col = data_.column_index(split->feature);
        if (const auto* num = std::get_if<NumericSplit>(&split->split)) {
            std::vector<std::size_t> le;
            std::vector<std::size_t> gt;
            for (std::size_t r : rows) {
                (numeric_value(data_.rows[r].values[col]) <= num->threshold ? le : gt).push_back(r);
            }
            NumericSplitNode node{split->feature, num->threshold,
                                  build(le, columns, depth + 1), build(gt, columns, depth + 1),
                                  counts.majority(), counts};
            return std::make_shared<const TreeNode>(TreeNode{std::move(node)});
        }

        std::map<std::string, std::vector<std::size_t>> groups;
        for (std::size_t r : rows) groups[category_key(data_.rows[r].values[col])].push_back(r);
        std::vector<int> remaining;
        std::copy_if(columns.begin(), columns.end(), std::back_inserter(remaining),
                     [&](int c) { return c != col; });
        CategoricalSplitNode node{split->feature, {}, counts.majority(), counts};
        for (const auto& [key, group] : groups) {
            node.branches.emplace_back(key, build(group, remaining, depth + 1));
        }
        return std::make_shared<const TreeNode>(TreeNode{std::move(node)});
    }

private:
    const Dataset& data_;
    const LearnParams& params_;
};

}  // namespace

std::optional<SplitCandidate> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                         std::span<const int> columns) {
    return find_split(data, rows, columns, false);
}

std::optional<SplitCandidate> best_split(const Dataset& data) {
    std::vector<std::size_t> rows(data.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::vector<int> columns(data.columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) columns[i] = static_cast<int>(i);
    return best_split(data, rows, columns);
}

TrainedModel learn(const Dataset& data, const LearnParams& params, const FeatureConfig& cfg) {
    if (data.rows.empty()) throw Error(ErrorCode::EmptyDataset, "cannot learn from an empty dataset");
    if (params.min_rows < 1) throw Error(ErrorCode::InvalidArgument, "min_rows must be at least 1");
    if (params.max_depth && *params.max_depth < 1) {
        throw Error(ErrorCode::InvalidArgument, "max_depth must be at least 1");
    }
    data.validate();

    std::vector<std::size_t> rows(data.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::vector<int> columns(data.columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) columns[i] = static_cast<int>(i);

    TrainedModel model;
    model.root = Learner(data, params).build(rows, columns, 0);
    model.columns = data.columns;
    model.summary = {static_cast<std::int64_t>(data.rows.size()), data.label_counts()};
    model.config = cfg;
    return model;
}

Prediction classify(const TrainedModel& model, std::span<const FeatureValue> values) {
    if (values.size() != model.columns.size()) {
        throw Error(ErrorCode::MissingFeature, "expected " + std::to_string(model.columns.size()) +
                                                   " feature values, got " +
                                                   std::to_string(values.size()));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!value_matches_kind(values[i], feature_kind(model.columns[i]))) {
            throw Error(ErrorCode::TypeError, "value for column " +
                                                  std::string(feature_name(model.columns[i])) +
                                                  " has the wrong type");
        }
    }
    auto position = [&](Feature f) -> const FeatureValue& {
        auto it = std::find(model.columns.begin(), model.columns.end(), f);
        if (it == model.columns.end()) {
            throw Error(ErrorCode::MissingFeature,
                        "model has no column " + std::string(feature_name(f)));
        }
        return values[static_cast<std::size_t>(it - model.columns.begin())];
    };

    const TreeNode* node = model.root.get();
    while (true) {
        if (const auto* leaf = std::get_if<LeafNode>(&node->node)) return {leaf->label, leaf->counts};
        if (const auto* num = std::get_if<NumericSplitNode>(&node->node)) {
            node = numeric_value(position(num->feature)) <= num->threshold ? num->le.get()
                                                                           : num->gt.get();
            continue;
        }
        const auto& cat = std::get<CategoricalSplitNode>(node->node);
        const std::string key = category_key(position(cat.feature));
        auto it = std::find_if(cat.branches.begin(), cat.branches.end(),
                               [&](const auto& b) { return b.first == key; });
        if (it == cat.branches.end()) return {cat.majority, cat.counts};
        node = it->second.get();
    }
}

Prediction classify(const TrainedModel& model, const FeatureVector& features) {
    std::vector<FeatureValue> values;
    values.reserve(model.columns.size());
    for (Feature f : model.columns) values.push_back(feature_value(features, f));
    return classify(model, values);
}

bool trees_equal(const TreeNode& a, const TreeNode& b) {
    if (a.node.index() != b.node.index()) return false;
    if (const auto* la = std::get_if<LeafNode>(&a.node)) {
        const auto& lb = std::get<LeafNode>(b.node);
        return la->label == lb.label && la->counts == lb.counts;
    }
    if (const auto* na = std::get_if<NumericSplitNode>(&a.node)) {
        const auto& nb = std::get<NumericSplitNode>(b.node);
        return na->feature == nb.feature && na->threshold == nb.threshold &&
               na->majority == nb.majority && na->counts == nb.counts &&
               trees_equal(*na->le, *nb.le) && trees_equal(*na->gt, *nb.gt);
    }
    const auto& ca = std::get<CategoricalSplitNode>(a.node);
    const auto& cb = std::get<CategoricalSplitNode>(b.node);
    if (ca.feature != cb.feature || ca.majority != cb.majority || ca.counts != cb.counts ||
        ca.branches.size() != cb.branches.size()) {
        return false;
    }
    for (std::size_t i = 0; i < ca.branches.size(); ++i) {
        if (ca.branches[i].first != cb.branches[i].first ||
            !trees_equal(*ca.branches[i].second, *cb.branches[i].second)) {
            return false;
        }
    }
    return true;
}

int tree_depth(const TreeNode& n) {
    if (const auto* num = std::get_if<NumericSplitNode>(&n.node)) {
        return 1 + std::max(tree_depth(*num->le), tree_depth(*num->gt));
    }
    if (const auto* cat = std::get_if<CategoricalSplitNode>(&n.node)) {
        int d = 0;
        for (const auto& [key, child] : cat->branches) d = std::max(d, tree_depth(*child));
        return 1 + d;
    }
    return 0;
}

}  // namespace tocd
