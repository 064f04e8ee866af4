#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tocdetect/dataset.hpp"
#include "tocdetect/features.hpp"
#include "tocdetect/schema.hpp"

namespace tocd {

struct TreeNode;
using NodePtr = std::shared_ptr<const TreeNode>;

struct LeafNode {
    ClassLabel label = ClassLabel::Toc;
    ClassCounts counts;
};

/// value <= threshold goes to `le`, everything else to `gt`.
struct NumericSplitNode {
    Feature feature = Feature::LineEndNumberFrequency;
    double threshold = 0.0;
    NodePtr le;
    NodePtr gt;
    ClassLabel majority = ClassLabel::Toc;
    ClassCounts counts;
};

/// Branches sorted by key. Keys not present route to `majority`.
struct CategoricalSplitNode {
    Feature feature = Feature::ContainsTitleTerm;
    std::vector<std::pair<std::string, NodePtr>> branches;
    ClassLabel majority = ClassLabel::Toc;
    ClassCounts counts;
};

struct TreeNode {
    std::variant<LeafNode, NumericSplitNode, CategoricalSplitNode> node;
};

bool trees_equal(const TreeNode& a, const TreeNode& b);
int tree_depth(const TreeNode& n);

struct TrainingSummary {
    std::int64_t rows = 0;
    ClassCounts labels;
    bool operator==(const TrainingSummary&) const = default;
};

struct TrainedModel {
    NodePtr root;
    std::vector<Feature> columns;
    TrainingSummary summary;
    FeatureConfig config;
};

struct LearnParams {
    std::optional<int> max_depth;  // root is depth 0
    int min_rows = 1;
};

/// Shannon entropy in bits of the label distribution; 0 for empty or pure counts.
double entropy(const ClassCounts& counts);

struct NumericSplit {
    double threshold = 0.0;
};
struct CategoricalSplit {};

struct SplitCandidate {
    Feature feature = Feature::ContainsTitleTerm;
    std::variant<CategoricalSplit, NumericSplit> split;
    double gain = 0.0;
};

/// Gains closer than this are treated as equal, and a split must beat this to
/// count as informative.
inline constexpr double kGainTolerance = 1e-12;

/// Highest information-gain split over the `columns` of `data` (given as
/// indices into data.columns) restricted to `rows`. Ties go to the earlier
/// canonical feature, then to the smaller threshold. Absent when no split
/// has positive gain.
std::optional<SplitCandidate> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                         std::span<const int> columns);

/// Convenience overload over every row and column.
std::optional<SplitCandidate> best_split(const Dataset& data);

/// Top-down induction. Throws Error{EmptyDataset}.
TrainedModel learn(const Dataset& data, const LearnParams& params = {},
                   const FeatureConfig& cfg = {});

struct Prediction {
    ClassLabel label = ClassLabel::Toc;
    ClassCounts counts;
};

/// `values` aligned with model.columns. Throws MissingFeature when the sizes
/// differ and TypeError on a value of the wrong kind.
Prediction classify(const TrainedModel& model, std::span<const FeatureValue> values);
Prediction classify(const TrainedModel& model, const FeatureVector& features);

std::string export_text(const TrainedModel& model);
std::string export_dot(const TrainedModel& model);

inline constexpr int kModelFormatVersion = 1;

std::string save_model(const TrainedModel& model);
/// Throws Error{UnsupportedVersion} or Error{CorruptModel}.
TrainedModel load_model(std::string_view bytes);

}  // namespace tocd
