#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace tocd {

// Canonical feature order. Used for CSV/model column names and as the
// tie-break order when two splits have the same gain.
enum class Feature : int {
    ContainsTitleTerm = 0,
    TitleTermStyle,
    TitleTermFontClass,
    ContextualTermCount,
    SectionTermFrequency,
    TitleTermLinePosition,
    LineStartNumberFrequency,
    LineEndNumberFrequency,
    NumbersAscending,
    OutgoingLinkFrequency,
};

inline constexpr int kFeatureCount = 10;

inline constexpr std::array<Feature, kFeatureCount> kCanonicalFeatures = {
    Feature::ContainsTitleTerm,        Feature::TitleTermStyle,
    Feature::TitleTermFontClass,       Feature::ContextualTermCount,
    Feature::SectionTermFrequency,     Feature::TitleTermLinePosition,
    Feature::LineStartNumberFrequency, Feature::LineEndNumberFrequency,
    Feature::NumbersAscending,         Feature::OutgoingLinkFrequency,
};

enum class FeatureKind { Boolean, Categorical, Integer, Real };

FeatureKind feature_kind(Feature f);
std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name);

/// Boolean and categorical features are split multiway, integer and real
/// ones by threshold.
inline bool is_numeric(FeatureKind k) {
    return k == FeatureKind::Integer || k == FeatureKind::Real;
}

enum class ClassLabel { Toc, NonToc };

std::string_view label_name(ClassLabel label);  // "TOC" / "NON-TOC"
std::optional<ClassLabel> label_from_name(std::string_view name);

/// Per-class tallies. The majority label breaks ties toward TOC.
struct ClassCounts {
    std::int64_t toc = 0;
    std::int64_t non_toc = 0;

    std::int64_t total() const { return toc + non_toc; }
    ClassLabel majority() const { return toc >= non_toc ? ClassLabel::Toc : ClassLabel::NonToc; }
    void add(ClassLabel label, std::int64_t n = 1) {
        (label == ClassLabel::Toc ? toc : non_toc) += n;
    }
    bool operator==(const ClassCounts&) const = default;
};

/// A single cell value. Categorical values hold their canonical spelling
/// (e.g. "MOST_FREQUENT" or a font family name).
using FeatureValue = std::variant<bool, std::string, std::int64_t, double>;

/// True when `v` holds the alternative that `kind` calls for.
bool value_matches_kind(const FeatureValue& v, FeatureKind kind);

/// Branch key for multiway splits: "YES"/"NO" for booleans, the category
/// string otherwise. Only valid for boolean/categorical values.
std::string category_key(const FeatureValue& v);

/// Numeric view of an integer or real value.
double numeric_value(const FeatureValue& v);

/// Text used in CSV cells and exports.
std::string format_value(const FeatureValue& v);

/// Shortest decimal text that parses back to the same double.
std::string format_real(double x);

}  // namespace tocd
