#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tocdetect/document.hpp"
#include "tocdetect/schema.hpp"

namespace tocd {

struct FeatureConfig {
    std::vector<std::string> title_terms = {"table of contents", "table of content", "contents",
                                            "content"};
    std::set<std::string> section_keywords = {"chapter", "section",      "part",  "appendix",
                                              "preface", "introduction", "bibliography", "index"};
    int max_page_number_digits = 4;

    /// Throws Error{InvalidConfig} if a phrase is empty, not lowercase, or not
    /// single-space separated, or if the digit cap is below 1.
    void validate() const;

    bool operator==(const FeatureConfig&) const = default;
};

/// Reads the key-value config format:
///
///     # comment
///     title_terms = table of contents, contents
///     section_keywords = chapter, section
///     max_page_number_digits = 3
///
/// Keys not present keep their defaults. List items are lowercased and
/// whitespace-collapsed. Throws Error{InvalidConfig}.
FeatureConfig parse_feature_config(std::string_view text);

enum class TitleStyle { Largest, Intermediate, MostFrequent, NotApplicable };

std::string_view title_style_name(TitleStyle s);  // LARGEST, INTERMEDIATE, MOST_FREQUENT, NA
std::optional<TitleStyle> title_style_from_name(std::string_view name);

struct FeatureVector {
    bool contains_title_term = false;
    TitleStyle title_term_style = TitleStyle::NotApplicable;
    std::string title_term_font_class = "NA";
    std::int64_t contextual_term_count = 0;
    double section_term_frequency = 0.0;
    double title_term_line_position = 1.0;
    double line_start_number_frequency = 0.0;
    double line_end_number_frequency = 0.0;
    bool numbers_ascending = true;
    double outgoing_link_frequency = 0.0;

    bool operator==(const FeatureVector&) const = default;
};

FeatureValue feature_value(const FeatureVector& v, Feature f);

struct TitleMatch {
    int line_index = 0;
    std::int64_t contextual_count = 0;
    std::string matched_phrase;

    bool operator==(const TitleMatch&) const = default;
};

/// Finds the line that most plausibly is the TOC heading: among lines whose
/// lowercased word sequence contains a configured phrase, the one with the
/// fewest other words, earliest line first on ties.
std::optional<TitleMatch> find_title_line(const Page& page, const FeatureConfig& cfg);

/// Size rank of the title line relative to the page. Throws Error{EmptyLine}.
TitleStyle title_style(const Page& page, int title_line_index);

/// First token looks like a section number: DIGITS("." DIGITS)* "."?
bool starts_with_number(const Line& line);

/// Last token consisting of 1..max_page_number_digits decimal digits.
std::optional<std::int64_t> trailing_page_number(const Line& line, const FeatureConfig& cfg);

FeatureVector extract_features(const Page& page, const FeatureConfig& cfg);

struct FeatureRow {
    std::string page_id;
    FeatureVector features;
    std::optional<ClassLabel> label;
};

/// CSV with a leading `page` column, the ten canonical columns, and a
/// trailing `label` column when rows are labeled. Throws Error{MixedLabeling}
/// when only some rows carry a label.
std::string write_feature_csv(const std::vector<FeatureRow>& rows);

}  // namespace tocd
