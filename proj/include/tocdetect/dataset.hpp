#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tocdetect/schema.hpp"

namespace tocd {

struct Example {
    std::vector<FeatureValue> values;  // aligned with Dataset::columns
    ClassLabel label = ClassLabel::Toc;
    std::string id;                    // page id; empty when the CSV has no `page` column

    bool operator==(const Example&) const = default;
};

/// Labeled rows over an ordered subset of the canonical features.
struct Dataset {
    std::vector<Feature> columns;
    std::vector<Example> rows;

    bool has_ids() const;
    ClassCounts label_counts() const;
    /// Position of `f` in `columns`, or -1.
    int column_index(Feature f) const;

    /// Checks column uniqueness, row width, value types and [0,1] ranges.
    /// Throws Error{TypeError} / Error{UnknownColumn}.
    void validate() const;

    bool operator==(const Dataset&) const = default;
};

/// Parses the training CSV. Header: optional leading `page`, then canonical
/// feature names in any order, then `label`. Booleans are YES/NO, styles are
/// uppercase with `-` or `_`, reals are decimal literals. Fields may be
/// double-quoted. Throws UnknownColumn, MissingLabelColumn, TypeError or
/// EmptyDataset.
Dataset load_csv(std::string_view bytes);

std::string write_csv(const Dataset& data);

/// The ten-row sample training set, as shipped in fixtures/table1.csv.
Dataset table1_fixture();
std::string_view table1_csv();

/// Splits one CSV record (no trailing newline) honoring double quotes.
std::vector<std::string> split_csv_record(std::string_view record);
std::string quote_csv_field(std::string_view field);

}  // namespace tocd
