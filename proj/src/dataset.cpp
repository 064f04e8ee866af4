#include "tocdetect/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "tocdetect/error.hpp"
#include "tocdetect/features.hpp"

namespace tocd {

namespace {

// Column order matches the printed table: title presence, title style, line
// endings, outgoing links, line starts.
constexpr std::string_view kTable1Csv =
    "contains_title_term,title_term_style,line_end_number_frequency,"
    "outgoing_link_frequency,line_start_number_frequency,label\n"
    "YES,LARGEST,0.8,0.89,0.8,TOC\n"
    "YES,LARGEST,0.1,0.56,0.05,TOC\n"
    "YES,INTERMEDIATE,0.9,0.67,0.13,TOC\n"
    "YES,INTERMEDIATE,0.2,0.96,0.18,TOC\n"
    "YES,MOST_FREQUENT,0.86,0.91,0.83,TOC\n"
    "YES,MOST_FREQUENT,0.13,0.85,0.07,TOC\n"
    "NO,NA,0.98,0.91,0.12,TOC\n"
    "NO,NA,0.16,0.87,0.103,TOC\n"
    "NO,NA,0.87,0.3,0.02,NON-TOC\n"
    "YES,MOST_FREQUENT,0.2,0.86,0.88,NON-TOC\n";

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

/// Splits the whole input into records; quoted fields may span newlines.
std::vector<std::string_view> split_records(std::string_view text) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::vector<std::string_view> records;
    bool quoted = false;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i < text.size() && text[i] == '"') quoted = !quoted;
        if (i == text.size() || (text[i] == '\n' && !quoted)) {
            std::string_view rec = text.substr(start, i - start);
            if (!rec.empty() && rec.back() == '\r') rec.remove_suffix(1);
            if (!trim(rec).empty()) records.push_back(rec);
            start = i + 1;
        }
    }
    return records;
}

[[noreturn]] void type_error(std::size_t row, Feature f, std::string_view cell,
                             std::string_view why) {
    throw Error(ErrorCode::TypeError, "row " + std::to_string(row) + ", column " +
                                          std::string(feature_name(f)) + ": '" +
                                          std::string(cell) + "' " + std::string(why));
}

FeatureValue parse_cell(std::string_view cell, Feature f, std::size_t row) {
    switch (feature_kind(f)) {
        case FeatureKind::Boolean:
            if (cell == "YES") return true;
            if (cell == "NO") return false;
            type_error(row, f, cell, "is not YES or NO");
        case FeatureKind::Categorical: {
            if (f != Feature::TitleTermStyle) {
                if (cell.empty()) type_error(row, f, cell, "is empty");
                return std::string(cell);
            }
            std::string norm(cell);
            for (char& c : norm) {
                c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            }
            if (!title_style_from_name(norm)) {
                type_error(row, f, cell, "is not one of LARGEST, INTERMEDIATE, MOST_FREQUENT, NA");
            }
            return norm;
        }
        case FeatureKind::Integer: {
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || v < 0) {
                type_error(row, f, cell, "is not a non-negative integer");
            }
            return v;
        }
        case FeatureKind::Real: {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() ||
                !std::isfinite(v)) {
                type_error(row, f, cell, "is not a decimal number");
            }
            if (v < 0.0 || v > 1.0) type_error(row, f, cell, "is outside [0,1]");
            return v + 0.0;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace

std::vector<std::string> split_csv_record(std::string_view record) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < record.size(); ++i) {
        const char c = record[i];
        if (quoted) {
            if (c == '"' && i + 1 < record.size() && record[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(was_quoted ? field : std::string(trim(field)));
            field.clear();
            was_quoted = false;
        } else {
            field += c;
        }
    }
    fields.push_back(was_quoted ? field : std::string(trim(field)));
    return fields;
}

std::string quote_csv_field(std::string_view field) {
    const bool needs_quotes =
        field.find_first_of(",\"\n\r") != std::string_view::npos ||
        (!field.empty() && (std::isspace(static_cast<unsigned char>(field.front())) ||
                            std::isspace(static_cast<unsigned char>(field.back()))));
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

bool Dataset::has_ids() const {
    return std::any_of(rows.begin(), rows.end(), [](const Example& e) { return !e.id.empty(); });
}

ClassCounts Dataset::label_counts() const {
    ClassCounts c;
    for (const Example& e : rows) c.add(e.label);
    return c;
}

int Dataset::column_index(Feature f) const {
    auto it = std::find(columns.begin(), columns.end(), f);
    return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

void Dataset::validate() const {
    if (columns.empty()) throw Error(ErrorCode::UnknownColumn, "dataset has no feature columns");
    std::set<Feature> seen(columns.begin(), columns.end());
    if (seen.size() != columns.size()) {
        throw Error(ErrorCode::UnknownColumn, "dataset repeats a feature column");
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Example& e = rows[r];
        if (e.values.size() != columns.size()) {
            throw Error(ErrorCode::TypeError, "row " + std::to_string(r + 1) + " has " +
                                                  std::to_string(e.values.size()) +
                                                  " values for " +
                                                  std::to_string(columns.size()) + " columns");
        }
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const Feature f = columns[c];
            const FeatureValue& v = e.values[c];
            if (!value_matches_kind(v, feature_kind(f))) {
                type_error(r + 1, f, format_value(v), "has the wrong type");
            }
            if (const double* d = std::get_if<double>(&v); d && !(*d >= 0.0 && *d <= 1.0)) {
                type_error(r + 1, f, format_value(v), "is outside [0,1]");
            }
            if (const std::int64_t* i = std::get_if<std::int64_t>(&v); i && *i < 0) {
                type_error(r + 1, f, format_value(v), "is negative");
            }
            if (f == Feature::TitleTermStyle &&
                !title_style_from_name(std::get<std::string>(v))) {
                type_error(r + 1, f, format_value(v), "is not a title style");
            }
        }
    }
}

Dataset load_csv(std::string_view bytes) {
    const auto records = split_records(bytes);
    if (records.empty()) throw Error(ErrorCode::EmptyDataset, "CSV has no header");

    std::vector<std::string> header = split_csv_record(records.front());
    if (header.empty() || header.back() != "label") {
        throw Error(ErrorCode::MissingLabelColumn, "last CSV column must be 'label'");
    }
    const bool has_ids = header.front() == "page";
    const std::size_t first = has_ids ? 1 : 0;

    Dataset data;
    std::set<Feature> seen;
    for (std::size_t i = first; i + 1 < header.size(); ++i) {
        auto f = feature_from_name(header[i]);
        if (!f) throw Error(ErrorCode::UnknownColumn, "unknown column '" + header[i] + "'");
        if (!seen.insert(*f).second) {
            throw Error(ErrorCode::UnknownColumn, "duplicate column '" + header[i] + "'");
        }
        data.columns.push_back(*f);
    }
    if (data.columns.empty()) throw Error(ErrorCode::UnknownColumn, "CSV has no feature columns");

    for (std::size_t r = 1; r < records.size(); ++r) {
        std::vector<std::string> cells = split_csv_record(records[r]);
        if (cells.size() != header.size()) {
            throw Error(ErrorCode::TypeError, "row " + std::to_string(r) + " has " +
                                                  std::to_string(cells.size()) +
                                                  " fields, header has " +
                                                  std::to_string(header.size()));
        }
        Example e;
        if (has_ids) e.id = cells.front();
        for (std::size_t c = 0; c < data.columns.size(); ++c) {
            e.values.push_back(parse_cell(cells[first + c], data.columns[c], r));
        }
        auto label = label_from_name(cells.back());
        if (!label) {
            throw Error(ErrorCode::TypeError, "row " + std::to_string(r) + ", column label: '" +
                                                  cells.back() + "' is not TOC or NON-TOC");
        }
        e.label = *label;
        data.rows.push_back(std::move(e));
    }
    if (data.rows.empty()) throw Error(ErrorCode::EmptyDataset, "CSV has a header but no rows");
    return data;
}

std::string write_csv(const Dataset& data) {
    const bool ids = data.has_ids();
    std::string out = ids ? "page," : "";
    for (Feature f : data.columns) out += std::string(feature_name(f)) + ",";
    out += "label\n";
    for (const Example& e : data.rows) {
        if (ids) out += quote_csv_field(e.id) + ",";
        for (const FeatureValue& v : e.values) out += quote_csv_field(format_value(v)) + ",";
        out += std::string(label_name(e.label)) + "\n";
    }
    return out;
}

std::string_view table1_csv() { return kTable1Csv; }

Dataset table1_fixture() { return load_csv(kTable1Csv); }

}  // namespace tocd
