#include "tocdetect/schema.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "tocdetect/error.hpp"

namespace tocd {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedXml: return "MalformedXml";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::EmptyLine: return "EmptyLine";
        case ErrorCode::MixedLabeling: return "MixedLabeling";
        case ErrorCode::UnknownColumn: return "UnknownColumn";
        case ErrorCode::MissingLabelColumn: return "MissingLabelColumn";
        case ErrorCode::TypeError: return "TypeError";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::MissingFeature: return "MissingFeature";
        case ErrorCode::ColumnMismatch: return "ColumnMismatch";
        case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
        case ErrorCode::CorruptModel: return "CorruptModel";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "contains_title_term",         "title_term_style",          "title_term_font_class",
    "contextual_term_count",       "section_term_frequency",    "title_term_line_position",
    "line_start_number_frequency", "line_end_number_frequency", "numbers_ascending",
    "outgoing_link_frequency",
};

}  // namespace

FeatureKind feature_kind(Feature f) {
    switch (f) {
        case Feature::ContainsTitleTerm:
        case Feature::NumbersAscending: return FeatureKind::Boolean;
        case Feature::TitleTermStyle:
        case Feature::TitleTermFontClass: return FeatureKind::Categorical;
        case Feature::ContextualTermCount: return FeatureKind::Integer;
        default: return FeatureKind::Real;
    }
}

std::string_view feature_name(Feature f) { return kNames.at(static_cast<std::size_t>(f)); }

std::optional<Feature> feature_from_name(std::string_view name) {
    for (Feature f : kCanonicalFeatures) {
        if (feature_name(f) == name) return f;
    }
    return std::nullopt;
}

std::string_view label_name(ClassLabel label) {
    return label == ClassLabel::Toc ? "TOC" : "NON-TOC";
}

std::optional<ClassLabel> label_from_name(std::string_view name) {
    if (name == "TOC") return ClassLabel::Toc;
    if (name == "NON-TOC" || name == "NON_TOC") return ClassLabel::NonToc;
    return std::nullopt;
}

bool value_matches_kind(const FeatureValue& v, FeatureKind kind) {
    switch (kind) {
        case FeatureKind::Boolean: return std::holds_alternative<bool>(v);
        case FeatureKind::Categorical: return std::holds_alternative<std::string>(v);
        case FeatureKind::Integer: return std::holds_alternative<std::int64_t>(v);
        case FeatureKind::Real: return std::holds_alternative<double>(v);
    }
    return false;
}

std::string category_key(const FeatureValue& v) {
    if (const bool* b = std::get_if<bool>(&v)) return *b ? "YES" : "NO";
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    throw std::logic_error("category_key on numeric value");
}

double numeric_value(const FeatureValue& v) {
    if (const double* d = std::get_if<double>(&v)) return *d;
    if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    throw std::logic_error("numeric_value on categorical value");
}

std::string format_real(double x) {
    if (x == 0.0) return "0";  // also folds -0
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw std::logic_error("to_chars failed");
    return std::string(buf, end);
}

std::string format_value(const FeatureValue& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, bool>) {
                return x ? "YES" : "NO";
            } else if constexpr (std::is_same_v<T, std::string>) {
                return x;
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(x);
            } else {
                return format_real(x);
            }
        },
        v);
}

}  // namespace tocd
