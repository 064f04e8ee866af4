#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tocd {

struct Token {
    std::string text;
    std::string font_family = "unknown";
    double font_size = 0.0;  // points; 0 means unknown
    bool bold = false;
    bool italic = false;
    std::optional<std::string> link_target;

    bool operator==(const Token&) const = default;
};

struct Line {
    std::vector<Token> tokens;
    int index = 0;  // zero-based position within the page

    bool operator==(const Line&) const = default;
};

struct Page {
    int index = 1;  // one-based page number from the source
    std::vector<Line> lines;

    bool operator==(const Page&) const = default;
};

struct DocumentModel {
    std::string id;
    std::vector<Page> pages;

    bool operator==(const DocumentModel&) const = default;
};

/// Parses the `<document>/<page>/<line>/<token>` XML schema. Input is always
/// treated as UTF-8; a leading byte-order mark is skipped. Unknown attributes
/// and unknown elements are ignored and reported through `warnings` when it is
/// non-null. Throws Error{MalformedXml} or Error{SchemaViolation}; the message
/// names the offending element path, e.g. `/document/page[2]/line[1]/token[3]`.
DocumentModel parse_document(std::string_view xml_bytes,
                             std::vector<std::string>* warnings = nullptr);

/// Debug writer emitting the same schema; parse_document(write_document(d)) == d.
std::string write_document(const DocumentModel& doc);

/// Token texts joined by single spaces.
std::string line_text(const Line& line);

}  // namespace tocd
