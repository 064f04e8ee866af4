#include "tocdetect/document.hpp"

#include <expat.h>

#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "tocdetect/error.hpp"
#include "tocdetect/schema.hpp"

namespace tocd {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

enum class Level { Root, Document, Page, Line, Token };

struct Frame {
    Level level;
    std::string path;
    std::map<std::string, int, std::less<>> child_counts;
};

class DocumentBuilder {
public:
    DocumentBuilder(XML_Parser parser, std::vector<std::string>* warnings)
        : parser_(parser), warnings_(warnings) {
        stack_.push_back({Level::Root, "", {}});
    }

    void start(std::string_view name, const XML_Char** atts) {
        if (failed()) return;
        if (skip_depth_ > 0) {
            ++skip_depth_;
            return;
        }
        Frame& parent = stack_.back();
        const int n = ++parent.child_counts[std::string(name)];
        std::string path = parent.path + "/" + std::string(name);
        if (parent.level != Level::Root) path += "[" + std::to_string(n) + "]";

        switch (parent.level) {
            case Level::Root:
                if (name != "document") {
                    return fail(ErrorCode::SchemaViolation,
                                path + ": root element must be <document>");
                }
                begin_document(path, atts);
                stack_.push_back({Level::Document, path, {}});
                return;
            case Level::Document:
                if (name == "page") {
                    begin_page(path, atts);
                    stack_.push_back({Level::Page, path, {}});
                    return;
                }
                break;
            case Level::Page:
                if (name == "line") {
                    warn_unknown_attributes(path, atts, {});
                    Page& page = doc_.pages.back();
                    page.lines.push_back(Line{{}, static_cast<int>(page.lines.size())});
                    stack_.push_back({Level::Line, path, {}});
                    return;
                }
                break;
            case Level::Line:
                if (name == "token") {
                    begin_token(path, atts);
                    stack_.push_back({Level::Token, path, {}});
                    return;
                }
                break;
            case Level::Token:
                break;
        }
        warn(path + ": ignoring unknown element <" + std::string(name) + ">");
        skip_depth_ = 1;
    }

    void end() {
        if (failed()) return;
        if (skip_depth_ > 0) {
            --skip_depth_;
            return;
        }
        const Frame& frame = stack_.back();
        if (frame.level == Level::Token) {
            Token& tok = doc_.pages.back().lines.back().tokens.back();
            tok.text = trim(text_);
            text_.clear();
            if (tok.text.empty()) {
                return fail(ErrorCode::SchemaViolation, frame.path + ": token text is empty");
            }
        } else if (frame.level == Level::Document && doc_.pages.empty()) {
            return fail(ErrorCode::SchemaViolation, frame.path + ": document has no pages");
        }
        stack_.pop_back();
    }

    void characters(std::string_view data) {
        if (failed() || skip_depth_ > 0) return;
        const Frame& frame = stack_.back();
        if (frame.level == Level::Token) {
            text_.append(data);
        } else if (!trim(data).empty()) {
            warn(frame.path + ": ignoring text outside <token>");
        }
    }

    bool failed() const { return error_.has_value(); }
    const Error& error() const { return *error_; }
    std::string current_path() const { return stack_.back().path; }
    DocumentModel take() { return std::move(doc_); }
    bool saw_document() const { return saw_document_; }

private:
    void fail(ErrorCode code, std::string message) {
        error_.emplace(code, std::move(message));
        XML_StopParser(parser_, XML_FALSE);
    }

    void warn(std::string message) {
        if (warnings_) warnings_->push_back(std::move(message));
    }

    void warn_unknown_attributes(const std::string& path, const XML_Char** atts,
                                 std::initializer_list<std::string_view> known) {
        for (int i = 0; atts[i]; i += 2) {
            std::string_view key = atts[i];
            bool ok = false;
            for (auto k : known) ok = ok || k == key;
            if (!ok) warn(path + ": ignoring unknown attribute '" + std::string(key) + "'");
        }
    }

    static const XML_Char* find_attr(const XML_Char** atts, std::string_view key) {
        for (int i = 0; atts[i]; i += 2) {
            if (key == atts[i]) return atts[i + 1];
        }
        return nullptr;
    }

    void begin_document(const std::string& path, const XML_Char** atts) {
        saw_document_ = true;
        warn_unknown_attributes(path, atts, {"id"});
        const XML_Char* id = find_attr(atts, "id");
        if (!id) return fail(ErrorCode::SchemaViolation, path + ": missing attribute 'id'");
        doc_.id = id;
    }

    void begin_page(const std::string& path, const XML_Char** atts) {
        warn_unknown_attributes(path, atts, {"index"});
        const XML_Char* raw = find_attr(atts, "index");
        if (!raw) return fail(ErrorCode::SchemaViolation, path + ": missing attribute 'index'");
        std::string_view s = raw;
        int index = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), index);
        if (s.empty() || s.front() == '-' || ec != std::errc{} || ptr != s.data() + s.size() ||
            index < 1) {
            return fail(ErrorCode::SchemaViolation,
                        path + ": index must be a positive integer, got '" + std::string(s) + "'");
        }
        if (!doc_.pages.empty() && index <= doc_.pages.back().index) {
            return fail(ErrorCode::SchemaViolation,
                        path + ": page index " + std::to_string(index) +
                            " does not follow " + std::to_string(doc_.pages.back().index));
        }
        doc_.pages.push_back(Page{index, {}});
    }

    void begin_token(const std::string& path, const XML_Char** atts) {
        warn_unknown_attributes(path, atts, {"font", "size", "bold", "italic", "link"});
        Token tok;
        if (const XML_Char* font = find_attr(atts, "font")) tok.font_family = font;
        if (const XML_Char* raw = find_attr(atts, "size")) {
            std::string_view s = raw;
            double size = 0.0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), size,
                                             std::chars_format::fixed);
            if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() ||
                !std::isfinite(size) || size < 0.0) {
                return fail(ErrorCode::SchemaViolation,
                            path + ": size must be a non-negative decimal, got '" +
                                std::string(s) + "'");
            }
            tok.font_size = size + 0.0;  // drop the sign of -0
        }
        for (auto [key, field] : {std::pair{"bold", &tok.bold}, std::pair{"italic", &tok.italic}}) {
            const XML_Char* raw = find_attr(atts, key);
            if (!raw) continue;
            std::string_view s = raw;
            if (s == "true") {
                *field = true;
            } else if (s == "false") {
                *field = false;
            } else {
                return fail(ErrorCode::SchemaViolation, path + ": " + key +
                                                            " must be true or false, got '" +
                                                            std::string(s) + "'");
            }
        }
        if (const XML_Char* link = find_attr(atts, "link")) tok.link_target = link;
        doc_.pages.back().lines.back().tokens.push_back(std::move(tok));
        text_.clear();
    }

    XML_Parser parser_;
    std::vector<std::string>* warnings_;
    std::vector<Frame> stack_;
    DocumentModel doc_;
    std::string text_;
    int skip_depth_ = 0;
    bool saw_document_ = false;
    std::optional<Error> error_;
};

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** atts) {
    static_cast<DocumentBuilder*>(data)->start(name, atts);
}

void XMLCALL on_end(void* data, const XML_Char*) { static_cast<DocumentBuilder*>(data)->end(); }

void XMLCALL on_text(void* data, const XML_Char* s, int len) {
    static_cast<DocumentBuilder*>(data)->characters(std::string_view(s, static_cast<std::size_t>(len)));
}

struct ParserDeleter {
    void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

std::string format_size(double x) {
    char buf[512];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed);
    if (ec != std::errc{}) throw std::logic_error("to_chars failed");
    return std::string(buf, end);
}

void escape_into(std::string& out, std::string_view s) {
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            case '\n': out += "&#10;"; break;
            case '\r': out += "&#13;"; break;
            case '\t': out += "&#9;"; break;
            default: out += c;
        }
    }
}

}  // namespace

DocumentModel parse_document(std::string_view xml_bytes, std::vector<std::string>* warnings) {
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter> parser(
        XML_ParserCreate("UTF-8"));
    if (!parser) throw std::bad_alloc();

    DocumentBuilder builder(parser.get(), warnings);
    XML_SetUserData(parser.get(), &builder);
    XML_SetElementHandler(parser.get(), on_start, on_end);
    XML_SetCharacterDataHandler(parser.get(), on_text);

    const auto status = XML_Parse(parser.get(), xml_bytes.data(),
                                  static_cast<int>(xml_bytes.size()), XML_TRUE);
    if (builder.failed()) throw builder.error();
    if (status != XML_STATUS_OK) {
        std::ostringstream msg;
        std::string path = builder.current_path();
        msg << (path.empty() ? "/" : path) << ": "
            << XML_ErrorString(XML_GetErrorCode(parser.get())) << " at line "
            << XML_GetCurrentLineNumber(parser.get()) << ", column "
            << XML_GetCurrentColumnNumber(parser.get());
        throw Error(ErrorCode::MalformedXml, msg.str());
    }
    if (!builder.saw_document()) {
        throw Error(ErrorCode::SchemaViolation, "/: missing <document> element");
    }
    return builder.take();
}

std::string write_document(const DocumentModel& doc) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<document id=\"";
    escape_into(out, doc.id);
    out += "\">\n";
    for (const Page& page : doc.pages) {
        out += "  <page index=\"" + std::to_string(page.index) + "\">\n";
        for (const Line& line : page.lines) {
            if (line.tokens.empty()) {
                out += "    <line/>\n";
                continue;
            }
            out += "    <line>\n";
            for (const Token& tok : line.tokens) {
                out += "      <token font=\"";
                escape_into(out, tok.font_family);
                out += "\" size=\"" + format_size(tok.font_size) + "\"";
                if (tok.bold) out += " bold=\"true\"";
                if (tok.italic) out += " italic=\"true\"";
                if (tok.link_target) {
                    out += " link=\"";
                    escape_into(out, *tok.link_target);
                    out += "\"";
                }
                out += ">";
                escape_into(out, tok.text);
                out += "</token>\n";
            }
            out += "    </line>\n";
        }
        out += "  </page>\n";
    }
    out += "</document>\n";
    return out;
}

std::string line_text(const Line& line) {
    std::string out;
    for (const Token& tok : line.tokens) {
        if (!out.empty()) out += ' ';
        out += tok.text;
    }
    return out;
}

}  // namespace tocd
