#include "tocdetect/features.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "tocdetect/dataset.hpp"
#include "tocdetect/error.hpp"

namespace tocd {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) words.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return words;
}

bool all_digits(std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

double ratio(std::size_t count, std::size_t total) {
    return total == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(total);
}

}  // namespace

void FeatureConfig::validate() const {
    if (title_terms.empty()) throw Error(ErrorCode::InvalidConfig, "title_terms must not be empty");
    for (const std::string& phrase : title_terms) {
        std::vector<std::string> words = split_words(phrase);
        std::string normalized;
        for (const auto& w : words) normalized += (normalized.empty() ? "" : " ") + w;
        if (phrase.empty() || normalized != phrase || to_lower(phrase) != phrase) {
            throw Error(ErrorCode::InvalidConfig,
                        "title term '" + phrase + "' must be lowercase and single-space separated");
        }
    }
    for (const std::string& kw : section_keywords) {
        if (kw.empty() || to_lower(kw) != kw || split_words(kw).size() != 1) {
            throw Error(ErrorCode::InvalidConfig,
                        "section keyword '" + kw + "' must be a single lowercase word");
        }
    }
    if (max_page_number_digits < 1) {
        throw Error(ErrorCode::InvalidConfig, "max_page_number_digits must be at least 1");
    }
}

FeatureConfig parse_feature_config(std::string_view text) {
    FeatureConfig cfg;
    auto normalize = [](std::string_view item) {
        std::string out;
        for (const auto& w : split_words(to_lower(item))) out += (out.empty() ? "" : " ") + w;
        return out;
    };
    auto split_list = [&](std::string_view value) {
        std::vector<std::string> items;
        for (const std::string& field : split_csv_record(value)) {
            std::string item = normalize(field);
            if (!item.empty()) items.push_back(std::move(item));
        }
        return items;
    };

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view raw = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        std::string line = normalize(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = raw.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::InvalidConfig,
                        "config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = normalize(raw.substr(0, eq));
        const std::string_view value = raw.substr(eq + 1);
        if (key == "title_terms") {
            cfg.title_terms = split_list(value);
        } else if (key == "section_keywords") {
            auto items = split_list(value);
            cfg.section_keywords = {items.begin(), items.end()};
        } else if (key == "max_page_number_digits") {
            const std::string v = normalize(value);
            if (!all_digits(v) || v.size() > 6) {
                throw Error(ErrorCode::InvalidConfig, "config line " + std::to_string(line_no) +
                                                          ": max_page_number_digits must be a "
                                                          "positive integer");
            }
            cfg.max_page_number_digits = std::stoi(v);
        } else {
            throw Error(ErrorCode::InvalidConfig,
                        "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

std::string_view title_style_name(TitleStyle s) {
    switch (s) {
        case TitleStyle::Largest: return "LARGEST";
        case TitleStyle::Intermediate: return "INTERMEDIATE";
        case TitleStyle::MostFrequent: return "MOST_FREQUENT";
        case TitleStyle::NotApplicable: return "NA";
    }
    return "NA";
}

std::optional<TitleStyle> title_style_from_name(std::string_view name) {
    for (TitleStyle s : {TitleStyle::Largest, TitleStyle::Intermediate, TitleStyle::MostFrequent,
                         TitleStyle::NotApplicable}) {
        if (title_style_name(s) == name) return s;
    }
    return std::nullopt;
}

FeatureValue feature_value(const FeatureVector& v, Feature f) {
    switch (f) {
        case Feature::ContainsTitleTerm: return v.contains_title_term;
        case Feature::TitleTermStyle: return std::string(title_style_name(v.title_term_style));
        case Feature::TitleTermFontClass: return v.title_term_font_class;
        case Feature::ContextualTermCount: return v.contextual_term_count;
        case Feature::SectionTermFrequency: return v.section_term_frequency;
        case Feature::TitleTermLinePosition: return v.title_term_line_position;
        case Feature::LineStartNumberFrequency: return v.line_start_number_frequency;
        case Feature::LineEndNumberFrequency: return v.line_end_number_frequency;
        case Feature::NumbersAscending: return v.numbers_ascending;
        case Feature::OutgoingLinkFrequency: return v.outgoing_link_frequency;
    }
    throw std::logic_error("unknown feature");
}

std::optional<TitleMatch> find_title_line(const Page& page, const FeatureConfig& cfg) {
    // Longest phrase first; equal lengths keep configuration order.
    std::vector<std::vector<std::string>> phrases;
    for (const auto& t : cfg.title_terms) phrases.push_back(split_words(t));
    std::vector<std::size_t> order(phrases.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return phrases[a].size() > phrases[b].size();
    });

    std::optional<TitleMatch> best;
    for (const Line& line : page.lines) {
        const std::vector<std::string> words = split_words(to_lower(line_text(line)));
        for (std::size_t p : order) {
            const auto& phrase = phrases[p];
            if (phrase.empty() || phrase.size() > words.size()) continue;
            auto it = std::search(words.begin(), words.end(), phrase.begin(), phrase.end());
            if (it == words.end()) continue;
            const auto contextual = static_cast<std::int64_t>(words.size() - phrase.size());
            if (!best || contextual < best->contextual_count) {
                best = TitleMatch{line.index, contextual, cfg.title_terms[p]};
            }
            break;
        }
    }
    return best;
}

TitleStyle title_style(const Page& page, int title_line_index) {
    const Line& title = page.lines.at(static_cast<std::size_t>(title_line_index));
    if (title.tokens.empty()) {
        throw Error(ErrorCode::EmptyLine,
                    "title line " + std::to_string(title_line_index) + " has no tokens");
    }
    double title_size = 0.0;
    for (const Token& t : title.tokens) title_size = std::max(title_size, t.font_size);

    double page_max = 0.0;
    std::map<double, std::int64_t> histogram;
    for (const Line& line : page.lines) {
        for (const Token& t : line.tokens) {
            page_max = std::max(page_max, t.font_size);
            ++histogram[t.font_size];
        }
    }
    // Modal size; among tied modes the larger size wins (map iterates ascending).
    double modal = 0.0;
    std::int64_t modal_count = -1;
    for (const auto& [size, count] : histogram) {
        if (count >= modal_count) {
            modal = size;
            modal_count = count;
        }
    }
    if (title_size == page_max) return TitleStyle::Largest;
    if (title_size == modal) return TitleStyle::MostFrequent;
    return TitleStyle::Intermediate;
}

bool starts_with_number(const Line& line) {
    if (line.tokens.empty()) return false;
    std::string_view s = line.tokens.front().text;
    if (!s.empty() && s.back() == '.') s.remove_suffix(1);
    if (s.empty()) return false;
    std::size_t i = 0;
    while (true) {
        std::size_t j = i;
        while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
        if (j == i) return false;
        if (j == s.size()) return true;
        if (s[j] != '.') return false;
        i = j + 1;
    }
}

std::optional<std::int64_t> trailing_page_number(const Line& line, const FeatureConfig& cfg) {
    if (line.tokens.empty()) return std::nullopt;
    const std::string& s = line.tokens.back().text;
    if (!all_digits(s) || s.size() > static_cast<std::size_t>(cfg.max_page_number_digits)) {
        return std::nullopt;
    }
    std::int64_t value = 0;
    for (char c : s) value = value * 10 + (c - '0');
    return value;
}

FeatureVector extract_features(const Page& page, const FeatureConfig& cfg) {
    FeatureVector v;
    const std::size_t total = page.lines.size();

    if (auto match = find_title_line(page, cfg)) {
        const Line& title = page.lines[static_cast<std::size_t>(match->line_index)];
        v.contains_title_term = true;
        v.title_term_style = title_style(page, match->line_index);
        v.title_term_font_class = title.tokens.front().font_family;
        v.contextual_term_count = match->contextual_count;
        v.title_term_line_position = ratio(static_cast<std::size_t>(match->line_index), total);
    }

    std::size_t section_lines = 0;
    std::size_t start_lines = 0;
    std::size_t end_lines = 0;
    std::size_t link_lines = 0;
    std::optional<std::int64_t> previous;
    for (const Line& line : page.lines) {
        const bool has_keyword = std::any_of(line.tokens.begin(), line.tokens.end(),
                                             [&](const Token& t) {
                                                 return cfg.section_keywords.count(to_lower(t.text)) > 0;
                                             });
        const bool has_link = std::any_of(line.tokens.begin(), line.tokens.end(),
                                          [](const Token& t) { return t.link_target.has_value(); });
        section_lines += has_keyword;
        link_lines += has_link;
        start_lines += starts_with_number(line);
        if (auto number = trailing_page_number(line, cfg)) {
            ++end_lines;
            if (previous && *number < *previous) v.numbers_ascending = false;
            previous = number;
        }
    }
    v.section_term_frequency = ratio(section_lines, total);
    v.line_start_number_frequency = ratio(start_lines, total);
    v.line_end_number_frequency = ratio(end_lines, total);
    v.outgoing_link_frequency = ratio(link_lines, total);
    return v;
}

std::string write_feature_csv(const std::vector<FeatureRow>& rows) {
    const auto labeled = std::count_if(rows.begin(), rows.end(),
                                       [](const FeatureRow& r) { return r.label.has_value(); });
    if (labeled != 0 && static_cast<std::size_t>(labeled) != rows.size()) {
        throw Error(ErrorCode::MixedLabeling, std::to_string(labeled) + " of " +
                                                  std::to_string(rows.size()) +
                                                  " rows carry a label");
    }
    std::string out = "page";
    for (Feature f : kCanonicalFeatures) out += "," + std::string(feature_name(f));
    if (labeled) out += ",label";
    out += '\n';
    for (const FeatureRow& row : rows) {
        out += quote_csv_field(row.page_id);
        for (Feature f : kCanonicalFeatures) {
            out += ',' + quote_csv_field(format_value(feature_value(row.features, f)));
        }
        if (row.label) out += "," + std::string(label_name(*row.label));
        out += '\n';
    }
    return out;
}

}  // namespace tocd
