// Acceptance checks, one PASS/FAIL line per criterion. Criteria 1, 2, 5 and 7
// drive the real tocdetect binary; the rest call the library directly.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "support/oracle.hpp"
#include "support/pages.hpp"
#include "tocdetect/cli.hpp"
#include "tocdetect/dataset.hpp"
#include "tocdetect/document.hpp"
#include "tocdetect/error.hpp"
#include "tocdetect/pipeline.hpp"
#include "tocdetect/tree.hpp"

namespace fs = std::filesystem;
using namespace tocd;

namespace {

struct Check {
    bool ok = true;
    std::string detail;
    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
    void expect(bool cond, const std::string& why) {
        if (!cond) fail(why);
    }
};

fs::path g_work;

struct Proc {
    int code;
    std::string out;
};

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

Proc tocdetect(const std::vector<std::string>& args) {
    std::string cmd = quote(TOCD_CLI);
    for (const auto& a : args) cmd += " " + quote(a);
    cmd += " 2>/dev/null";
    Proc p{-1, {}};
    FILE* f = popen(cmd.c_str(), "r");
    if (!f) return p;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, f)) > 0) p.out.append(buf, n);
    const int status = pclose(f);
    p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return p;
}

std::string work(const std::string& name) { return (g_work / name).string(); }

std::string slurp(const std::string& path) {
    try {
        return cli::read_file(path);
    } catch (const Error&) {
        return "<unreadable " + path + ">";
    }
}

std::vector<FeatureValue> table1_row(bool contains, const char* style, double end, double link, double start) {
    return {contains, std::string(style), end, link, start};
}

// 1
void table1_fidelity(Check& c) {
    const Proc p = tocdetect({"fixture", "--table1"});
    c.expect(p.code == 0, "fixture exited " + std::to_string(p.code));
    const Dataset d = load_csv(p.out);
    c.expect(d.label_counts() == ClassCounts{8, 2}, "label counts are not 8/2");
    const std::vector<std::pair<std::vector<FeatureValue>, ClassLabel>> rows = {
        {table1_row(true, "LARGEST", 0.8, 0.89, 0.8), ClassLabel::Toc},
        {table1_row(true, "LARGEST", 0.1, 0.56, 0.05), ClassLabel::Toc},
        {table1_row(true, "INTERMEDIATE", 0.9, 0.67, 0.13), ClassLabel::Toc},
        {table1_row(true, "INTERMEDIATE", 0.2, 0.96, 0.18), ClassLabel::Toc},
        {table1_row(true, "MOST_FREQUENT", 0.86, 0.91, 0.83), ClassLabel::Toc},
        {table1_row(true, "MOST_FREQUENT", 0.13, 0.85, 0.07), ClassLabel::Toc},
        {table1_row(false, "NA", 0.98, 0.91, 0.12), ClassLabel::Toc},
        {table1_row(false, "NA", 0.16, 0.87, 0.103), ClassLabel::Toc},
        {table1_row(false, "NA", 0.87, 0.3, 0.02), ClassLabel::NonToc},
        {table1_row(true, "MOST_FREQUENT", 0.2, 0.86, 0.88), ClassLabel::NonToc},
    };
    if (d.rows.size() != rows.size()) return c.fail("expected 10 rows, got " + std::to_string(d.rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        c.expect(d.rows[i].values == rows[i].first && d.rows[i].label == rows[i].second,
                 "row " + std::to_string(i + 1) + " differs");
    }
}

// 2
void training_consistency(Check& c) {
    const Dataset d = table1_fixture();
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        for (std::size_t j = i + 1; j < d.rows.size(); ++j) {
            c.expect(!(d.rows[i].values == d.rows[j].values && d.rows[i].label != d.rows[j].label),
                     "rows " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " contradict");
        }
    }
    const std::string csv = work("c2.csv");
    const std::string model = work("c2.json");
    c.expect(tocdetect({"fixture", "--table1", "--out", csv}).code == 0, "fixture failed");
    c.expect(tocdetect({"train", csv, "--out", model}).code == 0, "train failed");
    const Proc e = tocdetect({"eval", model, csv, "--format", "json"});
    c.expect(e.code == 0, "eval exited " + std::to_string(e.code));
    c.expect(e.out.find("\"tp\": 8") != std::string::npos && e.out.find("\"tn\": 2") != std::string::npos &&
                 e.out.find("\"fp\": 0") != std::string::npos && e.out.find("\"fn\": 0") != std::string::npos,
             "confusion is not 8/0/0/2: " + e.out);
    c.expect(e.out.find("\"accuracy\": 1.0") != std::string::npos, "accuracy is not 1.0");
}

// 3
void gain_oracle(Check& c) {
    std::mt19937 rng(20241015);
    int compared = 0;
    for (int i = 0; i < 2000; ++i) {
        const Dataset d = testkit::random_dataset(rng, 8, 3);
        const auto got = best_split(d);
        const auto want = testkit::brute_force_best_split(d);
        const std::string where = "dataset " + std::to_string(i);
        if (got.has_value() != want.has_value()) {
            c.fail(where + ": split presence differs");
            continue;
        }
        if (!got) continue;
        ++compared;
        const auto* num = std::get_if<NumericSplit>(&got->split);
        c.expect(got->feature == want->feature, where + ": feature differs");
        c.expect((num != nullptr) == want->numeric, where + ": split kind differs");
        c.expect(std::abs(got->gain - want->gain) <= 1e-9, where + ": gain differs");
        if (num && want->numeric) c.expect(num->threshold == want->threshold, where + ": threshold differs");
    }
    c.expect(compared >= 1000, "only " + std::to_string(compared) + " datasets had a split");
}

// 4
void feature_oracle(Check& c) {
    const auto& fixtures = testkit::page_fixtures();
    c.expect(fixtures.size() >= 10, "fewer than 10 fixture pages");
    for (const auto& f : fixtures) {
        const DocumentModel doc = testkit::load_page_fixture(f.file);
        std::string why;
        if (doc.pages.size() != 1) {
            c.fail(f.file + ": expected one page");
            continue;
        }
        c.expect(testkit::features_match(extract_features(doc.pages[0], {}), f.expected, 1e-12, &why),
                 f.file + ": " + why);
    }
}

// 5
void determinism(Check& c) {
    const std::string golden = std::string(TOCD_TEST_DATA) + "/golden/";
    const std::string want_model = slurp(golden + "table1_model.json");
    const std::string want_text = slurp(golden + "table1_tree.txt");
    const std::string want_dot = slurp(golden + "table1_tree.dot");

    std::vector<std::string> inputs;
    for (int run = 0; run < 5; ++run) inputs.emplace_back(table1_csv());
    std::mt19937 rng(5);
    for (int perm = 0; perm < 5; ++perm) {
        Dataset d = table1_fixture();
        std::shuffle(d.rows.begin(), d.rows.end(), rng);
        inputs.push_back(write_csv(d));
    }

    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const std::string tag = i < 5 ? "run " + std::to_string(i + 1) : "permutation " + std::to_string(i - 4);
        const std::string csv = work("c5_" + std::to_string(i) + ".csv");
        const std::string model = work("c5_" + std::to_string(i) + ".json");
        cli::write_file_atomic(csv, inputs[i]);
        c.expect(tocdetect({"train", csv, "--out", model}).code == 0, tag + ": train failed");
        c.expect(slurp(model) == want_model, tag + ": model file differs from golden");
        c.expect(tocdetect({"export", model}).out == want_text, tag + ": text export differs from golden");
        c.expect(tocdetect({"export", model, "--format", "dot"}).out == want_dot,
                 tag + ": DOT export differs from golden");
    }
}

// 6
void prefix_rule(Check& c) {
    Dataset toc_only;
    toc_only.columns = {Feature::OutgoingLinkFrequency};
    toc_only.rows = {{{0.5}, ClassLabel::Toc, ""}};
    const TrainedModel always = learn(toc_only);
    const TrainedModel table1 = learn(table1_fixture());
    const Page toc_page = testkit::synthetic_book().pages[1];

    for (int n = 1; n <= 40; ++n) {
        DocumentModel blank{"blank", {}};
        DocumentModel tocs{"tocs", {}};
        for (int i = 1; i <= n; ++i) {
            blank.pages.push_back(Page{i, {}});
            Page p = toc_page;
            p.index = i;
            tocs.pages.push_back(p);
        }
        for (int pct : {15, 20, 30, 100}) {
            const std::size_t want = std::max(1, (pct * n + 99) / 100);
            const std::string where = "N=" + std::to_string(n) + " f=" + std::to_string(pct) + "%";
            for (const auto& [doc, model] : {std::pair{&blank, &always}, std::pair{&tocs, &table1}}) {
                const DetectionResult r = detect(*doc, *model, {}, pct / 100.0);
                c.expect(r.scanned_pages.size() == want, where + ": scanned " + std::to_string(r.scanned_pages.size()));
                // Every scanned page is TOC-like here, so the report must be exactly the prefix.
                c.expect(r.toc_pages.size() == want, where + ": reported " + std::to_string(r.toc_pages.size()));
                for (std::size_t k = 0; k < r.toc_pages.size(); ++k) {
                    c.expect(r.toc_pages[k].page_index == static_cast<int>(k) + 1,
                             where + ": page outside prefix");
                }
            }
        }
    }
}

// 7: hand trace over the text export.
struct TextNode {
    std::string feature;
    std::string unseen;  // categorical fallback label
    struct Branch {
        std::string op;  // "<=", ">", "="
        std::string arg;
        std::string leaf;  // label when the child is inline
        std::unique_ptr<TextNode> child;
    };
    std::vector<Branch> branches;
    std::string leaf;  // set for a lone root leaf
};

std::size_t indent_of(const std::string& s) { return s.find_first_not_of(' '); }

std::string strip_leaf(const std::string& s) {
    // "TOC (8/0)" -> "TOC"
    return s.substr(0, s.find(' '));
}

std::unique_ptr<TextNode> parse_text(const std::vector<std::string>& lines, std::size_t& at, std::size_t indent) {
    static const std::string arrow = "\xE2\x86\x92 ";
    auto node = std::make_unique<TextNode>();
    const std::string head = lines.at(at++).substr(indent);
    if (head.rfind(arrow, 0) == 0) {
        node->leaf = strip_leaf(head.substr(arrow.size()));
        return node;
    }
    const auto close = head.find(']');
    node->feature = head.substr(1, close - 1);
    if (auto u = head.find("(unseen " + arrow); u != std::string::npos) {
        node->unseen = strip_leaf(head.substr(u + 8 + arrow.size()));
    }
    while (at < lines.size() && indent_of(lines[at]) == indent + 2) {
        std::string b = lines[at++].substr(indent + 2);
        TextNode::Branch br;
        if (auto a = b.find(" " + arrow); a != std::string::npos) {
            br.leaf = strip_leaf(b.substr(a + 1 + arrow.size()));
            b.resize(a);
        }
        const auto sp = b.find(' ');
        br.op = b.substr(0, sp);
        br.arg = b.substr(sp + 1);
        if (br.leaf.empty()) br.child = parse_text(lines, at, indent + 4);
        node->branches.push_back(std::move(br));
    }
    return node;
}

std::string walk(const TextNode& n, const FeatureVector& v) {
    if (!n.leaf.empty()) return n.leaf;
    const auto f = feature_from_name(n.feature);
    if (!f) throw std::runtime_error("unknown feature " + n.feature);
    const FeatureValue value = feature_value(v, *f);
    for (const auto& b : n.branches) {
        bool take = false;
        if (b.op == "<=") take = numeric_value(value) <= std::stod(b.arg);
        else if (b.op == ">") take = numeric_value(value) > std::stod(b.arg);
        else take = category_key(value) == b.arg;
        if (take) return b.child ? walk(*b.child, v) : b.leaf;
    }
    if (n.unseen.empty()) throw std::runtime_error("no branch taken at " + n.feature);
    return n.unseen;
}

void end_to_end(Check& c) {
    const std::string csv = work("c7.csv");
    const std::string model_path = work("c7.json");
    const std::string doc_path = work("book.xml");
    const DocumentModel book = testkit::synthetic_book();
    cli::write_file_atomic(csv, table1_csv());
    cli::write_file_atomic(doc_path, write_document(book));
    c.expect(tocdetect({"train", csv, "--out", model_path}).code == 0, "train failed");

    const Proc first = tocdetect({"predict", model_path, doc_path, "--format", "json"});
    c.expect(first.code == 0, "predict exited " + std::to_string(first.code));
    for (int i = 0; i < 3; ++i) {
        c.expect(tocdetect({"predict", model_path, doc_path, "--format", "json", "--jobs", std::to_string(i + 2)}).out ==
                     first.out,
                 "predict output changed between runs");
    }

    const TrainedModel model = load_model(slurp(model_path));
    const DetectionResult r = detect(book, model, model.config);
    c.expect(render_detection_json(r) == first.out, "library and CLI detections differ");
    c.expect(r.toc_pages.size() == 1 && r.toc_pages[0].page_index == 2,
             "expected exactly page 2 detected: " + render_detection_text(r));

    const Proc text = tocdetect({"export", model_path});
    std::vector<std::string> lines;
    std::istringstream in(text.out);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    std::size_t at = 0;
    std::unique_ptr<TextNode> root;
    try {
        root = parse_text(lines, at, 0);
    } catch (const std::exception& e) {
        return c.fail(std::string("cannot parse text export: ") + e.what());
    }
    c.expect(at == lines.size(), "text export has trailing lines");
    for (const Page& p : book.pages) {
        const FeatureVector v = extract_features(p, model.config);
        const std::string traced = walk(*root, v);
        const std::string classified(label_name(classify(model, v).label));
        c.expect(traced == classified, "page " + std::to_string(p.index) + ": trace says " + traced +
                                           ", classify says " + classified);
    }
}

}  // namespace

int main() {
    g_work = fs::temp_directory_path() / ("tocd_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(g_work);

    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<void(Check&)> body;
    };
    const std::vector<Criterion> criteria = {
        {1, "Table I fidelity", 1.0, table1_fidelity},
        {2, "training consistency", 1.0, training_consistency},
        {3, "entropy/gain oracle", 30.0, gain_oracle},
        {4, "feature-extraction oracle", 1.0, feature_oracle},
        {5, "determinism golden files", 5.0, determinism},
        {6, "prefix rule", 5.0, prefix_rule},
        {7, "end-to-end", 1.0, end_to_end},
    };

    int failures = 0;
    for (const auto& cr : criteria) {
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            cr.body(c);
        } catch (const std::exception& e) {
            c.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.ok && secs >= cr.limit_s) c.fail("took " + std::to_string(secs) + " s");
        if (!c.ok) ++failures;
        std::printf("%s  %d  %-27s %8.3f s (limit %g s)%s%s\n", c.ok ? "PASS" : "FAIL", cr.id, cr.name, secs,
                    cr.limit_s, c.ok ? "" : "  ", c.detail.c_str());
    }
    std::error_code ec;
    fs::remove_all(g_work, ec);
    return failures == 0 ? 0 : 1;
}
