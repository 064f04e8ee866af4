#include "tocdetect/cli.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "tocdetect/dataset.hpp"
#include "tocdetect/document.hpp"
#include "tocdetect/error.hpp"
#include "tocdetect/features.hpp"
#include "tocdetect/pipeline.hpp"
#include "tocdetect/tree.hpp"

namespace tocd::cli {

namespace fs = std::filesystem;

namespace {

struct Failure {
    int exit_code;
    std::string code;
    std::string message;
};

[[noreturn]] void usage_error(const std::string& message) { throw Failure{kUsage, "Usage", message}; }

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnsupportedVersion:
        case ErrorCode::CorruptModel: return kModelError;
        case ErrorCode::InvalidArgument: return kUsage;
        default: return kDataError;
    }
}

struct Options {
    std::vector<std::string> inputs;
    std::string out_path;
    std::string labels_path;
    std::string config_path;
    std::string format;
    double prefix = kDefaultPrefixFraction;
    int max_depth = 0;
    int min_rows = 1;
    int jobs = 1;
    bool loo = false;
    bool table1 = false;
    bool verbose = false;
};

class Runner {
public:
    Runner(const Options& opts, std::ostream& out) : opts_(opts), out_(out) {}

    void emit(std::string_view payload) const {
        if (opts_.out_path.empty()) {
            out_ << payload;
            out_.flush();
        } else {
            write_file_atomic(opts_.out_path, payload);
        }
    }

    FeatureConfig feature_config(const FeatureConfig& fallback = {}) const {
        if (opts_.config_path.empty()) return fallback;
        return parse_feature_config(read_file(opts_.config_path));
    }

    LearnParams learn_params() const {
        LearnParams p;
        if (opts_.max_depth > 0) p.max_depth = opts_.max_depth;
        p.min_rows = opts_.min_rows;
        return p;
    }

    DocumentModel document(const std::string& path, std::ostream& err) const {
        std::vector<std::string> warnings;
        DocumentModel doc = parse_document(read_file(path), &warnings);
        for (const auto& w : warnings) err << "tocdetect: warning: " << w << "\n";
        return doc;
    }

    TrainedModel model(const std::string& path) const {
        std::string bytes;
        try {
            bytes = read_file(path);
        } catch (const Error& e) {
            throw Failure{kModelError, std::string(error_code_name(e.code())), e.what()};
        }
        return load_model(bytes);
    }

    Dataset dataset(const std::string& path) const { return load_csv(read_file(path)); }

private:
    const Options& opts_;
    std::ostream& out_;
};

std::map<int, ClassLabel> read_labels(const std::string& text) {
    std::map<int, ClassLabel> labels;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (char& c : line) {
            if (c == ',' || c == '\t' || c == '\r') c = ' ';
        }
        std::istringstream fields(line);
        std::string page;
        std::string label;
        std::string extra;
        if (!(fields >> page)) continue;
        int index = 0;
        try {
            std::size_t used = 0;
            index = std::stoi(page, &used);
            if (used != page.size() || index < 1) throw std::invalid_argument(page);
        } catch (const std::exception&) {
            throw Error(ErrorCode::TypeError, "labels line " + std::to_string(line_no) +
                                                  ": '" + page + "' is not a page index");
        }
        auto parsed = (fields >> label) ? label_from_name(label) : std::nullopt;
        if (!parsed || (fields >> extra)) {
            throw Error(ErrorCode::TypeError, "labels line " + std::to_string(line_no) +
                                                  ": expected '<page> TOC|NON-TOC'");
        }
        labels[index] = *parsed;
    }
    return labels;
}

void check_prefix(double prefix) {
    if (!(prefix > 0.0 && prefix <= 1.0)) {
        usage_error("--prefix must be in (0, 1], got " + format_real(prefix));
    }
}

std::string pick_format(const std::string& requested, std::initializer_list<std::string_view> allowed) {
    if (requested.empty()) return std::string(*allowed.begin());
    for (auto a : allowed) {
        if (requested == a) return requested;
    }
    std::string list;
    for (auto a : allowed) list += (list.empty() ? "" : "|") + std::string(a);
    usage_error("--format must be one of " + list + ", got '" + requested + "'");
}

void cmd_extract(const Options& o, const Runner& r, std::ostream& err) {
    check_prefix(o.prefix);
    const FeatureConfig cfg = r.feature_config();
    const DocumentModel doc = r.document(o.inputs.at(0), err);
    std::map<int, ClassLabel> labels;
    if (!o.labels_path.empty()) labels = read_labels(read_file(o.labels_path));

    const auto features = extract_prefix(doc, cfg, o.prefix, o.jobs);
    std::vector<FeatureRow> rows;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const int index = doc.pages[i].index;
        FeatureRow row{doc.id + ":" + std::to_string(index), features[i], std::nullopt};
        if (auto it = labels.find(index); it != labels.end()) row.label = it->second;
        rows.push_back(std::move(row));
    }
    if (!o.labels_path.empty()) {
        for (const FeatureRow& row : rows) {
            if (!row.label) {
                throw Error(ErrorCode::MixedLabeling, "labels file has no entry for page " + row.page_id);
            }
        }
    }
    r.emit(write_feature_csv(rows));
}

void cmd_train(const Options& o, const Runner& r) {
    if (o.out_path.empty()) usage_error("train requires --out");
    const FeatureConfig cfg = r.feature_config();
    const Dataset data = r.dataset(o.inputs.at(0));
    r.emit(save_model(learn(data, r.learn_params(), cfg)));
}

void cmd_predict(const Options& o, const Runner& r, std::ostream& err) {
    check_prefix(o.prefix);
    const std::string format = pick_format(o.format, {"text", "json"});
    const TrainedModel model = r.model(o.inputs.at(0));
    const FeatureConfig cfg = r.feature_config(model.config);
    const DocumentModel doc = r.document(o.inputs.at(1), err);
    const DetectionResult result = detect(doc, model, cfg, o.prefix, o.jobs);
    r.emit(format == "json" ? render_detection_json(result) : render_detection_text(result));
}

void cmd_eval(const Options& o, const Runner& r) {
    const std::string format = pick_format(o.format, {"text", "json"});
    EvaluationReport report;
    if (o.loo) {
        if (o.inputs.size() != 1) usage_error("eval --loo takes exactly one CSV file");
        report = leave_one_out(r.dataset(o.inputs[0]), r.learn_params());
    } else {
        if (o.inputs.size() != 2) usage_error("eval takes a model file and a CSV file");
        const TrainedModel model = r.model(o.inputs[0]);
        report = evaluate(model, r.dataset(o.inputs[1]));
    }
    r.emit(format == "json" ? render_report_json(report) : render_report_text(report));
}

void cmd_export(const Options& o, const Runner& r) {
    const std::string format = pick_format(o.format, {"text", "dot"});
    const TrainedModel model = r.model(o.inputs.at(0));
    r.emit(format == "dot" ? export_dot(model) : export_text(model));
}

void cmd_fixture(const Options& o, const Runner& r) {
    if (!o.table1) usage_error("fixture requires --table1");
    r.emit(table1_csv());
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
    return buf.str();
}

void write_file_atomic(const std::string& path, std::string_view bytes) {
    const fs::path target(path);
    fs::path temp = target;
    temp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot create '" + temp.string() + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ignored;
            fs::remove(temp, ignored);
            throw Error(ErrorCode::IoError, "cannot write '" + temp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(temp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(temp, ignored);
        throw Error(ErrorCode::IoError, "cannot rename onto '" + path + "': " + ec.message());
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Detects table-of-contents pages with a decision tree over page-layout features",
                 "tocdetect"};
    app.require_subcommand(1);
    app.add_flag("--verbose", o.verbose, "Print a version banner on stderr");

    auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", o.out_path, "Output path"); };
    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config_path, "Feature config file (key = value)");
    };
    auto add_learn = [&](CLI::App* cmd) {
        cmd->add_option("--max-depth", o.max_depth, "Depth limit (root is depth 0)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--min-rows", o.min_rows, "Minimum rows per child")
            ->check(CLI::PositiveNumber);
    };
    auto add_jobs = [&](CLI::App* cmd) {
        cmd->add_option("--jobs", o.jobs, "Worker threads for page extraction")
            ->check(CLI::PositiveNumber);
    };

    auto* extract = app.add_subcommand("extract", "Write per-page features as CSV");
    extract->add_option("document", o.inputs, "Document XML")->required()->expected(1);
    extract->add_option("--labels", o.labels_path, "Page labels: '<page> TOC|NON-TOC' per line");
    extract->add_option("--prefix", o.prefix, "Fraction of leading pages to scan");
    add_out(extract);
    add_config(extract);
    add_jobs(extract);

    auto* train = app.add_subcommand("train", "Learn a decision tree from a labeled CSV");
    train->add_option("csv", o.inputs, "Training CSV")->required()->expected(1);
    add_out(train);
    add_config(train);
    add_learn(train);

    auto* predict = app.add_subcommand("predict", "Detect TOC pages in a document");
    predict->add_option("files", o.inputs, "MODEL DOCUMENT")->required()->expected(2);
    predict->add_option("--prefix", o.prefix, "Fraction of leading pages to scan");
    predict->add_option("--format", o.format, "text|json");
    add_out(predict);
    add_config(predict);
    add_jobs(predict);

    auto* eval = app.add_subcommand("eval", "Evaluate a model on a labeled CSV, or run leave-one-out");
    eval->add_option("files", o.inputs, "MODEL CSV | --loo CSV")->required()->expected(1, 2);
    eval->add_flag("--loo", o.loo, "Leave-one-out over a training CSV");
    eval->add_option("--format", o.format, "text|json");
    add_out(eval);
    add_learn(eval);

    auto* exp = app.add_subcommand("export", "Render a model as text or DOT");
    exp->add_option("model", o.inputs, "Model file")->required()->expected(1);
    exp->add_option("--format", o.format, "text|dot");
    add_out(exp);

    auto* fixture = app.add_subcommand("fixture", "Emit built-in datasets");
    fixture->add_flag("--table1", o.table1, "The ten-row sample training set");
    add_out(fixture);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "tocdetect: error[Usage]: " << e.what() << "\n";
        return kUsage;
    }

    if (o.verbose) err << "tocdetect " << kVersion << "\n";
    Runner runner(o, out);
    try {
        if (extract->parsed()) cmd_extract(o, runner, err);
        if (train->parsed()) cmd_train(o, runner);
        if (predict->parsed()) cmd_predict(o, runner, err);
        if (eval->parsed()) cmd_eval(o, runner);
        if (exp->parsed()) cmd_export(o, runner);
        if (fixture->parsed()) cmd_fixture(o, runner);
    } catch (const Failure& f) {
        err << "tocdetect: error[" << f.code << "]: " << f.message << "\n";
        return f.exit_code;
    } catch (const Error& e) {
        err << "tocdetect: error[" << error_code_name(e.code()) << "]: " << e.what() << "\n";
        return exit_code_for(e.code());
    }
    return kOk;
}

}  // namespace tocd::cli
