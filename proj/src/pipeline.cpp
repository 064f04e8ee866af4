#include "tocdetect/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "tocdetect/error.hpp"

namespace tocd {

std::size_t prefix_page_count(std::size_t page_count, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "prefix fraction must be in (0, 1], got " + format_real(fraction));
    }
    const double scaled = fraction * static_cast<double>(page_count);
    const double nearest = std::round(scaled);
    const double pages = std::abs(scaled - nearest) <= 1e-9 ? nearest : std::ceil(scaled);
    return std::clamp<std::size_t>(static_cast<std::size_t>(pages), 1, std::max<std::size_t>(page_count, 1));
}

std::vector<FeatureVector> extract_prefix(const DocumentModel& doc, const FeatureConfig& cfg,
                                          double prefix_fraction, int jobs) {
    const std::size_t count = std::min(prefix_page_count(doc.pages.size(), prefix_fraction),
                                       doc.pages.size());
    std::vector<FeatureVector> out(count);
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, count == 0 ? 1 : count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = extract_features(doc.pages[i], cfg);
        return out;
    }
    // Strided assignment; each worker writes only its own slots.
    std::vector<std::future<void>> tasks;
    for (std::size_t w = 0; w < workers; ++w) {
        tasks.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < count; i += workers) out[i] = extract_features(doc.pages[i], cfg);
        }));
    }
    for (auto& t : tasks) t.get();
    return out;
}

DetectionResult detect(const DocumentModel& doc, const TrainedModel& model,
                       const FeatureConfig& cfg, double prefix_fraction, int jobs) {
    const auto features = extract_prefix(doc, cfg, prefix_fraction, jobs);
    DetectionResult result;
    result.document_id = doc.id;
    result.prefix_fraction = prefix_fraction;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const int page_index = doc.pages[i].index;
        result.scanned_pages.push_back(page_index);
        const Prediction p = classify(model, features[i]);
        if (p.label == ClassLabel::Toc) result.toc_pages.push_back({page_index, p.counts});
    }
    return result;
}

void ConfusionMatrix::add(ClassLabel gold, ClassLabel predicted) {
    if (gold == ClassLabel::Toc) {
        ++(predicted == ClassLabel::Toc ? tp : fn);
    } else {
        ++(predicted == ClassLabel::Toc ? fp : tn);
    }
}

EvaluationReport EvaluationReport::from_confusion(const ConfusionMatrix& m) {
    auto div = [](std::int64_t a, std::int64_t b) {
        return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
    };
    EvaluationReport r;
    r.confusion = m;
    r.accuracy = div(m.tp + m.tn, m.total());
    r.precision = div(m.tp, m.tp + m.fp);
    r.recall = div(m.tp, m.tp + m.fn);
    r.f1 = r.precision + r.recall == 0.0
               ? 0.0
               : 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

EvaluationReport evaluate(const TrainedModel& model, const Dataset& data) {
    if (data.rows.empty()) throw Error(ErrorCode::EmptyDataset, "cannot evaluate on an empty dataset");
    std::vector<int> positions;
    for (Feature f : model.columns) {
        const int pos = data.column_index(f);
        if (pos < 0) {
            throw Error(ErrorCode::ColumnMismatch,
                        "dataset lacks model column " + std::string(feature_name(f)));
        }
        positions.push_back(pos);
    }
    ConfusionMatrix m;
    std::vector<FeatureValue> values(positions.size());
    for (const Example& e : data.rows) {
        for (std::size_t i = 0; i < positions.size(); ++i) values[i] = e.values[positions[i]];
        m.add(e.label, classify(model, values).label);
    }
    return EvaluationReport::from_confusion(m);
}

EvaluationReport leave_one_out(const Dataset& data, const LearnParams& params) {
    if (data.rows.size() < 2) {
        throw Error(ErrorCode::EmptyDataset, "leave-one-out needs at least two rows");
    }
    ConfusionMatrix m;
    for (std::size_t held = 0; held < data.rows.size(); ++held) {
        Dataset train{data.columns, {}};
        train.rows.reserve(data.rows.size() - 1);
        for (std::size_t i = 0; i < data.rows.size(); ++i) {
            if (i != held) train.rows.push_back(data.rows[i]);
        }
        const TrainedModel model = learn(train, params);
        m.add(data.rows[held].label, classify(model, data.rows[held].values).label);
    }
    return EvaluationReport::from_confusion(m);
}

namespace {

std::string fixed4(double x) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << x;
    return os.str();
}

}  // namespace

std::string render_report_text(const EvaluationReport& r) {
    const ConfusionMatrix& m = r.confusion;
    std::ostringstream os;
    os << "                 predicted TOC  predicted NON-TOC\n"
       << "gold TOC      " << std::setw(16) << m.tp << std::setw(19) << m.fn << "\n"
       << "gold NON-TOC  " << std::setw(16) << m.fp << std::setw(19) << m.tn << "\n"
       << "\n"
       << "rows       " << m.total() << "\n"
       << "accuracy   " << fixed4(r.accuracy) << "\n"
       << "precision  " << fixed4(r.precision) << "\n"
       << "recall     " << fixed4(r.recall) << "\n"
       << "f1         " << fixed4(r.f1) << "\n";
    return os.str();
}

std::string render_report_json(const EvaluationReport& r) {
    nlohmann::json j = {
        {"confusion",
         {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn}, {"tn", r.confusion.tn}}},
        {"accuracy", r.accuracy},
        {"precision", r.precision},
        {"recall", r.recall},
        {"f1", r.f1},
    };
    return j.dump(2) + "\n";
}

std::string render_detection_text(const DetectionResult& r) {
    std::ostringstream os;
    os << "document  " << r.document_id << "\n"
       << "scanned   " << r.scanned_pages.size() << " page(s) (prefix " << format_real(r.prefix_fraction)
       << ")\n";
    if (r.toc_pages.empty()) {
        os << "no TOC pages detected\n";
        return os.str();
    }
    os << "page  TOC  NON-TOC\n";
    for (const PageDetection& p : r.toc_pages) {
        os << std::setw(4) << p.page_index << std::setw(5) << p.counts.toc << std::setw(9)
           << p.counts.non_toc << "\n";
    }
    return os.str();
}

std::string render_detection_json(const DetectionResult& r) {
    nlohmann::json pages = nlohmann::json::array();
    for (const PageDetection& p : r.toc_pages) {
        pages.push_back({{"page", p.page_index},
                         {"counts", {{"toc", p.counts.toc}, {"non_toc", p.counts.non_toc}}}});
    }
    nlohmann::json j = {
        {"document_id", r.document_id},
        {"prefix_fraction", r.prefix_fraction},
        {"scanned_pages", r.scanned_pages},
        {"toc_pages", std::move(pages)},
    };
    return j.dump(2) + "\n";
}

}  // namespace tocd
