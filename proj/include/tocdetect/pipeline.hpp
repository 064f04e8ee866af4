#pragma once

#include <string>
#include <vector>

#include "tocdetect/dataset.hpp"
#include "tocdetect/document.hpp"
#include "tocdetect/features.hpp"
#include "tocdetect/tree.hpp"

namespace tocd {

inline constexpr double kDefaultPrefixFraction = 0.3;

/// max(1, ceil(fraction * page_count)), capped at page_count. Products within
/// 1e-9 of an integer are taken as that integer so 0.3 * 10 scans 3 pages.
/// Throws Error{InvalidArgument} unless 0 < fraction <= 1.
std::size_t prefix_page_count(std::size_t page_count, double fraction);

struct PageDetection {
    int page_index = 0;
    ClassCounts counts;
    bool operator==(const PageDetection&) const = default;
};

struct DetectionResult {
    std::string document_id;
    std::vector<int> scanned_pages;
    std::vector<PageDetection> toc_pages;
    double prefix_fraction = kDefaultPrefixFraction;
    bool operator==(const DetectionResult&) const = default;
};

/// Features of the scanned prefix, in page order. `jobs` > 1 extracts pages
/// on worker threads.
std::vector<FeatureVector> extract_prefix(const DocumentModel& doc, const FeatureConfig& cfg,
                                          double prefix_fraction, int jobs = 1);

DetectionResult detect(const DocumentModel& doc, const TrainedModel& model,
                       const FeatureConfig& cfg, double prefix_fraction = kDefaultPrefixFraction,
                       int jobs = 1);

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t total() const { return tp + fp + fn + tn; }
    void add(ClassLabel gold, ClassLabel predicted);
    bool operator==(const ConfusionMatrix&) const = default;
};

/// TOC is the positive class. Precision and recall are 0 when their
/// denominator is 0, and F1 is 0 when both are 0.
struct EvaluationReport {
    ConfusionMatrix confusion;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    static EvaluationReport from_confusion(const ConfusionMatrix& m);
};

/// Throws EmptyDataset, or ColumnMismatch when `data` lacks a model column.
EvaluationReport evaluate(const TrainedModel& model, const Dataset& data);

/// Throws EmptyDataset when fewer than two rows are given.
EvaluationReport leave_one_out(const Dataset& data, const LearnParams& params = {});

std::string render_report_text(const EvaluationReport& r);
std::string render_report_json(const EvaluationReport& r);
std::string render_detection_text(const DetectionResult& r);
std::string render_detection_json(const DetectionResult& r);

}  // namespace tocd
