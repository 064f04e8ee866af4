#include <gtest/gtest.h>

#include "support/pages.hpp"
#include "tocdetect/error.hpp"
#include "tocdetect/pipeline.hpp"

using namespace tocd;

namespace {

DocumentModel blank_document(int pages) {
    DocumentModel doc{"blank", {}};
    for (int i = 1; i <= pages; ++i) doc.pages.push_back(Page{i, {}});
    return doc;
}

TrainedModel constant_model(ClassLabel label) {
    Dataset d;
    d.columns = {Feature::OutgoingLinkFrequency};
    d.rows = {{{0.5}, label, ""}};
    return learn(d);
}

}  // namespace

TEST(Prefix, CeilWithMinimumOne) {
    EXPECT_EQ(prefix_page_count(10, 0.3), 3u);
    EXPECT_EQ(prefix_page_count(1, 0.15), 1u);
    EXPECT_EQ(prefix_page_count(7, 0.15), 2u);
    EXPECT_EQ(prefix_page_count(20, 0.15), 3u);
    EXPECT_EQ(prefix_page_count(15, 0.2), 3u);
    EXPECT_EQ(prefix_page_count(40, 1.0), 40u);
    EXPECT_THROW(prefix_page_count(10, 0.0), Error);
    EXPECT_THROW(prefix_page_count(10, 1.5), Error);
    EXPECT_THROW(prefix_page_count(10, -0.2), Error);
}

TEST(Detect, ScansPrefix) {
    const TrainedModel toc = constant_model(ClassLabel::Toc);
    const DetectionResult r = detect(blank_document(10), toc, {}, 0.3);
    EXPECT_EQ(r.scanned_pages, (std::vector<int>{1, 2, 3}));
    ASSERT_EQ(r.toc_pages.size(), 3u);
    EXPECT_EQ(r.toc_pages[2].page_index, 3);
    EXPECT_EQ(r.document_id, "blank");

    EXPECT_EQ(detect(blank_document(1), toc, {}, 0.15).scanned_pages, (std::vector<int>{1}));
}

TEST(Detect, ConstantNonTocModelFindsNothing) {
    EXPECT_TRUE(detect(blank_document(10), constant_model(ClassLabel::NonToc), {}, 1.0).toc_pages.empty());
}

TEST(Detect, UsesSourcePageIndices) {
    DocumentModel doc{"d", {Page{4, {}}, Page{9, {}}, Page{12, {}}}};
    EXPECT_EQ(detect(doc, constant_model(ClassLabel::Toc), {}, 1.0).scanned_pages, (std::vector<int>{4, 9, 12}));
}

TEST(Detect, ParallelExtractionMatchesSerial) {
    const TrainedModel m = learn(table1_fixture());
    const DocumentModel book = testkit::synthetic_book();
    const DetectionResult serial = detect(book, m, {}, 1.0, 1);
    EXPECT_EQ(serial.toc_pages.size(), 1u);
    for (int jobs : {2, 3, 8, 32}) EXPECT_EQ(detect(book, m, {}, 1.0, jobs), serial);
    EXPECT_EQ(extract_prefix(book, {}, 1.0, 4), extract_prefix(book, {}, 1.0, 1));
}

TEST(Evaluate, Table1ModelOnTable1) {
    const Dataset d = table1_fixture();
    const EvaluationReport r = evaluate(learn(d), d);
    EXPECT_EQ(r.confusion, (ConfusionMatrix{8, 0, 0, 2}));
    EXPECT_EQ(r.accuracy, 1.0);
    EXPECT_EQ(r.precision, 1.0);
    EXPECT_EQ(r.recall, 1.0);
    EXPECT_EQ(r.f1, 1.0);
}

TEST(Evaluate, AllTocPredictions) {
    // 8 of the 10 rows are TOC.
    const EvaluationReport r = evaluate(constant_model(ClassLabel::Toc), table1_fixture());
    EXPECT_EQ(r.confusion, (ConfusionMatrix{8, 2, 0, 0}));
    EXPECT_DOUBLE_EQ(r.accuracy, 0.8);
    EXPECT_DOUBLE_EQ(r.recall, 1.0);
    EXPECT_DOUBLE_EQ(r.precision, 0.8);
    EXPECT_DOUBLE_EQ(r.f1, 2 * 0.8 / 1.8);
}

TEST(Evaluate, ZeroDenominatorsGiveZero) {
    Dataset d;
    d.columns = {Feature::OutgoingLinkFrequency};
    d.rows = {{{0.1}, ClassLabel::NonToc, ""}, {{0.9}, ClassLabel::NonToc, ""}};
    const EvaluationReport r = evaluate(constant_model(ClassLabel::NonToc), d);
    EXPECT_EQ(r.accuracy, 1.0);
    EXPECT_EQ(r.precision, 0.0);
    EXPECT_EQ(r.recall, 0.0);
    EXPECT_EQ(r.f1, 0.0);
}

TEST(Evaluate, Errors) {
    Dataset empty;
    empty.columns = {Feature::OutgoingLinkFrequency};
    try {
        evaluate(constant_model(ClassLabel::Toc), empty);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyDataset);
    }
    Dataset other;
    other.columns = {Feature::ContainsTitleTerm};
    other.rows = {{{true}, ClassLabel::Toc, ""}};
    try {
        evaluate(constant_model(ClassLabel::Toc), other);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ColumnMismatch);
    }
}

TEST(Evaluate, MetricsRecomputeFromCells) {
    for (const ConfusionMatrix& m : {ConfusionMatrix{3, 1, 2, 4}, ConfusionMatrix{0, 0, 0, 5},
                                     ConfusionMatrix{0, 3, 2, 0}, ConfusionMatrix{7, 0, 0, 0}}) {
        const EvaluationReport r = EvaluationReport::from_confusion(m);
        EXPECT_EQ(r.accuracy, static_cast<double>(m.tp + m.tn) / m.total());
        EXPECT_EQ(r.precision, m.tp + m.fp ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0.0);
        EXPECT_EQ(r.recall, m.tp + m.fn ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0);
    }
}

TEST(LeaveOneOut, IdenticalRowsMemorize) {
    Dataset d;
    d.columns = {Feature::OutgoingLinkFrequency};
    d.rows = {{{0.4}, ClassLabel::Toc, ""}, {{0.4}, ClassLabel::Toc, ""}};
    EXPECT_EQ(leave_one_out(d).accuracy, 1.0);
}

TEST(LeaveOneOut, TwoDistinctRowsAlwaysMiss) {
    Dataset d;
    d.columns = {Feature::OutgoingLinkFrequency};
    d.rows = {{{0.2}, ClassLabel::Toc, ""}, {{0.7}, ClassLabel::NonToc, ""}};
    const EvaluationReport r = leave_one_out(d);
    EXPECT_EQ(r.accuracy, 0.0);
    EXPECT_EQ(r.confusion, (ConfusionMatrix{0, 1, 1, 0}));
}

TEST(LeaveOneOut, Table1CellsSumToTen) {
    EXPECT_EQ(leave_one_out(table1_fixture()).confusion.total(), 10);
}

TEST(LeaveOneOut, NeedsTwoRows) {
    Dataset d;
    d.columns = {Feature::OutgoingLinkFrequency};
    d.rows = {{{0.2}, ClassLabel::Toc, ""}};
    EXPECT_THROW(leave_one_out(d), Error);
}

TEST(Render, ReportFormats) {
    const EvaluationReport r = EvaluationReport::from_confusion({8, 2, 0, 0});
    const std::string text = render_report_text(r);
    EXPECT_NE(text.find("accuracy   0.8000"), std::string::npos) << text;
    EXPECT_NE(text.find("precision  0.8000"), std::string::npos);
    const std::string json = render_report_json(r);
    EXPECT_NE(json.find("\"tp\": 8"), std::string::npos) << json;
    EXPECT_NE(json.find("\"accuracy\": 0.8"), std::string::npos);
}

TEST(Render, DetectionFormats) {
    DetectionResult d{"book", {1, 2, 3}, {{2, {8, 0}}}, 0.3};
    EXPECT_EQ(render_detection_text(d),
              "document  book\n"
              "scanned   3 page(s) (prefix 0.3)\n"
              "page  TOC  NON-TOC\n"
              "   2    8        0\n");
    const std::string json = render_detection_json(d);
    EXPECT_NE(json.find("\"toc_pages\""), std::string::npos);
    EXPECT_NE(json.find("\"page\": 2"), std::string::npos);
}
