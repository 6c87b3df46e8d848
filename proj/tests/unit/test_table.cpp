#include <doctest.h>

#include <string>
#include <vector>

#include "explaineval/dataset.hpp"
#include "explaineval/errors.hpp"
#include "explaineval/table.hpp"
#include "support/temp_dir.hpp"

using namespace explaineval;
using testsupport::TempDir;

namespace {

Dataset small_dataset() {
    std::vector<ExplanationRecord> records;
    for (std::string gen : {"g1", "g2", "g3"}) {
        ExplanationRecord r;
        r.user_id = "u1";
        r.item_id = "m1";
        r.item_title = "Title";
        r.generator_id = gen;
        r.explanation_text = "text for " + gen;
        records.push_back(std::move(r));
    }
    return Dataset(std::move(records));
}

std::string annotation_line(const std::string& gen, const std::string& scores_json,
                            const std::string& evaluator = "human") {
    return "{\"user_id\":\"u1\",\"item_id\":\"m1\",\"generator_id\":\"" + gen +
           "\",\"evaluator_id\":\"" + evaluator + "\",\"scores\":" + scores_json + "}\n";
}

}  // namespace

TEST_SUITE("table") {

TEST_CASE("columns register once and must match the dataset size") {
    Dataset d = small_dataset();
    EvaluationTable table(d);
    table.add_column("a", ScoreColumn::empty(d.size()));
    CHECK(table.has_column("a"));
    CHECK_THROWS_AS(table.add_column("a", ScoreColumn::empty(d.size())), DataError);
    CHECK_THROWS_AS(table.add_column("b", ScoreColumn::empty(d.size() + 1)), DataError);
    CHECK_THROWS_AS(table.column("missing"), DataError);
    CHECK(table.evaluator_ids() == std::vector<std::string>{"a"});
}

TEST_CASE("ground truth must be designated before use") {
    Dataset d = small_dataset();
    EvaluationTable table(d);
    CHECK(!table.has_ground_truth());
    CHECK_THROWS_AS(table.ground_truth_id(), DataError);
    CHECK_THROWS_AS(table.designate_ground_truth("nope"), DataError);
    table.add_column("human", ScoreColumn::empty(d.size()));
    table.designate_ground_truth("human");
    CHECK(table.ground_truth_id() == "human");
}

TEST_CASE("numeric views apply the two imputation rules") {
    Dataset d = small_dataset();
    EvaluationTable table(d);

    ScoreColumn gt = ScoreColumn::empty(d.size());
    gt.cells[0] = AspectValues{4.0, std::nullopt, 2.0, 5.0};
    gt.cells[1] = AspectValues{1.0, 1.0, 1.0, 1.0};
    // cells[2] left all-null.
    table.add_column("human", gt);
    table.designate_ground_truth("human");

    ScoreColumn pred = ScoreColumn::empty(d.size());
    pred.cells[0] = AspectValues{4.0, std::nullopt, 2.0, 5.0};
    table.add_column("model", pred);

    auto gt_p = table.ground_truth_numeric(Aspect::Persuasiveness);
    auto gt_t = table.ground_truth_numeric(Aspect::Transparency);
    CHECK(gt_p == std::vector<double>{4.0, 1.0, 3.0});
    CHECK(gt_t == std::vector<double>{3.0, 1.0, 3.0});

    auto pred_t = table.evaluator_numeric("model", Aspect::Transparency);
    auto pred_s = table.evaluator_numeric("model", Aspect::Satisfaction);
    CHECK(pred_t == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(pred_s == std::vector<double>{5.0, 0.0, 0.0});
}

TEST_CASE("annotation import reads integer-or-null scores and reports stats") {
    Dataset d = small_dataset();
    TempDir tmp;
    auto path = tmp.write_file(
        "human.jsonl",
        annotation_line("g1", "{\"persuasiveness\":4,\"transparency\":null,"
                              "\"accuracy\":2,\"satisfaction\":5}") +
            annotation_line("g2", "{\"persuasiveness\":1}"));

    ImportStats stats;
    ScoreColumn col = import_annotations(path, "human", d, &stats);
    CHECK(stats.rows_read == 2);
    CHECK(stats.records_matched == 2);
    CHECK(stats.records_uncovered == 1);

    CHECK(col.cells[0][0] == 4.0);
    CHECK(!col.cells[0][1].has_value());  // explicit null stays null in the raw table
    CHECK(col.cells[0][2] == 2.0);
    CHECK(col.cells[0][3] == 5.0);
    CHECK(col.cells[1][0] == 1.0);
    CHECK(!col.cells[1][1].has_value());  // unlisted aspect is also null
    CHECK(!col.cells[2][0].has_value());  // uncovered record stays all-null
}

TEST_CASE("annotation import rejects bad rows with precise messages") {
    Dataset d = small_dataset();
    TempDir tmp;

    SUBCASE("unknown aspect name") {
        auto path = tmp.write_file("a.jsonl", annotation_line("g1", "{\"novelty\":3}"));
        CHECK_THROWS_WITH_AS(import_annotations(path, "human", d), doctest::Contains("novelty"),
                             DataError);
    }
    SUBCASE("non-integer value") {
        auto path = tmp.write_file("b.jsonl", annotation_line("g1", "{\"accuracy\":3.5}"));
        CHECK_THROWS_AS(import_annotations(path, "human", d), DataError);
    }
    SUBCASE("out-of-range value") {
        auto path = tmp.write_file("c.jsonl", annotation_line("g1", "{\"accuracy\":6}"));
        CHECK_THROWS_AS(import_annotations(path, "human", d), DataError);
    }
    SUBCASE("evaluator id mismatch") {
        auto path =
            tmp.write_file("d.jsonl", annotation_line("g1", "{\"accuracy\":3}", "other"));
        CHECK_THROWS_WITH_AS(import_annotations(path, "human", d), doctest::Contains("other"),
                             DataError);
    }
    SUBCASE("duplicate rows for one record") {
        auto path = tmp.write_file("e.jsonl", annotation_line("g1", "{\"accuracy\":3}") +
                                                  annotation_line("g1", "{\"accuracy\":4}"));
        CHECK_THROWS_WITH_AS(import_annotations(path, "human", d), doctest::Contains("duplicate"),
                             DataError);
    }
}

TEST_CASE("annotation import lists every unknown record key") {
    Dataset d = small_dataset();
    TempDir tmp;
    auto path = tmp.write_file("unknown.jsonl",
                               annotation_line("g1", "{\"accuracy\":3}") +
                                   "{\"user_id\":\"u9\",\"item_id\":\"m1\",\"generator_id\":"
                                   "\"g1\",\"evaluator_id\":\"human\",\"scores\":{}}\n" +
                                   "{\"user_id\":\"u1\",\"item_id\":\"m9\",\"generator_id\":"
                                   "\"g1\",\"evaluator_id\":\"human\",\"scores\":{}}\n");
    try {
        import_annotations(path, "human", d);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string msg = e.what();
        CHECK(msg.find("u9") != std::string::npos);
        CHECK(msg.find("m9") != std::string::npos);
        CHECK(msg.find("2 row(s)") != std::string::npos);
    }
}

TEST_CASE("score import accepts real values that annotations reject") {
    Dataset d = small_dataset();
    TempDir tmp;
    auto path = tmp.write_file("real.jsonl", annotation_line("g1", "{\"accuracy\":0.348}", "m"));
    ScoreColumn col = import_scores(path, "m", d);
    CHECK(col.cells[0][2] == doctest::Approx(0.348));
}

TEST_CASE("write_scores round-trips annotation and real-valued columns") {
    Dataset d = small_dataset();
    TempDir tmp;

    ScoreColumn likert = ScoreColumn::empty(d.size());
    likert.cells[0] = AspectValues{4.0, std::nullopt, 2.0, 5.0};
    likert.cells[2] = AspectValues{1.0, 2.0, 3.0, 4.0};
    auto likert_path = tmp.file("likert.jsonl");
    write_scores(likert_path, "human", d, likert);
    ImportStats stats;
    ScoreColumn likert_back = import_annotations(likert_path, "human", d, &stats);
    CHECK(stats.rows_read == 2);  // the all-null record is not written
    CHECK(likert_back.cells == likert.cells);

    ScoreColumn real = ScoreColumn::empty(d.size());
    real.cells[1] = AspectValues{0.5, 0.25, 0.125, 0.0625};
    auto real_path = tmp.file("real.jsonl");
    write_scores(real_path, "metric", d, real);
    ScoreColumn real_back = import_scores(real_path, "metric", d);
    CHECK(real_back.cells == real.cells);
}

}  // TEST_SUITE
