#include <doctest.h>

#include <string>
#include <vector>

#include "explaineval/dataset.hpp"
#include "explaineval/errors.hpp"
#include "support/temp_dir.hpp"

using namespace explaineval;
using testsupport::TempDir;

namespace {

ExplanationRecord make_record(std::string user, std::string item, std::string gen,
                              std::string text = "some explanation") {
    ExplanationRecord r;
    r.user_id = std::move(user);
    r.item_id = std::move(item);
    r.item_title = "Title of " + r.item_id;
    r.generator_id = std::move(gen);
    r.explanation_text = std::move(text);
    return r;
}

Dataset two_by_two() {
    std::vector<ExplanationRecord> records;
    for (std::string user : {"u2", "u1"}) {
        for (std::string item : {"m2", "m1"}) {
            for (std::string gen : {"g1", "g2"}) {
                records.push_back(make_record(user, item, gen));
            }
        }
    }
    return Dataset(std::move(records));
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("record keys join the id triple with the reserved separator") {
    RecordKey key = make_record_key("u1", "m1", "g1");
    CHECK(key == std::string("u1") + kKeySeparator + "m1" + kKeySeparator + "g1");
    // The separator keeps adjacent fields from colliding.
    CHECK(make_record_key("a", "bc", "d") != make_record_key("ab", "c", "d"));
}

TEST_CASE("duplicate record keys are rejected at construction") {
    std::vector<ExplanationRecord> records = {make_record("u1", "m1", "g1"),
                                              make_record("u1", "m1", "g1")};
    CHECK_THROWS_AS(Dataset(std::move(records)), DataError);
}

TEST_CASE("group indices are sorted and partition the dataset") {
    Dataset d = two_by_two();
    REQUIRE(d.size() == 8);

    const auto& users = d.user_groups();
    REQUIRE(users.size() == 2);
    CHECK(users[0].first == "u1");  // sorted despite u2-first record order
    CHECK(users[1].first == "u2");

    const auto& pairs = d.pair_groups();
    REQUIRE(pairs.size() == 4);
    CHECK(pairs[0].first == std::make_pair(std::string("u1"), std::string("m1")));
    CHECK(pairs[3].first == std::make_pair(std::string("u2"), std::string("m2")));

    // Pair groups partition user groups; user groups partition the dataset.
    std::size_t total_from_users = 0;
    for (const auto& [user, indices] : users) {
        total_from_users += indices.size();
        std::size_t from_pairs = 0;
        for (const auto& [pair_key, pair_indices] : pairs) {
            if (pair_key.first == user) from_pairs += pair_indices.size();
        }
        CHECK(from_pairs == indices.size());
    }
    CHECK(total_from_users == d.size());

    // Every index appears exactly once across pair groups.
    std::vector<int> seen(d.size(), 0);
    for (const auto& [pair_key, indices] : pairs) {
        for (auto i : indices) ++seen[i];
    }
    for (int count : seen) CHECK(count == 1);
}

TEST_CASE("items_of_user preserves first-appearance order") {
    Dataset d = two_by_two();
    auto items = d.items_of_user("u1");
    REQUIRE(items.size() == 2);
    CHECK(items[0] == "m2");  // m2 records precede m1 records in file order
    CHECK(items[1] == "m1");
    CHECK(d.items_of_user("nobody").empty());
}

TEST_CASE("index_of finds records by key") {
    Dataset d = two_by_two();
    auto idx = d.index_of(make_record_key("u1", "m1", "g2"));
    REQUIRE(idx.has_value());
    CHECK(d.record(*idx).generator_id == "g2");
    CHECK(!d.index_of(make_record_key("u1", "m1", "g9")).has_value());
}

TEST_CASE("save/load round-trips a dataset exactly") {
    TempDir tmp;
    std::vector<ExplanationRecord> records = {make_record("u1", "m1", "g1", "first text"),
                                              make_record("u1", "m2", "g1", "second text")};
    records[0].reference_text = "a reference";
    Dataset original(std::move(records));

    auto path = tmp.file("roundtrip.jsonl");
    save_dataset(original, path);
    Dataset loaded = load_dataset(path);

    REQUIRE(loaded.size() == original.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded.record(i).user_id == original.record(i).user_id);
        CHECK(loaded.record(i).item_id == original.record(i).item_id);
        CHECK(loaded.record(i).item_title == original.record(i).item_title);
        CHECK(loaded.record(i).generator_id == original.record(i).generator_id);
        CHECK(loaded.record(i).explanation_text == original.record(i).explanation_text);
        CHECK(loaded.record(i).reference_text == original.record(i).reference_text);
    }
}

TEST_CASE("load normalizes text fields to NFC") {
    TempDir tmp;
    // Decomposed "é" (e + combining acute) in the explanation text.
    auto path = tmp.write_file(
        "nfc.jsonl",
        "{\"user_id\":\"u1\",\"item_id\":\"m1\",\"item_title\":\"T\","
        "\"generator_id\":\"g1\",\"explanation_text\":\"caf\\u0065\\u0301\"}\n");
    Dataset d = load_dataset(path);
    REQUIRE(d.size() == 1);
    CHECK(d.record(0).explanation_text == "caf\xc3\xa9");
}

TEST_CASE("load reports malformed lines by number") {
    TempDir tmp;
    auto path = tmp.write_file(
        "bad.jsonl",
        "{\"user_id\":\"u1\",\"item_id\":\"m1\",\"item_title\":\"T\","
        "\"generator_id\":\"g1\",\"explanation_text\":\"ok\"}\n"
        "this is not json\n");
    CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains(":2:"), DataError);
}

TEST_CASE("load rejects duplicate keys at the second occurrence") {
    TempDir tmp;
    std::string line =
        "{\"user_id\":\"u1\",\"item_id\":\"m1\",\"item_title\":\"T\","
        "\"generator_id\":\"g1\",\"explanation_text\":\"ok\"}\n";
    auto path = tmp.write_file("dup.jsonl", line + line);
    CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains(":2:"), DataError);
}

TEST_CASE("load rejects ids containing the reserved separator") {
    TempDir tmp;
    auto path = tmp.write_file(
        "sep.jsonl",
        "{\"user_id\":\"u\\u001f1\",\"item_id\":\"m1\",\"item_title\":\"T\","
        "\"generator_id\":\"g1\",\"explanation_text\":\"ok\"}\n");
    CHECK_THROWS_AS(load_dataset(path), DataError);
}

TEST_CASE("load rejects empty explanation text") {
    TempDir tmp;
    auto path = tmp.write_file(
        "empty-text.jsonl",
        "{\"user_id\":\"u1\",\"item_id\":\"m1\",\"item_title\":\"T\","
        "\"generator_id\":\"g1\",\"explanation_text\":\"\"}\n");
    CHECK_THROWS_AS(load_dataset(path), DataError);
}

TEST_CASE("empty file loads as an empty dataset with zero groups") {
    TempDir tmp;
    auto path = tmp.write_file("empty.jsonl", "");
    Dataset d = load_dataset(path);
    CHECK(d.empty());
    CHECK(d.user_groups().empty());
    CHECK(d.pair_groups().empty());
}

TEST_CASE("missing file raises a data error") {
    TempDir tmp;
    CHECK_THROWS_AS(load_dataset(tmp.file("absent.jsonl")), DataError);
}

}  // TEST_SUITE
