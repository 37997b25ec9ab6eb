#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "flowsense/dataset.hpp"
#include "flowsense/error.hpp"
#include "test_util.hpp"

using namespace flowsense;

namespace {

std::filesystem::path fixture(const char* name) {
    return std::filesystem::path(FIXTURES_DIR) / name;
}

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& content) {
        path = std::filesystem::temp_directory_path() /
               ("flowsense_test_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) +
                ".csv");
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::filesystem::remove(path); }
};

} // namespace

TEST_SUITE_BEGIN("dataset");

TEST_CASE("nsl-kdd loader reads the fixture excerpt") {
    const auto table = load_nsl_kdd(fixture("nsl_kdd_sample.csv"));
    CHECK(table.records.size() == 32);
    CHECK(table.field_names.size() == 41);
    for (const auto& rec : table.records) CHECK(rec.values.size() == 41);
    // rows keep file order; the fixture starts with a normal http record
    CHECK(table.records[0].label_text == "normal");
    CHECK(table.records[0].values[1] == "tcp");
    CHECK(table.records[4].label_text == "neptune");
}

TEST_CASE("nsl-kdd loader accepts 42-field rows and drops the difficulty field") {
    TempFile f42("0,tcp,http,SF,181,5450,0,0,0,0,0,1,0,0,0,0,0,0,0,0,0,0,8,8,"
                 "0.00,0.00,0.00,0.00,1.00,0.00,0.00,9,9,1.00,0.00,0.11,0.00,"
                 "0.00,0.00,0.00,0.00,neptune\n");
    const auto table = load_nsl_kdd(f42.path);
    REQUIRE(table.records.size() == 1);
    CHECK(table.records[0].values.size() == 41);
    CHECK(table.records[0].label_text == "neptune");
}

TEST_CASE("nsl-kdd loader rejects rows with the wrong field count") {
    TempFile bad("0,tcp,http,SF,181,5450,0,0,0,0\n");
    CHECK_THROWS_WITH_AS(load_nsl_kdd(bad.path),
                         doctest::Contains("line 1"), ParseError);
}

TEST_CASE("nsl-kdd loader reports unreadable files") {
    CHECK_THROWS_AS(load_nsl_kdd("/nonexistent/nowhere.csv"), IoError);
}

TEST_CASE("nsl-kdd loader rejects empty files") {
    TempFile empty("");
    CHECK_THROWS_AS(load_nsl_kdd(empty.path), ParseError);
}

TEST_CASE("unsw loader reads the fixture excerpt with header detection") {
    const auto table = load_unsw_nb15(fixture("unsw_nb15_sample.csv"));
    CHECK(table.records.size() == 30);
    CHECK(table.field_names.size() == 42); // id and attack_cat dropped
    for (const auto& rec : table.records) {
        CHECK(rec.values.size() == 42);
        const bool binary = rec.label_text == "0" || rec.label_text == "1";
        CHECK(binary);
    }
}

TEST_CASE("unsw labels map 0 to normal and 1 to anomaly") {
    const auto table = load_unsw_nb15(fixture("unsw_nb15_sample.csv"));
    const auto ds = encode(table, infer_encoding(table));
    std::size_t anomalies = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.labels[i] == Label::Anomaly) ++anomalies;
        CHECK((table.records[i].label_text == "1") == (ds.labels[i] == Label::Anomaly));
    }
    CHECK(anomalies == 9);
}

TEST_CASE("unsw loader rejects empty and header-only files") {
    TempFile empty("");
    CHECK_THROWS_AS(load_unsw_nb15(empty.path), ParseError);
    TempFile header_only("id,dur,proto,label\n");
    CHECK_THROWS_AS(load_unsw_nb15(header_only.path), ParseError);
}

TEST_CASE("encode passes numeric fields through") {
    RawTable table;
    table.records = {{{"1.5", "2.0"}, "normal"}};
    EncodingSpec spec;
    spec.columns = {{ColumnRule::Kind::Numeric, {}}, {ColumnRule::Kind::Numeric, {}}};
    spec.normal_labels = {"normal"};
    const auto ds = encode(table, spec);
    CHECK(ds.matrix(0, 0) == 1.5);
    CHECK(ds.matrix(0, 1) == 2.0);
    CHECK(ds.labels[0] == Label::Normal);
}

TEST_CASE("encode one-hot expands categorical columns") {
    RawTable table;
    table.records = {{{"tcp"}, "neptune"}, {{"icmp"}, "normal"}};
    EncodingSpec spec;
    spec.columns = {{ColumnRule::Kind::OneHot, {"tcp", "udp", "icmp"}}};
    spec.normal_labels = {"normal"};
    const auto ds = encode(table, spec);
    CHECK(ds.dim() == 3);
    CHECK(ds.matrix(0, 0) == 1.0);
    CHECK(ds.matrix(0, 1) == 0.0);
    CHECK(ds.matrix(0, 2) == 0.0);
    CHECK(ds.matrix(1, 2) == 1.0);
    // every non-"normal" label string is an anomaly
    CHECK(ds.labels[0] == Label::Anomaly);
    CHECK(ds.labels[1] == Label::Normal);
}

TEST_CASE("encode rejects unknown categories in strict mode, zeros them in open mode") {
    RawTable table;
    table.records = {{{"sctp"}, "normal"}};
    EncodingSpec spec;
    spec.columns = {{ColumnRule::Kind::OneHot, {"tcp", "udp"}}};
    spec.normal_labels = {"normal"};
    CHECK_THROWS_WITH_AS(encode(table, spec), doctest::Contains("sctp"), ParseError);

    spec.open_categories = true;
    const auto ds = encode(table, spec);
    CHECK(ds.matrix(0, 0) == 0.0);
    CHECK(ds.matrix(0, 1) == 0.0);
}

TEST_CASE("encode is deterministic") {
    const auto table = load_nsl_kdd(fixture("nsl_kdd_sample.csv"));
    const auto spec = infer_encoding(table);
    const auto a = encode(table, spec);
    const auto b = encode(table, spec);
    CHECK(a.matrix == b.matrix);
    CHECK(a.feature_names == b.feature_names);
}

TEST_CASE("minmax maps fitted columns onto [0,1]") {
    LabeledDataset ds;
    ds.matrix = Matrix(3, 1);
    ds.matrix(0, 0) = 2;
    ds.matrix(1, 0) = 4;
    ds.matrix(2, 0) = 6;
    ds.labels.assign(3, Label::Normal);
    const auto scaler = fit_minmax(ds);
    const auto scaled = apply_minmax(scaler, ds);
    CHECK(scaled.matrix(0, 0) == 0.0);
    CHECK(scaled.matrix(1, 0) == 0.5);
    CHECK(scaled.matrix(2, 0) == 1.0);
}

TEST_CASE("minmax sends constant columns to zero") {
    LabeledDataset ds;
    ds.matrix = Matrix(2, 1, 7.0);
    ds.labels.assign(2, Label::Normal);
    const auto scaled = apply_minmax(fit_minmax(ds), ds);
    CHECK(scaled.matrix(0, 0) == 0.0);
    CHECK(scaled.matrix(1, 0) == 0.0);
}

TEST_CASE("minmax does not clamp out-of-range values") {
    LabeledDataset fit_on;
    fit_on.matrix = Matrix(2, 1);
    fit_on.matrix(0, 0) = 2;
    fit_on.matrix(1, 0) = 6;
    fit_on.labels.assign(2, Label::Normal);
    const auto scaler = fit_minmax(fit_on);

    LabeledDataset apply_to = fit_on;
    apply_to.matrix(0, 0) = 8;
    CHECK(apply_minmax(scaler, apply_to).matrix(0, 0) == 1.5);
}

TEST_CASE("minmax rejects column-count mismatches") {
    LabeledDataset a;
    a.matrix = Matrix(2, 2, 1.0);
    a.labels.assign(2, Label::Normal);
    LabeledDataset b;
    b.matrix = Matrix(2, 3, 1.0);
    b.labels.assign(2, Label::Normal);
    CHECK_THROWS_AS(apply_minmax(fit_minmax(a), b), DimensionError);
}

TEST_CASE("minmax round trip stays in range and preserves column order") {
    SeededRng rng(11);
    LabeledDataset ds;
    ds.matrix = test::random_matrix(rng, 40, 5, -100.0, 100.0);
    ds.labels.assign(40, Label::Normal);
    const auto scaled = apply_minmax(fit_minmax(ds), ds);
    for (std::size_t j = 0; j < 5; ++j) {
        for (std::size_t i = 0; i < 40; ++i) {
            CHECK(scaled.matrix(i, j) >= 0.0);
            CHECK(scaled.matrix(i, j) <= 1.0);
            for (std::size_t k = 0; k < 40; ++k) {
                if (ds.matrix(i, j) < ds.matrix(k, j))
                    CHECK(scaled.matrix(i, j) <= scaled.matrix(k, j));
            }
        }
    }
}

TEST_CASE("synthetic generation validates its configuration") {
    SynthConfig cfg;
    cfg.n_normal = 0;
    CHECK_THROWS_AS(generate_synthetic(cfg), ConfigError);

    cfg = SynthConfig{};
    cfg.n_anomaly = cfg.n_normal + 1;
    CHECK_THROWS_AS(generate_synthetic(cfg), ConfigError);
}

TEST_CASE("synthetic generation is pure in its configuration") {
    SynthConfig cfg;
    cfg.n_normal = 200;
    cfg.n_anomaly = 5;
    cfg.seed = 1;
    const auto a = generate_synthetic(cfg);
    const auto b = generate_synthetic(cfg);
    CHECK(a.matrix == b.matrix);
    CHECK(a.labels == b.labels);
}

TEST_CASE("synthetic generation respects the configured imbalance") {
    SynthConfig cfg;
    cfg.n_normal = 990;
    cfg.n_anomaly = 10;
    const auto ds = generate_synthetic(cfg);
    CHECK(ds.size() == 1000);
    std::size_t anomalies = 0;
    for (Label l : ds.labels)
        if (l == Label::Anomaly) ++anomalies;
    CHECK(anomalies == 10);
}

TEST_CASE("dataset csv dump round-trips exactly") {
    SynthConfig cfg;
    cfg.n_normal = 50;
    cfg.n_anomaly = 3;
    const auto ds = generate_synthetic(cfg);

    std::ostringstream out;
    write_dataset_csv(ds, out);
    TempFile f(out.str());
    const auto back = load_dataset_csv(f.path);
    CHECK(back.matrix == ds.matrix);
    CHECK(back.labels == ds.labels);
    CHECK(back.feature_names == ds.feature_names);
}

TEST_SUITE_END();
