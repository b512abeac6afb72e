#include <catch2/catch.hpp>

#include "segqc/ca/trainer.hpp"
#include "segqc/data/synth.hpp"
#include "segqc/monitor/ranking.hpp"

using namespace segqc;
using namespace segqc::monitor;
using metrics::StructureScore;

namespace {

StructureScore ss(int cls, double dsc, double hd) {
    StructureScore s;
    s.class_index = cls;
    s.dsc = dsc;
    s.hd_mm = hd;
    return s;
}

std::vector<StructureScore> nominal() {
    return {ss(1, 0.9, 6.0), ss(2, 0.85, 8.0), ss(3, 0.92, 5.0)};
}

QualityRecord make_record(const std::string& case_id, const std::string& model,
                          const std::string& phase, double rv_hd) {
    QualityRecord r;
    r.case_id = case_id;
    r.model_id = model;
    r.phase = phase;
    const double dsc = 0.95 - rv_hd / 300.0; // varies with the case
    r.scores = {ss(1, dsc, rv_hd), ss(2, dsc - 0.02, 4.0 + rv_hd / 8.0),
                ss(3, dsc - 0.04, 3.0 + rv_hd / 5.0)};
    r.flag = flag_scores(r.scores);
    return r;
}

} // namespace

TEST_CASE("flag: the (0,0) pair raises the erroneous alert") {
    auto scores = nominal();
    scores[2] = ss(3, 0.0, 0.0); // LV missing
    REQUIRE(flag_scores(scores) == AlertFlag::erroneous);
}

TEST_CASE("flag: a large pHD raises suspicious even with a normal pDSC") {
    auto scores = nominal();
    scores[2] = ss(3, 0.814, 104.93);
    REQUIRE(flag_scores(scores) == AlertFlag::suspicious);
}

TEST_CASE("flag: all-nominal scores pass") {
    REQUIRE(flag_scores(nominal()) == AlertFlag::ok);
}

TEST_CASE("flag: thresholds are parameters and erroneous takes precedence") {
    auto scores = nominal();
    REQUIRE(flag_scores(scores, {5.5, 0.5}) == AlertFlag::suspicious); // tightened hd_max
    REQUIRE(flag_scores(scores, {50.0, 0.95}) == AlertFlag::suspicious); // tightened dsc_min

    scores[0] = ss(1, 0.0, 0.0);
    scores[1] = ss(2, 0.1, 400.0); // would be suspicious on its own
    REQUIRE(flag_scores(scores) == AlertFlag::erroneous);

    // boundary: thresholds are strict inequalities
    REQUIRE(flag_scores({ss(1, 0.5, 50.0)}) == AlertFlag::ok);
}

TEST_CASE("ranking reproduces the published ED-RV ranking column") {
    // Mean RV pHD per model (ED), and the platform's real HD as reference.
    const std::vector<std::pair<std::string, double>> pseudo = {
        {"model_a", 31.82}, {"model_b", 7.72}, {"model_c", 6.87},
        {"model_d", 9.86}, {"model_e", 47.24},
    };
    const std::vector<std::pair<std::string, double>> real = {
        {"model_a", 50.21}, {"model_b", 14.00}, {"model_c", 13.25},
        {"model_d", 21.02}, {"model_e", 86.08},
    };

    std::vector<QualityRecord> records;
    std::vector<ReferenceEntry> reference;
    for (std::size_t i = 0; i < pseudo.size(); ++i) {
        records.push_back(make_record("case01", pseudo[i].first, "ED", pseudo[i].second));
        reference.push_back({"case01", real[i].first, "ED", "RV", 0.8, real[i].second});
    }

    const RankingTable table =
        simulate_ranking(records, 1, "ED", ClassSet::cardiac(), &reference);
    REQUIRE(table.structure == "RV");
    std::vector<std::string> order;
    for (const RankingRow& row : table.rows)
        order.push_back(row.model_id);
    REQUIRE(order == std::vector<std::string>{"model_c", "model_b", "model_d", "model_a", "model_e"});
    REQUIRE(table.spearman_vs_reference.has_value());
    REQUIRE(*table.spearman_vs_reference == Approx(1.0).margin(1e-12));
}

TEST_CASE("ranking: identical aggregates give rs = 1") {
    std::vector<QualityRecord> records;
    std::vector<ReferenceEntry> reference;
    for (int m = 0; m < 4; ++m) {
        const std::string model = "model" + std::to_string(m);
        records.push_back(make_record("c1", model, "ES", 5.0 + m));
        reference.push_back({"c1", model, "ES", "RV", 0.9, 5.0 + m});
    }
    const RankingTable table = simulate_ranking(records, 1, "ES", ClassSet::cardiac(), &reference);
    REQUIRE(*table.spearman_vs_reference == Approx(1.0).margin(1e-12));
    // ranks are a permutation of 1..M
    std::vector<int> ranks;
    for (const RankingRow& row : table.rows)
        ranks.push_back(row.rank);
    std::sort(ranks.begin(), ranks.end());
    REQUIRE(ranks == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("ranking aggregates per-case means and checks coverage") {
    std::vector<QualityRecord> records = {
        make_record("c1", "a", "ED", 10.0), make_record("c2", "a", "ED", 20.0),
        make_record("c1", "b", "ED", 4.0),  make_record("c2", "b", "ED", 6.0),
    };
    const RankingTable table = simulate_ranking(records, 1, "ED", ClassSet::cardiac());
    REQUIRE(table.rows[0].model_id == "b");
    REQUIRE(table.rows[0].mean_phd_mm == Approx(5.0));
    REQUIRE(table.rows[1].mean_phd_mm == Approx(15.0));

    records.pop_back(); // model b now lacks c2
    REQUIRE_THROWS_WITH(simulate_ranking(records, 1, "ED", ClassSet::cardiac()),
                        Catch::Contains("c2"));
}

TEST_CASE("ranking requires reference scores for every ranked model") {
    std::vector<QualityRecord> records = {make_record("c1", "a", "ED", 10.0),
                                          make_record("c1", "b", "ED", 4.0)};
    std::vector<ReferenceEntry> reference = {{"c1", "a", "ED", "RV", 0.9, 11.0}};
    REQUIRE_THROWS_WITH(simulate_ranking(records, 1, "ED", ClassSet::cardiac(), &reference),
                        Catch::Contains("b"));
}

TEST_CASE("models of strictly increasing corruption severity rank in severity order") {
    // Constructed monotone scenario: each "model" erodes the LV one step
    // deeper; the stand-in reconstructor returns the mildly eroded original,
    // so pseudo and real distances differ in magnitude but share the order.
    const auto masks = data::synth_generate(5, 64, 303);
    std::vector<QualityRecord> records;
    std::vector<ReferenceEntry> reference;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        const std::string case_id = "case" + std::to_string(i);
        data::CorruptionSpec standin;
        standin.kind = data::CorruptionKind::erode;
        standin.severity = 1;
        standin.target_class = 3;
        const LabelMask pgt = data::corrupt(masks[i], standin);
        for (int severity = 1; severity <= 3; ++severity) {
            data::CorruptionSpec spec = standin;
            spec.severity = severity;
            const LabelMask corrupted = data::corrupt(masks[i], spec);
            QualityRecord r;
            r.case_id = case_id;
            r.model_id = "sev" + std::to_string(severity);
            r.phase = "ED";
            r.scores = metrics::pseudo_scores(corrupted, pgt, ClassSet::cardiac());
            r.flag = flag_scores(r.scores);
            records.push_back(std::move(r));
            reference.push_back({case_id, "sev" + std::to_string(severity), "ED", "LV",
                                 metrics::dsc(masks[i], corrupted, 3),
                                 metrics::hausdorff(masks[i], corrupted, 3)});
        }
    }
    const RankingTable table = simulate_ranking(records, 3, "ED", ClassSet::cardiac(), &reference);
    std::vector<std::string> order;
    for (const RankingRow& row : table.rows)
        order.push_back(row.model_id);
    REQUIRE(order == std::vector<std::string>{"sev1", "sev2", "sev3"});
    REQUIRE(*table.spearman_vs_reference == Approx(1.0).margin(1e-12));
}

TEST_CASE("graded corruption: pseudo dsc degradation tracks the injected error") {
    // A small model overfit on its training masks; erosion of increasing
    // severity is injected and the pseudo scores must correlate with the
    // real (against-original) scores.
    const auto masks = data::synth_generate(4, 32, 91);
    ca::ArchitectureConfig arch = ca::ArchitectureConfig::scaled(32, 16);
    ca::TrainConfig cfg;
    cfg.epochs = 60;
    cfg.bg_exclusion_epochs = 5;
    cfg.batch_size = 1;
    cfg.split_ratio = 0.75;
    cfg.seed = 7;
    cfg.lr = 1e-3;
    auto [ckpt, log] = ca::train(masks, arch, cfg);
    ca::AutoencoderModel<float> model = ca::model_from_checkpoint(ckpt);
    const ClassSet classes = ClassSet::cardiac();

    std::vector<QualityRecord> records;
    std::vector<ReferenceEntry> reference;
    for (std::size_t i = 0; i < log.train_indices.size(); ++i) {
        const LabelMask& original = masks[log.train_indices[i]];
        for (int severity = 0; severity <= 3; ++severity) {
            LabelMask corrupted = original;
            for (int cls = 1; cls <= 3; ++cls) {
                data::CorruptionSpec spec;
                spec.kind = data::CorruptionKind::erode;
                spec.severity = severity;
                spec.target_class = cls;
                spec.seed = 40 + i;
                corrupted = data::corrupt(corrupted, spec);
            }
            auto [pgt, probs] = ca::reconstruct(model, corrupted);
            QualityRecord r;
            r.case_id = "case" + std::to_string(i) + "_s" + std::to_string(severity);
            r.model_id = "m";
            r.phase = "ED";
            r.scores = metrics::pseudo_scores(corrupted, pgt, classes);
            r.flag = flag_scores(r.scores);
            records.push_back(r);
            for (const auto& s : r.scores)
                reference.push_back({r.case_id, "m", "ED", classes.name(s.class_index),
                                     metrics::dsc(original, corrupted, s.class_index),
                                     metrics::hausdorff(original, corrupted, s.class_index)});
        }
    }
    const auto series = scatter_export(records, reference, classes);
    for (const ScatterSeries& s : series) {
        if (s.metric != "dsc") continue;
        INFO(s.structure << " r = " << s.pearson);
        REQUIRE(s.pearson > 0.9);
    }
}

TEST_CASE("scatter export: identical series give r = 1, disjoint keys fail") {
    std::vector<QualityRecord> records = {make_record("c1", "m", "ED", 10.0),
                                          make_record("c2", "m", "ED", 20.0),
                                          make_record("c3", "m", "ED", 15.0)};
    std::vector<ReferenceEntry> reference;
    for (const QualityRecord& r : records)
        for (const StructureScore& s : r.scores)
            reference.push_back({r.case_id, r.model_id, r.phase,
                                 ClassSet::cardiac().name(s.class_index), s.dsc, s.hd_mm});

    const auto series = scatter_export(records, reference, ClassSet::cardiac());
    REQUIRE(series.size() == 6); // 3 structures x 2 metrics
    for (const ScatterSeries& s : series) {
        if (s.metric == "hd" && s.structure == "RV")
            REQUIRE(s.pearson == Approx(1.0).margin(1e-12));
        for (const ScatterPoint& p : s.points)
            REQUIRE(p.real == p.pseudo);
    }

    std::vector<ReferenceEntry> wrong = reference;
    wrong[0].case_id = "c99";
    REQUIRE_THROWS_WITH(scatter_export(records, wrong, ClassSet::cardiac()),
                        Catch::Contains("c99"));
}

TEST_CASE("records survive a JSONL round trip") {
    namespace fs = std::filesystem;
    std::vector<QualityRecord> records = {make_record("c1", "m", "ED", 10.0),
                                          make_record("c2", "m", "ES", 60.0)};
    records[1].scores[0] = ss(1, 0.0, 0.0);
    records[1].flag = flag_scores(records[1].scores);

    const fs::path path = fs::temp_directory_path() / "segqc_records_test.jsonl";
    write_records(records, path);
    const auto back = read_records(path);
    REQUIRE(back.size() == 2);
    REQUIRE(back[0].case_id == "c1");
    REQUIRE(back[0].flag == AlertFlag::ok);
    REQUIRE(back[1].flag == AlertFlag::erroneous);
    REQUIRE(back[1].scores[0].dsc == 0.0);
    REQUIRE(back[1].scores[0].hd_mm == 0.0);
    REQUIRE(back[0].scores[0].hd_mm == records[0].scores[0].hd_mm);
    fs::remove(path);

    REQUIRE_THROWS_AS(read_records(fs::temp_directory_path() / "segqc_missing.jsonl"), io_error);
}

TEST_CASE("re-deriving flags from stored scores reproduces stored flags") {
    std::vector<QualityRecord> records = {make_record("c1", "m", "ED", 10.0),
                                          make_record("c2", "m", "ED", 80.0)};
    for (QualityRecord& r : records)
        REQUIRE(flag_scores(r.scores) == r.flag);
}
