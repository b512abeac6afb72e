#ifndef SEGQC_MONITOR_RANKING_HPP
#define SEGQC_MONITOR_RANKING_HPP

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "segqc/mask.hpp"
#include "segqc/monitor/records.hpp"
#include "segqc/monitor/stats.hpp"
#include "segqc/util/errors.hpp"
#include "segqc/util/fileio.hpp"

namespace segqc::monitor {

// Alert thresholds with the published defaults; both are parameters since
// tightening them is the expected tuning knob.
struct Thresholds {
    double hd_max = 50.0; // mm
    double dsc_min = 0.5;
};

// Pure function of the scores: erroneous when any structure comes back as
// the (0,0) pair, else suspicious when any structure breaches a threshold,
// else ok. Erroneous takes precedence.
inline AlertFlag flag_scores(const std::vector<metrics::StructureScore>& scores,
                             const Thresholds& thresholds = {}) {
    bool suspicious = false;
    for (const metrics::StructureScore& s : scores) {
        if (s.dsc == 0.0 && s.hd_mm == 0.0)
            return AlertFlag::erroneous;
        if (s.hd_mm > thresholds.hd_max || s.dsc < thresholds.dsc_min)
            suspicious = true;
    }
    return suspicious ? AlertFlag::suspicious : AlertFlag::ok;
}

// Externally supplied per-case scores (e.g. from a challenge platform),
// used as the reference side of rankings and scatter series.
struct ReferenceEntry {
    std::string case_id;
    std::string model_id;
    std::string phase;
    std::string structure;
    double dsc = 0.0;
    double hd_mm = 0.0;
};

struct RankingRow {
    std::string model_id;
    double mean_phd_mm = 0.0;
    int rank = 0;
};

struct RankingTable {
    std::string structure;
    std::string phase;
    std::vector<RankingRow> rows; // ascending by aggregate
    std::optional<double> spearman_vs_reference;
};

namespace detail {

// Mean pHD per model for one (structure, phase) group, with a coverage check
// that every model scored the same case set.
inline std::map<std::string, double> mean_hd_by_model(const std::vector<QualityRecord>& records,
                                                      int class_index, const std::string& phase) {
    std::map<std::string, std::map<std::string, double>> per_model; // model -> case -> hd
    for (const QualityRecord& r : records) {
        if (r.phase != phase) continue;
        for (const metrics::StructureScore& s : r.scores) {
            if (s.class_index != class_index) continue;
            per_model[r.model_id][r.case_id] = s.hd_mm;
        }
    }
    if (per_model.empty())
        throw data_error("ranking: no records for phase " + phase + ", class " +
                         std::to_string(class_index));

    const auto& reference_cases = per_model.begin()->second;
    for (const auto& [model, cases] : per_model) {
        std::string missing;
        for (const auto& [case_id, hd] : reference_cases)
            if (!cases.count(case_id))
                missing += (missing.empty() ? "" : ", ") + model + " lacks " + case_id;
        for (const auto& [case_id, hd] : cases)
            if (!reference_cases.count(case_id))
                missing += (missing.empty() ? "" : ", ") + per_model.begin()->first + " lacks " + case_id;
        if (!missing.empty())
            throw data_error("ranking: case coverage differs between models: " + missing);
    }

    std::map<std::string, double> means;
    for (const auto& [model, cases] : per_model) {
        double sum = 0.0;
        for (const auto& [case_id, hd] : cases)
            sum += hd;
        means[model] = sum / static_cast<double>(cases.size());
    }
    return means;
}

} // namespace detail

// Challenge-style ranking: models ordered by mean pHD (ascending, ties
// broken by model id), optionally scored against reference means with
// Spearman's rank correlation.
inline RankingTable simulate_ranking(const std::vector<QualityRecord>& records, int class_index,
                                     const std::string& phase, const ClassSet& classes,
                                     const std::vector<ReferenceEntry>* reference = nullptr) {
    RankingTable table;
    table.structure = classes.name(class_index);
    table.phase = phase;

    const std::map<std::string, double> means =
        detail::mean_hd_by_model(records, class_index, phase);

    std::vector<RankingRow> rows;
    for (const auto& [model, mean] : means)
        rows.push_back({model, mean, 0});
    std::sort(rows.begin(), rows.end(), [](const RankingRow& a, const RankingRow& b) {
        return a.mean_phd_mm != b.mean_phd_mm ? a.mean_phd_mm < b.mean_phd_mm
                                              : a.model_id < b.model_id;
    });
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i].rank = static_cast<int>(i) + 1;
    table.rows = std::move(rows);

    if (reference) {
        std::map<std::string, std::pair<double, std::size_t>> ref_sums; // model -> (sum, count)
        for (const ReferenceEntry& e : *reference) {
            if (e.phase != phase || e.structure != table.structure) continue;
            auto& slot = ref_sums[e.model_id];
            slot.first += e.hd_mm;
            slot.second += 1;
        }
        std::vector<double> pseudo, real;
        for (const RankingRow& row : table.rows) {
            auto it = ref_sums.find(row.model_id);
            if (it == ref_sums.end() || it->second.second == 0)
                throw data_error("ranking: reference scores missing for model " + row.model_id);
            pseudo.push_back(row.mean_phd_mm);
            real.push_back(it->second.first / static_cast<double>(it->second.second));
        }
        table.spearman_vs_reference = spearman_rs(pseudo, real);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Scatter series: aligned (real, pseudo) pairs per structure for external
// plotting, plus the Pearson correlation per structure and metric.
// ---------------------------------------------------------------------------

struct ScatterPoint {
    std::string case_id;
    std::string model_id;
    std::string phase;
    double real = 0.0;
    double pseudo = 0.0;
};

struct ScatterSeries {
    std::string structure;
    std::string metric; // "dsc" or "hd"
    std::vector<ScatterPoint> points;
    double pearson = 0.0;
};

inline std::vector<ScatterSeries> scatter_export(const std::vector<QualityRecord>& records,
                                                 const std::vector<ReferenceEntry>& reference,
                                                 const ClassSet& classes) {
    // Join on (case, model, phase, structure); both sides must match fully.
    std::map<std::tuple<std::string, std::string, std::string, std::string>,
             std::pair<double, double>> ref_by_key;
    for (const ReferenceEntry& e : reference)
        ref_by_key[{e.case_id, e.model_id, e.phase, e.structure}] = {e.dsc, e.hd_mm};

    std::set<std::tuple<std::string, std::string, std::string, std::string>> used;
    std::map<std::string, ScatterSeries> dsc_series, hd_series;
    std::string unmatched;
    for (const QualityRecord& r : records) {
        for (const metrics::StructureScore& s : r.scores) {
            const std::string structure = classes.name(s.class_index);
            const auto key = std::make_tuple(r.case_id, r.model_id, r.phase, structure);
            auto it = ref_by_key.find(key);
            if (it == ref_by_key.end()) {
                unmatched += (unmatched.empty() ? "" : ", ") + r.case_id + "/" + r.model_id + "/" +
                             r.phase + "/" + structure;
                continue;
            }
            used.insert(key);
            ScatterSeries& ds = dsc_series.try_emplace(structure).first->second;
            ds.structure = structure;
            ds.metric = "dsc";
            ds.points.push_back({r.case_id, r.model_id, r.phase, it->second.first, s.dsc});
            ScatterSeries& hs = hd_series.try_emplace(structure).first->second;
            hs.structure = structure;
            hs.metric = "hd";
            hs.points.push_back({r.case_id, r.model_id, r.phase, it->second.second, s.hd_mm});
        }
    }
    for (const auto& [key, value] : ref_by_key)
        if (!used.count(key))
            unmatched += (unmatched.empty() ? "" : ", ") + std::get<0>(key) + "/" +
                         std::get<1>(key) + "/" + std::get<2>(key) + "/" + std::get<3>(key) +
                         " (reference only)";
    if (!unmatched.empty())
        throw data_error("scatter: unmatched keys: " + unmatched);

    std::vector<ScatterSeries> out;
    for (auto* source : {&dsc_series, &hd_series}) {
        for (auto& [structure, series] : *source) {
            std::vector<double> real, pseudo;
            for (const ScatterPoint& p : series.points) {
                real.push_back(p.real);
                pseudo.push_back(p.pseudo);
            }
            series.pearson = pearson_r(real, pseudo);
            out.push_back(std::move(series));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV import/export. Fields never contain commas: ids are caller-chosen
// tokens, everything else is numeric.
// ---------------------------------------------------------------------------

inline std::vector<ReferenceEntry> read_reference_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open reference file: " + path.string());
    std::vector<ReferenceEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.rfind("case_id,", 0) == 0) continue; // header
        std::istringstream row(line);
        ReferenceEntry e;
        std::string dsc_text, hd_text;
        if (!std::getline(row, e.case_id, ',') || !std::getline(row, e.model_id, ',') ||
            !std::getline(row, e.phase, ',') || !std::getline(row, e.structure, ',') ||
            !std::getline(row, dsc_text, ',') || !std::getline(row, hd_text, ','))
            throw data_error("bad reference row at " + path.string() + ":" + std::to_string(line_no));
        try {
            e.dsc = std::stod(dsc_text);
            e.hd_mm = std::stod(hd_text);
        } catch (const std::exception&) {
            throw data_error("bad reference numbers at " + path.string() + ":" +
                             std::to_string(line_no));
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

inline std::string ranking_tables_to_csv(const std::vector<RankingTable>& tables) {
    std::ostringstream out;
    out << "model,structure,phase,mean_phd_mm,rank\n";
    out.precision(12);
    for (const RankingTable& t : tables)
        for (const RankingRow& row : t.rows)
            out << row.model_id << "," << t.structure << "," << t.phase << "," << row.mean_phd_mm
                << "," << row.rank << "\n";
    for (const RankingTable& t : tables)
        if (t.spearman_vs_reference)
            out << "# spearman_rs " << t.structure << " " << t.phase << " "
                << *t.spearman_vs_reference << "\n";
    return out.str();
}

inline std::string scatter_series_to_csv(const std::vector<ScatterSeries>& series) {
    std::ostringstream out;
    out << "structure,metric,case_id,model_id,phase,real,pseudo\n";
    out.precision(12);
    for (const ScatterSeries& s : series)
        for (const ScatterPoint& p : s.points)
            out << s.structure << "," << s.metric << "," << p.case_id << "," << p.model_id << ","
                << p.phase << "," << p.real << "," << p.pseudo << "\n";
    for (const ScatterSeries& s : series)
        out << "# pearson_r " << s.structure << " " << s.metric << " " << s.pearson << "\n";
    return out.str();
}

} // namespace segqc::monitor

#endif
