// segqc: train a mask autoencoder on trusted ground truth, reconstruct
// predicted masks into pseudo ground truths, and derive surrogate quality
// scores, alert flags, and model rankings without ground truth at inference.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "segqc/segqc.hpp"

namespace fs = std::filesystem;
using namespace segqc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerification = 3;

int worker_count(std::size_t jobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("SEGQC_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < n)
            n = static_cast<unsigned>(cap);
    }
    return static_cast<int>(std::min<std::size_t>(n, jobs ? jobs : 1));
}

// Run fn(i) for i in [0, jobs) across workers. Exceptions are rethrown on
// the caller thread.
template <typename Fn>
void parallel_for(std::size_t jobs, Fn&& fn) {
    const int workers = worker_count(jobs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < jobs; i = next.fetch_add(1))
                    fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string pgt_filename(const data::ManifestEntry& e) {
    std::string name = e.case_id + "_" + e.phase;
    if (!e.model_id.empty())
        name += "_" + e.model_id;
    return name + ".pgm";
}

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
    int n = 20;
    int size = 64;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::string corrupt_path;
    std::string model_id;
};

int run_synth(const SynthArgs& args) {
    std::vector<data::CorruptionSpec> specs;
    if (!args.corrupt_path.empty()) {
        const nlohmann::json j = nlohmann::json::parse(read_file(args.corrupt_path));
        if (j.is_array()) {
            for (const auto& item : j)
                specs.push_back(data::corruption_from_json(item));
        } else {
            specs.push_back(data::corruption_from_json(j));
        }
        if (specs.empty())
            throw data_error("corruption spec file is empty: " + args.corrupt_path);
    }

    const auto masks = data::synth_generate(args.n, args.size, args.seed);
    fs::create_directories(args.out_dir);

    data::Manifest manifest;
    for (int i = 0; i < args.n; ++i) {
        LabelMask mask = masks[static_cast<std::size_t>(i)];
        if (!specs.empty()) {
            data::CorruptionSpec spec = specs[static_cast<std::size_t>(i) % specs.size()];
            spec.seed += static_cast<std::uint64_t>(i); // distinct draws per case
            mask = data::corrupt(mask, spec);
        }
        char case_id[16];
        std::snprintf(case_id, sizeof case_id, "case%03d", i);
        data::ManifestEntry entry;
        entry.case_id = case_id;
        entry.phase = i % 2 == 0 ? "ED" : "ES";
        entry.model_id = args.model_id;
        entry.mask_path = pgt_filename(entry);
        write_pgm(mask, fs::path(args.out_dir) / entry.mask_path);
        manifest.entries.push_back(std::move(entry));
    }
    save_manifest(manifest, fs::path(args.out_dir) / "manifest.json");
    std::cout << "wrote " << args.n << " masks and manifest.json to " << args.out_dir << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string manifest_path;
    std::string out_path;
    std::string log_path;
    int epochs = 500;
    int bg_epochs = 10;
    double lr = 2e-4;
    double wd = 1e-5;
    double split = 0.8;
    int batch = 8;
    std::uint64_t seed = 0;
    int input_size = 0; // 0 = take the mask size from the dataset
    int latent_maps = 100;
    bool quiet = false;
};

int run_train(const TrainArgs& args) {
    const data::Manifest manifest = data::load_manifest(args.manifest_path);
    if (manifest.entries.empty())
        throw data_error("manifest has no entries: " + args.manifest_path);

    std::vector<LabelMask> dataset;
    dataset.reserve(manifest.entries.size());
    int input_size = args.input_size;
    for (const data::ManifestEntry& e : manifest.entries) {
        LabelMask mask = read_pgm(data::resolve_path(args.manifest_path, e.mask_path));
        mask.spacing_row = e.spacing_row;
        mask.spacing_col = e.spacing_col;
        if (input_size == 0) {
            if (mask.height != mask.width)
                throw data_error("mask " + e.mask_path +
                                 " is not square; pass --input-size explicitly");
            input_size = mask.height;
        }
        dataset.push_back(center_fit(mask, input_size, input_size));
    }

    const int class_count = static_cast<int>(manifest.class_names.size());
    ca::ArchitectureConfig arch =
        input_size == 256 ? ca::ArchitectureConfig::canonical(args.latent_maps, class_count)
                          : ca::ArchitectureConfig::scaled(input_size, args.latent_maps, class_count);

    ca::TrainConfig cfg;
    cfg.epochs = args.epochs;
    cfg.bg_exclusion_epochs = args.bg_epochs;
    cfg.lr = args.lr;
    cfg.weight_decay = args.wd;
    cfg.batch_size = args.batch;
    cfg.split_ratio = args.split;
    cfg.seed = args.seed;

    auto progress = [&](const ca::EpochLog& e) {
        if (!args.quiet)
            std::cout << "epoch " << e.epoch << " train " << e.train_loss << " val " << e.val_loss
                      << (e.gd_includes_background ? "" : " (dice: foreground only)") << "\n";
    };

    auto [ckpt, log] = ca::train(dataset, arch, cfg, manifest.class_names, progress);
    save_checkpoint(ckpt, args.out_path);
    std::cout << "best epoch " << ckpt.epoch << " val loss " << format_double(ckpt.best_val_loss)
              << ", checkpoint written to " << args.out_path << "\n";

    if (!args.log_path.empty()) {
        std::ostringstream out;
        out << "epoch,train_loss,val_loss,gd_includes_background\n";
        for (const ca::EpochLog& e : log.epochs)
            out << e.epoch << "," << format_double(e.train_loss) << ","
                << format_double(e.val_loss) << "," << (e.gd_includes_background ? 1 : 0) << "\n";
        atomic_write_file(args.log_path, out.str());
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// pgt
// ---------------------------------------------------------------------------

struct PgtArgs {
    std::string ckpt_path;
    std::string manifest_path;
    std::string out_dir;
};

int run_pgt(const PgtArgs& args) {
    const ca::Checkpoint ckpt = ca::load_checkpoint(args.ckpt_path);
    const data::Manifest manifest = data::load_manifest(args.manifest_path);
    fs::create_directories(args.out_dir);

    ca::AutoencoderModel<float> model = ca::model_from_checkpoint(ckpt);
    const int size = ckpt.config.input_size;

    // reconstruct on an eval-mode model is read-only; workers share it
    parallel_for(manifest.entries.size(), [&](std::size_t i) {
        const data::ManifestEntry& e = manifest.entries[i];
        LabelMask mask = read_pgm(data::resolve_path(args.manifest_path, e.mask_path));
        mask.spacing_row = e.spacing_row;
        mask.spacing_col = e.spacing_col;
        const LabelMask fitted = center_fit(mask, size, size);
        auto [pgt, probs] = ca::reconstruct(model, fitted);
        write_pgm(pgt, fs::path(args.out_dir) / pgt_filename(e));
    });
    std::cout << "reconstructed " << manifest.entries.size() << " masks into " << args.out_dir
              << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

struct ScoreArgs {
    std::string manifest_path;
    std::string pgt_dir;
    std::string out_path;
    std::string xor_dir;
    double hd_max = 50.0;
    double dsc_min = 0.5;
};

int run_score(const ScoreArgs& args) {
    const data::Manifest manifest = data::load_manifest(args.manifest_path);
    const ClassSet classes = manifest.classes();
    const monitor::Thresholds thresholds{args.hd_max, args.dsc_min};
    if (!args.xor_dir.empty())
        fs::create_directories(args.xor_dir);

    std::vector<monitor::QualityRecord> records(manifest.entries.size());
    parallel_for(manifest.entries.size(), [&](std::size_t i) {
        const data::ManifestEntry& e = manifest.entries[i];
        const fs::path pgt_path = fs::path(args.pgt_dir) / pgt_filename(e);
        LabelMask pgt = read_pgm(pgt_path);
        pgt.spacing_row = e.spacing_row;
        pgt.spacing_col = e.spacing_col;

        LabelMask pred = read_pgm(data::resolve_path(args.manifest_path, e.mask_path));
        pred.spacing_row = e.spacing_row;
        pred.spacing_col = e.spacing_col;
        pred = center_fit(pred, pgt.height, pgt.width); // same normalized frame as the pGT

        monitor::QualityRecord record;
        record.case_id = e.case_id;
        record.model_id = e.model_id;
        record.phase = e.phase;
        record.scores = metrics::pseudo_scores(pred, pgt, classes);
        record.flag = monitor::flag_scores(record.scores, thresholds);
        records[i] = std::move(record);

        if (!args.xor_dir.empty()) {
            const metrics::InconsistencyMap map = metrics::xor_map(pred, pgt);
            fs::path name = fs::path(args.xor_dir) / pgt_filename(e);
            name.replace_extension(".xor.pgm");
            write_pgm_binary(map.grid, map.height, map.width, name);
        }
    });

    monitor::write_records(records, args.out_path, classes);
    std::cout << "scored " << records.size() << " masks into " << args.out_path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// flag
// ---------------------------------------------------------------------------

struct FlagArgs {
    std::string records_path;
    std::string out_path;
    double hd_max = 50.0;
    double dsc_min = 0.5;
};

int run_flag(const FlagArgs& args) {
    auto records = monitor::read_records(args.records_path);
    const monitor::Thresholds thresholds{args.hd_max, args.dsc_min};
    std::size_t ok = 0, suspicious = 0, erroneous = 0;
    for (monitor::QualityRecord& r : records) {
        r.flag = monitor::flag_scores(r.scores, thresholds);
        switch (r.flag) {
            case monitor::AlertFlag::ok: ++ok; break;
            case monitor::AlertFlag::suspicious: ++suspicious; break;
            case monitor::AlertFlag::erroneous: ++erroneous; break;
        }
    }
    const std::string out = args.out_path.empty() ? args.records_path : args.out_path;
    monitor::write_records(records, out);
    std::cout << "ok=" << ok << " suspicious=" << suspicious << " erroneous=" << erroneous << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// rank / scatter
// ---------------------------------------------------------------------------

std::vector<monitor::QualityRecord> load_all_records(const std::vector<std::string>& paths) {
    std::vector<monitor::QualityRecord> all;
    for (const std::string& p : paths) {
        auto part = monitor::read_records(p);
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

struct RankArgs {
    std::vector<std::string> records_paths;
    std::string reference_path;
    std::string out_path;
    std::string structure = "all";
    std::string phase = "all";
};

int run_rank(const RankArgs& args) {
    const auto records = load_all_records(args.records_paths);
    const ClassSet classes = ClassSet::cardiac();

    std::vector<monitor::ReferenceEntry> reference;
    if (!args.reference_path.empty())
        reference = monitor::read_reference_csv(args.reference_path);

    std::set<std::string> phases;
    std::set<int> class_indices;
    for (const auto& r : records) {
        phases.insert(r.phase);
        for (const auto& s : r.scores)
            class_indices.insert(s.class_index);
    }
    if (args.phase != "all")
        phases = {args.phase};
    if (args.structure != "all") {
        bool found = false;
        for (int c = 1; c < classes.count; ++c)
            if (classes.name(c) == args.structure) {
                class_indices = {c};
                found = true;
            }
        if (!found)
            throw data_error("unknown structure: " + args.structure);
    }

    std::vector<monitor::RankingTable> tables;
    for (const std::string& phase : phases)
        for (int cls : class_indices)
            tables.push_back(monitor::simulate_ranking(records, cls, phase, classes,
                                                       reference.empty() ? nullptr : &reference));
    atomic_write_file(args.out_path, monitor::ranking_tables_to_csv(tables));
    std::cout << "wrote " << tables.size() << " ranking table(s) to " << args.out_path << "\n";
    for (const auto& t : tables)
        if (t.spearman_vs_reference)
            std::cout << t.structure << " " << t.phase << " r_s = " << *t.spearman_vs_reference
                      << "\n";
    return kExitOk;
}

struct ScatterArgs {
    std::vector<std::string> records_paths;
    std::string reference_path;
    std::string out_path;
};

int run_scatter(const ScatterArgs& args) {
    const auto records = load_all_records(args.records_paths);
    const auto reference = monitor::read_reference_csv(args.reference_path);
    const auto series = monitor::scatter_export(records, reference, ClassSet::cardiac());
    atomic_write_file(args.out_path, monitor::scatter_series_to_csv(series));
    std::cout << "wrote " << series.size() << " series to " << args.out_path << "\n";
    for (const auto& s : series)
        std::cout << s.structure << " " << s.metric << " r = " << s.pearson << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// gradcheck
// ---------------------------------------------------------------------------

int run_gradcheck(double layer_tol, double model_tol, std::size_t model_samples) {
    const VerificationReport report = verify_engine_gradients(layer_tol, model_tol, 17,
                                                              model_samples);
    for (const VerificationItem& item : report.items)
        std::cout << (item.passed ? "[PASS] " : "[FAIL] ") << item.name << " max_rel_error "
                  << item.max_rel_error << " (tolerance " << item.tolerance << ")\n";
    if (!report.all_passed()) {
        std::cout << "gradient verification FAILED\n";
        return kExitVerification;
    }
    std::cout << "gradient verification passed\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"segmentation quality control without ground truth"};
    app.require_subcommand(1);

    SynthArgs synth;
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic mask dataset");
    synth_cmd->add_option("--n", synth.n, "number of masks")->default_val(20);
    synth_cmd->add_option("--size", synth.size, "mask side length")->default_val(64);
    synth_cmd->add_option("--seed", synth.seed, "generator seed")->default_val(1);
    synth_cmd->add_option("--out", synth.out_dir, "output directory")->required();
    synth_cmd->add_option("--corrupt", synth.corrupt_path, "corruption spec JSON (object or array)");
    synth_cmd->add_option("--model-id", synth.model_id, "model id recorded in the manifest");

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "train the autoencoder on ground truth masks");
    train_cmd->add_option("--manifest", train_args.manifest_path)->required();
    train_cmd->add_option("--out", train_args.out_path, "checkpoint path")->required();
    train_cmd->add_option("--log", train_args.log_path, "per-epoch loss log CSV");
    train_cmd->add_option("--epochs", train_args.epochs)->default_val(500);
    train_cmd->add_option("--bg-epochs", train_args.bg_epochs,
                          "epochs with background excluded from the dice loss")->default_val(10);
    train_cmd->add_option("--lr", train_args.lr)->default_val(2e-4);
    train_cmd->add_option("--wd", train_args.wd)->default_val(1e-5);
    train_cmd->add_option("--split", train_args.split, "training fraction")->default_val(0.8);
    train_cmd->add_option("--batch", train_args.batch)->default_val(8);
    train_cmd->add_option("--seed", train_args.seed)->default_val(0);
    train_cmd->add_option("--input-size", train_args.input_size,
                          "normalized mask size (0: use the dataset's size)")->default_val(0);
    train_cmd->add_option("--latent-maps", train_args.latent_maps)->default_val(100);
    train_cmd->add_flag("--quiet", train_args.quiet, "suppress per-epoch progress");

    PgtArgs pgt;
    CLI::App* pgt_cmd = app.add_subcommand("pgt", "reconstruct pseudo ground truths");
    pgt_cmd->add_option("--ckpt", pgt.ckpt_path)->required();
    pgt_cmd->add_option("--manifest", pgt.manifest_path)->required();
    pgt_cmd->add_option("--out", pgt.out_dir)->required();

    ScoreArgs score;
    CLI::App* score_cmd = app.add_subcommand("score", "compute pDSC/pHD records against pGTs");
    score_cmd->add_option("--manifest", score.manifest_path)->required();
    score_cmd->add_option("--pgt", score.pgt_dir)->required();
    score_cmd->add_option("--out", score.out_path, "records JSONL path")->required();
    score_cmd->add_option("--xor", score.xor_dir, "directory for inconsistency maps");
    score_cmd->add_option("--hd-max", score.hd_max)->default_val(50.0);
    score_cmd->add_option("--dsc-min", score.dsc_min)->default_val(0.5);

    FlagArgs flag;
    CLI::App* flag_cmd = app.add_subcommand("flag", "re-derive alert flags and summarize");
    flag_cmd->add_option("--records", flag.records_path)->required();
    flag_cmd->add_option("--out", flag.out_path, "output path (default: rewrite input)");
    flag_cmd->add_option("--hd-max", flag.hd_max)->default_val(50.0);
    flag_cmd->add_option("--dsc-min", flag.dsc_min)->default_val(0.5);

    RankArgs rank;
    CLI::App* rank_cmd = app.add_subcommand("rank", "simulate challenge rankings by mean pHD");
    rank_cmd->add_option("--records", rank.records_paths)->required()->expected(-1);
    rank_cmd->add_option("--reference", rank.reference_path, "real scores CSV");
    rank_cmd->add_option("--out", rank.out_path)->required();
    rank_cmd->add_option("--structure", rank.structure, "RV, MYO, LV, or all")->default_val("all");
    rank_cmd->add_option("--phase", rank.phase, "ED, ES, or all")->default_val("all");

    ScatterArgs scatter;
    CLI::App* scatter_cmd =
        app.add_subcommand("scatter", "emit aligned real/pseudo score pairs");
    scatter_cmd->add_option("--records", scatter.records_paths)->required()->expected(-1);
    scatter_cmd->add_option("--reference", scatter.reference_path)->required();
    scatter_cmd->add_option("--out", scatter.out_path)->required();

    double layer_tol = 1e-4, model_tol = 1e-3;
    std::size_t model_samples = 40;
    CLI::App* gradcheck_cmd =
        app.add_subcommand("gradcheck", "finite-difference verification of the engine");
    gradcheck_cmd->add_option("--layer-tol", layer_tol)->default_val(1e-4);
    gradcheck_cmd->add_option("--model-tol", model_tol)->default_val(1e-3);
    gradcheck_cmd->add_option("--samples", model_samples,
                              "parameters checked per array on the full model")->default_val(40);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints the message or help text
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (synth_cmd->parsed()) return run_synth(synth);
        if (train_cmd->parsed()) return run_train(train_args);
        if (pgt_cmd->parsed()) return run_pgt(pgt);
        if (score_cmd->parsed()) return run_score(score);
        if (flag_cmd->parsed()) return run_flag(flag);
        if (rank_cmd->parsed()) return run_rank(rank);
        if (scatter_cmd->parsed()) return run_scatter(scatter);
        if (gradcheck_cmd->parsed()) return run_gradcheck(layer_tol, model_tol, model_samples);
    } catch (const config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitData;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
