// sirilab: dataset generation, training, and evaluation for message-passing
// GNNs with random unique node identifiers (constant / RNI / SIRI regimes).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "siri/experiments.hpp"
#include "siri/verification.hpp"

namespace fs = std::filesystem;
using namespace siri;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCheckFailure = 3;

std::string default_out_root() {
    const char* env = std::getenv("SIRILAB_OUT");
    return env && *env ? env : "runs";
}

void ensure_dir(const fs::path& p) { fs::create_directories(p); }

template <typename Fn>
void write_file(const fs::path& path, Fn&& fill) {
    ensure_dir(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open for writing: " + path.string());
    fill(os);
}

ModelConfig read_model_config_file(const std::string& path) {
    KeyValueFile kv = KeyValueFile::parse_file(path);
    ExperimentManifest defaults;
    ModelConfig cfg = defaults.model;
    cfg.layers = static_cast<int>(kv.get_int_or("", "layers", cfg.layers));
    cfg.hidden_dim = static_cast<int>(kv.get_int_or("", "hidden_dim", cfg.hidden_dim));
    cfg.rnf_dim = static_cast<int>(kv.get_int_or("", "rnf_dim", cfg.rnf_dim));
    cfg.input_dim = static_cast<int>(kv.get_int_or("", "input_dim", cfg.input_dim));
    cfg.out_dim = static_cast<int>(kv.get_int_or("", "out_dim", cfg.out_dim));
    cfg.readout = readout_from_string(kv.get_or("", "readout", to_string(cfg.readout)));
    cfg.distribution = distribution_from_string(kv.get_or("", "distribution", to_string(cfg.distribution)));
    cfg.pair_head = kv.get_int_or("", "pair_head", cfg.pair_head ? 1 : 0) != 0;
    cfg.validate();
    return cfg;
}

std::vector<Graph> read_graph_list(const std::string& list_path) {
    std::ifstream is(list_path);
    if (!is) throw ValidationError("cannot open: " + list_path);
    std::vector<Graph> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        out.push_back(read_graph(line));
    }
    return out;
}

void write_labels(const NodeLabeling& lab, const fs::path& path) {
    write_file(path, [&](std::ostream& os) {
        os << "labels " << lab.labels.size() << '\n';
        for (bool b : lab.labels) os << (b ? 1 : 0) << '\n';
    });
}

// ---------------------------------------------------------------------------
// gen-data

int cmd_gen_data(const std::string& manifest_path, const std::string& out_dir) {
    ExperimentManifest m = ExperimentManifest::from_file(manifest_path);
    const fs::path root(out_dir);
    ensure_dir(root / "graphs");

    if (m.dataset == "triangle-ba") {
        TriangleData data = make_triangle_data(m);
        auto dump_set = [&](const std::vector<Graph>& graphs, const std::string& tag) {
            std::ostringstream list;
            for (std::size_t i = 0; i < graphs.size(); ++i) {
                std::ostringstream name;
                name << tag << '_' << i << ".graph";
                const fs::path gpath = root / "graphs" / name.str();
                write_graph(graphs[i], gpath.string());
                write_labels(label_triangles(graphs[i]), gpath.string() + ".labels");
                list << gpath.string() << '\n';
            }
            write_file(root / (tag + ".list"), [&](std::ostream& os) { os << list.str(); });
        };
        dump_set(data.train_graphs, "train");
        dump_set(data.interp_graphs, "test");
        dump_set(data.extrap_graphs, "extrap");
    } else {
        std::vector<GraphPair> pairs =
            generate_pair_family(m.pair_family, m.train_pairs + m.test_pairs, m.seed_for("data-pairs"));
        std::vector<PairListEntry> entries;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const fs::path a = root / "graphs" / ("pair" + std::to_string(i) + "_a.graph");
            const fs::path b = root / "graphs" / ("pair" + std::to_string(i) + "_b.graph");
            write_graph(pairs[i].first, a.string());
            write_graph(pairs[i].second, b.string());
            entries.push_back({a.string(), b.string(), pairs[i].isomorphic});
        }
        write_pair_list(entries, (root / "pairs.txt").string());
    }
    std::cout << "wrote dataset to " << root.string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const std::string& manifest_path, const std::string& out_dir) {
    ExperimentManifest m = ExperimentManifest::from_file(manifest_path);
    const fs::path root = out_dir.empty() ? fs::path(default_out_root()) / m.name : fs::path(out_dir);
    ensure_dir(root);
    write_file(root / "manifest.txt", [&](std::ostream& os) { m.write(os); });

    if (m.train.task != TaskKind::NodeBinary)
        throw ValidationError("task: the train command currently drives node-binary datasets; use reproduce for others");

    TriangleData data = make_triangle_data(m);
    for (int s = 0; s < m.num_seeds; ++s) {
        ModeRun run = run_triangle_mode(data, m, m.train.mode, m.train.k, s);
        const fs::path dir = root / ("seed" + std::to_string(s));
        write_file(dir / "metrics.csv", [&](std::ostream& os) { write_history_csv(run.history, os); });
        write_file(dir / "checkpoint.txt", [&](std::ostream& os) { write_checkpoint(run.params.named(), os); });
        write_file(dir / "model.cfg", [&](std::ostream& os) { write_model_config(run.model, os); });
        std::cout << to_string(m.train.mode) << " seed " << s << ": interp " << run.interp_acc << ", extrap "
                  << run.extrap_acc << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// eval-invariance

int cmd_eval_invariance(const std::string& checkpoint, const std::string& model_cfg_path,
                        const std::string& train_list, const std::string& test_list, int T, int num_seeds,
                        std::uint64_t seed, const std::string& out_csv, bool whole_matrix) {
    ModelConfig cfg = read_model_config_file(model_cfg_path);
    ModelParams params = params_from_named(cfg, read_checkpoint(checkpoint));
    std::vector<Graph> train_graphs = read_graph_list(train_list);
    std::vector<Graph> test_graphs = test_list.empty() ? std::vector<Graph>{} : read_graph_list(test_list);

    GnnPredictor pred(params, cfg);
    RnfSpec spec{cfg.rnf_dim, cfg.distribution, derive_seed(seed, "invariance-rnf")};
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < num_seeds; ++i) seeds.push_back(derive_seed(seed, "invariance-seed", i));
    InvarianceReport report = set_invariance_report(pred, train_graphs, test_graphs, spec, T, seeds, whole_matrix);

    write_file(out_csv, [&](std::ostream& os) { write_invariance_csv(report, os); });
    for (std::size_t i = 0; i < seeds.size(); ++i) std::cout << invariance_summary_line(report, i) << "\n";
    std::cout << "train mean " << report.train.mean << " +- " << report.train.stddev << ", test mean "
              << report.test.mean << " +- " << report.test.stddev << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// eval-pairs

int cmd_eval_pairs(const std::string& checkpoint, const std::string& model_cfg_path, const std::string& pair_list,
                   int S, double epsilon, std::uint64_t seed, const std::string& out_csv) {
    ModelConfig cfg = read_model_config_file(model_cfg_path);
    ModelParams params = params_from_named(cfg, read_checkpoint(checkpoint));
    std::vector<PairListEntry> entries = read_pair_list(pair_list);

    std::vector<FamilyPairs> families(1);
    families[0].family = "pairs";
    for (const auto& e : entries) {
        GraphPair p;
        p.first = read_graph(e.path1);
        p.second = read_graph(e.path2);
        p.isomorphic = e.isomorphic;
        families[0].pairs.push_back(std::move(p));
    }
    if (epsilon <= 0.0)
        epsilon = calibrate_epsilon(params, cfg, families[0].pairs, S, derive_seed(seed, "calibration"));
    SuiteReport report = run_suite(params, cfg, families, S, epsilon, derive_seed(seed, "suite"));
    write_file(out_csv, [&](std::ostream& os) { write_suite_csv(report, os); });
    write_file(out_csv + ".summary", [&](std::ostream& os) { write_suite_summary_csv(report, os); });
    std::cout << "epsilon " << epsilon << ": separated " << report.separated() << "/" << report.total() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// checks

int report_checks(const std::vector<CheckResult>& results, const fs::path& dump_dir) {
    bool all_pass = true;
    for (const CheckResult& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
        if (!r.pass) {
            all_pass = false;
            if (r.counterexample) {
                ensure_dir(dump_dir);
                const fs::path p = dump_dir / (r.name.substr(r.name.find(':') + 1) + ".counterexample.graph");
                write_graph(*r.counterexample, p.string());
                std::cout << "       counterexample graph written to " << p.string() << "\n";
            }
        }
    }
    return all_pass ? kExitOk : kExitCheckFailure;
}

// ---------------------------------------------------------------------------
// reproduce

void write_mode_run(const fs::path& root, const ModeRun& run) {
    const fs::path dir =
        root / "runs" / (run.mode + "-k" + std::to_string(run.k) + "-s" + std::to_string(run.seed_index));
    write_file(dir / "metrics.csv", [&](std::ostream& os) { write_history_csv(run.history, os); });
    write_file(dir / "checkpoint.txt", [&](std::ostream& os) { write_checkpoint(run.params.named(), os); });
    write_file(dir / "model.cfg", [&](std::ostream& os) { write_model_config(run.model, os); });
}

int cmd_reproduce(const std::string& name, double scale, const std::string& out_dir) {
    ExperimentManifest m = canned_manifest(name, scale);
    const fs::path root = out_dir.empty() ? fs::path(default_out_root()) / name : fs::path(out_dir);
    ensure_dir(root);
    write_file(root / "manifest.txt", [&](std::ostream& os) { m.write(os); });

    if (name == "triangle-interp" || name == "triangle-extrap") {
        TriangleData data = make_triangle_data(m);
        std::vector<ModeRun> runs;
        for (const std::string& mode_name : m.modes)
            for (int s = 0; s < m.num_seeds; ++s) {
                runs.push_back(run_triangle_mode(data, m, train_mode_from_string(mode_name), m.train.k, s,
                                                 name == "triangle-extrap"));
                write_mode_run(root, runs.back());
            }
        write_file(root / "summary.csv", [&](std::ostream& os) { write_triangle_summary_csv(runs, os); });

        // invariance of the first SIRI run, per the protocol
        for (const ModeRun& run : runs)
            if (run.mode == "siri") {
                InvarianceReport rep = triangle_invariance_report(run, data, m);
                write_file(root / "invariance_siri.csv", [&](std::ostream& os) { write_invariance_csv(rep, os); });
                break;
            }
        for (const std::string& mode_name : m.modes) {
            ModeSummary s = summarize_mode(runs, mode_name, m.train.k);
            std::cout << mode_name << ": interp " << s.interp_mean << " +- " << s.interp_std << ", extrap "
                      << s.extrap_mean << " +- " << s.extrap_std << "\n";
        }
        return kExitOk;
    }

    if (name == "convergence") {
        PairClassificationData data = make_pair_classification_data(m);
        std::vector<ModeRun> runs;
        for (const std::string& mode_name : m.modes)
            for (int s = 0; s < m.num_seeds; ++s) {
                runs.push_back(run_pair_classification_mode(data, m, train_mode_from_string(mode_name), s));
                write_mode_run(root, runs.back());
            }
        write_file(root / "convergence.csv", [&](std::ostream& os) { write_convergence_csv(runs, os); });
        for (const ModeRun& r : runs)
            std::cout << r.mode << " seed " << r.seed_index << ": converged at epoch " << convergence_epoch(r.history)
                      << ", final test acc " << r.history.records.back().test_acc << "\n";
        return kExitOk;
    }

    // separation
    SeparationData data = make_separation_data(m);
    for (const std::string& mode_name : m.modes) {
        SeparationRun run = run_separation_mode(data, m, train_mode_from_string(mode_name));
        write_file(root / ("pairs_" + run.mode + ".csv"), [&](std::ostream& os) { write_suite_csv(run.report, os); });
        write_file(root / ("pairs_" + run.mode + "_summary.csv"),
                   [&](std::ostream& os) { write_suite_summary_csv(run.report, os); });
        std::cout << run.mode << ": epsilon " << run.epsilon << ", separated " << run.report.separated() << "/"
                  << run.report.total() << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Training and analysis lab for GNNs with random unique node identifiers"};
    app.require_subcommand(1);

    std::string manifest_path, out_dir, checkpoint, model_cfg, train_list, test_list, pair_list, out_csv, name;
    int T = 200, num_seeds = 3, S = 16;
    double epsilon = 0.0, scale = 1.0;
    std::uint64_t seed = 1;
    bool whole_matrix = false;

    auto* gen = app.add_subcommand("gen-data", "Generate graph/label/pair files from a manifest");
    gen->add_option("manifest", manifest_path, "manifest file")->required();
    gen->add_option("out", out_dir, "output directory")->required();

    auto* tr = app.add_subcommand("train", "Run training per manifest; writes checkpoints and metrics CSVs");
    tr->add_option("manifest", manifest_path, "manifest file")->required();
    tr->add_option("--out", out_dir, "output directory (default $SIRILAB_OUT/<name>)");

    auto* inv = app.add_subcommand("eval-invariance", "UID-invariance ratio report for a trained checkpoint");
    inv->add_option("--checkpoint", checkpoint)->required();
    inv->add_option("--model-config", model_cfg)->required();
    inv->add_option("--train-list", train_list, "file listing train graph paths")->required();
    inv->add_option("--test-list", test_list, "file listing test graph paths");
    inv->add_option("--resamples,-T", T, "UID resamples per node");
    inv->add_option("--seeds", num_seeds, "number of evaluation seeds");
    inv->add_option("--seed", seed, "master evaluation seed");
    inv->add_flag("--whole-matrix", whole_matrix, "resample the full RNF matrix instead of one row");
    inv->add_option("--out", out_csv, "output CSV path")->required();

    auto* pairs = app.add_subcommand("eval-pairs", "Pairwise separation suite for a trained checkpoint");
    pairs->add_option("--checkpoint", checkpoint)->required();
    pairs->add_option("--model-config", model_cfg)->required();
    pairs->add_option("--pairs", pair_list, "pair-list file")->required();
    pairs->add_option("--samples,-S", S, "RNF draws per embedding");
    pairs->add_option("--epsilon", epsilon, "distance threshold (0 = calibrate)");
    pairs->add_option("--seed", seed, "evaluation seed");
    pairs->add_option("--out", out_csv, "output CSV path")->required();

    auto* oracle = app.add_subcommand("oracle-check", "Run the constructive-theorem oracle suites");
    auto* grad = app.add_subcommand("grad-check", "Run the differentiation verification suite");
    oracle->add_option("--seed", seed, "randomization seed");
    grad->add_option("--seed", seed, "randomization seed");

    auto* rep = app.add_subcommand("reproduce", "Run a canned desk-scale experiment");
    rep->add_option("name", name, "triangle-interp|triangle-extrap|convergence|separation")->required();
    rep->add_option("--scale", scale, "shrink factor for epochs/graph counts");
    rep->add_option("--out", out_dir, "output directory (default $SIRILAB_OUT/<name>)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(manifest_path, out_dir);
        if (tr->parsed()) return cmd_train(manifest_path, out_dir);
        if (inv->parsed())
            return cmd_eval_invariance(checkpoint, model_cfg, train_list, test_list, T, num_seeds, seed, out_csv,
                                       whole_matrix);
        if (pairs->parsed()) return cmd_eval_pairs(checkpoint, model_cfg, pair_list, S, epsilon, seed, out_csv);
        if (oracle->parsed()) return report_checks(run_oracle_checks(seed), "oracle-failures");
        if (grad->parsed()) return report_checks(run_gradient_checks(seed), "grad-failures");
        if (rep->parsed()) return cmd_reproduce(name, scale, out_dir);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}
