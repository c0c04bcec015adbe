// lrgccf: prepare implicit-feedback data, train linear-residual graph
// collaborative filtering models, evaluate top-N ranking, and emit
// over-smoothing diagnostics.

#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrgccf/dataset.hpp"
#include "lrgccf/eval.hpp"
#include "lrgccf/graph.hpp"
#include "lrgccf/model.hpp"
#include "lrgccf/trainer.hpp"

namespace {

using namespace lrgccf;

void apply_threads(int threads) {
    if (threads <= 0) {
        if (const char* env = std::getenv("LRGCCF_THREADS")) threads = std::atoi(env);
    }
    if (threads > 0) omp_set_num_threads(threads);
}

void write_resolved_config(CLI::App* sub, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write resolved config: " + path);
    out << sub->config_to_str(true, false);
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

struct TrainArgs {
    std::string data_dir;
    std::string out = "model.ckpt";
    std::string history_path;
    int depth = 3;
    int dim = 64;
    double lambda = 0.01;
    double lr = 0.005;
    int epochs = 400;
    int batch_size = 2048;
    int negatives = 1;
    std::string mode = "paper";
    std::string residual = "on";
    std::uint64_t seed = 2020;
    int eval_every = 5;
    int patience = 10;
    bool quiet = false;
};

void add_train_options(CLI::App* sub, TrainArgs& a) {
    sub->add_option("--data", a.data_dir, "prepared dataset directory")->required();
    sub->add_option("--k", a.depth, "propagation depth K");
    sub->add_option("--dim", a.dim, "embedding dimension D");
    sub->add_option("--lambda", a.lambda, "L2 regularization coefficient");
    sub->add_option("--lr", a.lr, "learning rate");
    sub->add_option("--epochs", a.epochs, "maximum training epochs");
    sub->add_option("--batch-size", a.batch_size, "mini-batch size");
    sub->add_option("--negatives", a.negatives, "negative samples per positive");
    sub->add_option("--mode", a.mode, "normalization mode")
        ->check(CLI::IsMember({"paper", "sqrt"}));
    sub->add_option("--residual", a.residual, "residual preference scoring")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--seed", a.seed, "master seed");
    sub->add_option("--eval-every", a.eval_every, "epochs between validation evals");
    sub->add_option("--patience", a.patience, "early-stop patience in evaluations");
    sub->add_flag("--quiet", a.quiet, "suppress progress lines");
}

struct TrainedModel {
    TrainResult result;
    ModelConfig mcfg;
    IndexedDataset dataset;
    BipartiteGraph graph;
};

TrainedModel run_training(const TrainArgs& a) {
    TrainedModel tm;
    tm.dataset = load_dataset(a.data_dir);
    tm.graph = build_graph(tm.dataset);

    tm.mcfg.depth = a.depth;
    tm.mcfg.dim = a.dim;
    tm.mcfg.mode = normalization_mode_from_string(a.mode);
    tm.mcfg.residual = a.residual == "on";

    TrainConfig tcfg;
    tcfg.lr = a.lr;
    tcfg.lambda = a.lambda;
    tcfg.epochs = a.epochs;
    tcfg.batch_size = a.batch_size;
    tcfg.negatives_per_positive = a.negatives;
    tcfg.seed = a.seed;
    tcfg.eval_every = a.eval_every;
    tcfg.early_stop_patience = a.patience;

    EvalHook hook;
    if (!tm.dataset.val.empty()) {
        hook = [&tm](const EmbeddingState& st) {
            const auto report = evaluate(st, tm.dataset, EvalSplit::Val, tm.mcfg.residual, {20});
            return ValMetrics{report.rows[0].hr, report.rows[0].ndcg};
        };
    }
    tm.result = train(tm.dataset, tm.graph, tm.mcfg, tcfg, hook);
    if (!a.quiet)
        std::cerr << "best validation epoch: " << tm.result.best_epoch << '\n';
    return tm;
}

void write_history(const std::vector<EpochStats>& history, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write history: " + path);
    out << "epoch,loss,val_hr20,val_ndcg20\n";
    for (const auto& row : history)
        out << row.epoch << ',' << fmt(row.loss) << ',' << fmt(row.val_hr20) << ','
            << fmt(row.val_ndcg20) << '\n';
}

Checkpoint load_checkpoint_for(const std::string& path, const IndexedDataset& ds) {
    Checkpoint cp = load_checkpoint(path);
    if (cp.state.num_users != ds.num_users || cp.state.num_items != ds.num_items)
        throw Error("checkpoint (M=" + std::to_string(cp.state.num_users) +
                    ", N=" + std::to_string(cp.state.num_items) +
                    ") does not match dataset (M=" + std::to_string(ds.num_users) +
                    ", N=" + std::to_string(ds.num_items) + ")");
    return cp;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linear residual graph convolutional collaborative filtering"};
    app.require_subcommand(1);
    app.set_config("--config");
    app.option_defaults()->always_capture_default();

    int threads = 0;
    app.add_option("--threads", threads, "OpenMP thread count (or LRGCCF_THREADS)");

    // prepare
    auto* prepare = app.add_subcommand("prepare", "filter, reindex and split interactions");
    std::string prep_input, prep_format = "tsv", prep_out = "data";
    int kcore = 10;
    std::uint64_t prep_seed = 2020;
    prepare->add_option("--input", prep_input, "interaction file, one (user, item) per line")
        ->required();
    prepare->add_option("--format", prep_format, "input delimiter")
        ->check(CLI::IsMember({"tsv", "csv"}));
    prepare->add_option("--kcore", kcore, "k-core threshold");
    prepare->add_option("--seed", prep_seed, "master seed");
    prepare->add_option("--out", prep_out, "output dataset directory")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "train a model with BPR");
    TrainArgs targs;
    add_train_options(train_cmd, targs);
    train_cmd->add_option("--out", targs.out, "checkpoint output path");
    train_cmd->add_option("--history", targs.history_path,
                          "history CSV path (default <out>.history.csv)");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "rank all unrated items and report HR/NDCG");
    std::string ev_ckpt, ev_data, ev_split = "test", ev_topn = "10,20,30,40,50", ev_out;
    eval_cmd->add_option("--checkpoint", ev_ckpt)->required();
    eval_cmd->add_option("--data", ev_data)->required();
    eval_cmd->add_option("--split", ev_split)->check(CLI::IsMember({"val", "test"}));
    eval_cmd->add_option("--topn", ev_topn, "comma-separated cutoffs");
    eval_cmd->add_option("--out", ev_out, "CSV output path (default stdout)");

    // diagnose
    auto* diag_cmd = app.add_subcommand("diagnose", "per-layer cosine-similarity statistics");
    std::string dg_ckpt, dg_data, dg_out;
    int dg_k = -1, dg_pairs = 100000;
    std::uint64_t dg_seed = 2020;
    diag_cmd->add_option("--checkpoint", dg_ckpt)->required();
    diag_cmd->add_option("--data", dg_data)->required();
    diag_cmd->add_option("--k", dg_k, "depth override (default: checkpoint depth)");
    diag_cmd->add_option("--pairs", dg_pairs, "sampled pairs per layer and group");
    diag_cmd->add_option("--seed", dg_seed, "master seed");
    diag_cmd->add_option("--out", dg_out, "CSV output path (default stdout)");

    // sweep-k
    auto* sweep_cmd = app.add_subcommand("sweep-k", "train and evaluate across depths");
    TrainArgs sargs;
    add_train_options(sweep_cmd, sargs);
    std::string sweep_klist = "0,1,2,3,4,5", sweep_out = "sweep.csv";
    sweep_cmd->add_option("--k-list", sweep_klist, "comma-separated depths");
    sweep_cmd->add_option("--out", sweep_out, "CSV output path");

    try {
        app.parse(argc, argv);
        apply_threads(threads);

        if (*prepare) {
            auto records = parse_interactions_file(
                prep_input, prep_format == "tsv" ? FileFormat::Tsv : FileFormat::Csv);
            records = k_core_filter(records, kcore);
            IndexedDataset ds = split_dataset(records, SplitRatios{},
                                              sub_seed(prep_seed, "data"));
            ds.seed = prep_seed;
            ds.kcore_threshold = kcore;
            save_dataset(ds, prep_out);
            write_resolved_config(&app, prep_out + "/config");
            std::cerr << "prepared " << prep_out << ": M=" << ds.num_users
                      << " N=" << ds.num_items << " train=" << ds.train.size()
                      << " val=" << ds.val.size() << " test=" << ds.test.size() << '\n';
        } else if (*train_cmd) {
            TrainedModel tm = run_training(targs);
            save_checkpoint(tm.result.best, tm.mcfg, targs.out);
            const std::string hist =
                targs.history_path.empty() ? targs.out + ".history.csv" : targs.history_path;
            write_history(tm.result.history, hist);
            write_resolved_config(&app, targs.out + ".config");
        } else if (*eval_cmd) {
            IndexedDataset ds = load_dataset(ev_data);
            Checkpoint cp = load_checkpoint_for(ev_ckpt, ds);
            BipartiteGraph g = build_graph(ds);
            refresh_layers(cp.state, g, cp.config);
            std::vector<std::int32_t> topns;
            for (const auto& tok : CLI::detail::split(ev_topn, ','))
                topns.push_back(std::stoi(tok));
            const auto report =
                evaluate(cp.state, ds, ev_split == "val" ? EvalSplit::Val : EvalSplit::Test,
                         cp.config.residual, topns);
            std::ostringstream csv;
            csv << "N,hr,ndcg\n";
            for (const auto& row : report.rows)
                csv << row.n << ',' << fmt(row.hr) << ',' << fmt(row.ndcg) << '\n';
            if (ev_out.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream out(ev_out, std::ios::binary);
                if (!out) throw Error("cannot write " + ev_out);
                out << csv.str();
                write_resolved_config(&app, ev_out + ".config");
            }
        } else if (*diag_cmd) {
            IndexedDataset ds = load_dataset(dg_data);
            Checkpoint cp = load_checkpoint_for(dg_ckpt, ds);
            if (dg_k >= 0) cp.config.depth = dg_k;
            BipartiteGraph g = build_graph(ds);
            refresh_layers(cp.state, g, cp.config);
            std::mt19937_64 rng(sub_seed(dg_seed, "diagnostics"));
            const auto report = smoothness(cp.state, dg_pairs, rng);
            std::ostringstream csv;
            csv << "layer,group,sim_mean,sim_var\n";
            for (const auto& row : report.rows) {
                csv << row.layer << ",user," << fmt(row.user_sim_mean) << ','
                    << fmt(row.user_sim_var) << '\n';
                csv << row.layer << ",item," << fmt(row.item_sim_mean) << ','
                    << fmt(row.item_sim_var) << '\n';
            }
            if (dg_out.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream out(dg_out, std::ios::binary);
                if (!out) throw Error("cannot write " + dg_out);
                out << csv.str();
                write_resolved_config(&app, dg_out + ".config");
            }
        } else if (*sweep_cmd) {
            std::ofstream out(sweep_out, std::ios::binary);
            if (!out) throw Error("cannot write " + sweep_out);
            out << "k,hr20,ndcg20\n";
            for (const auto& tok : CLI::detail::split(sweep_klist, ',')) {
                TrainArgs ka = sargs;
                ka.depth = std::stoi(tok);
                TrainedModel tm = run_training(ka);
                refresh_layers(tm.result.best, tm.graph, tm.mcfg);
                const auto report =
                    evaluate(tm.result.best, tm.dataset, EvalSplit::Test, tm.mcfg.residual, {20});
                out << ka.depth << ',' << fmt(report.rows[0].hr) << ','
                    << fmt(report.rows[0].ndcg) << '\n';
                if (!ka.quiet)
                    std::cerr << "k=" << ka.depth << " test hr20=" << fmt(report.rows[0].hr)
                              << " ndcg20=" << fmt(report.rows[0].ndcg) << '\n';
            }
            out.close();
            write_resolved_config(&app, sweep_out + ".config");
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
