// End-to-end checks of the lrgccf executable. Runs the real binary
// (path in argv[1]) against a small generated dataset in a temp directory.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    std::cout << (ok ? "ok: " : "FAIL: ") << what << "\n";
    if (!ok) ++failures;
}

int run(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_ratings(const fs::path& path) {
    // 30 users x 40 items, clustered; dense enough to survive 5-core
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> idist(0, 39);
    std::ofstream out(path);
    for (int u = 0; u < 30; ++u)
        for (int r = 0; r < 14; ++r)
            out << "user" << u << '\t' << "item" << ((u % 4) * 10 + idist(rng) % 10) << '\t'
                << "1\n";
    for (int u = 0; u < 30; ++u)
        for (int r = 0; r < 4; ++r) out << "user" << u << '\t' << "item" << idist(rng) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <path-to-lrgccf>\n";
        return 2;
    }
    const std::string bin = argv[1];
    const fs::path work = fs::temp_directory_path() / "lrgccf_cli_tests";
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string w = work.string();

    write_ratings(work / "ratings.tsv");

    // prepare
    check(run(bin + " prepare --input " + w + "/ratings.tsv --kcore 5 --seed 7 --out " + w +
              "/data 2>/dev/null") == 0,
          "prepare succeeds");
    check(fs::exists(work / "data/meta") && fs::exists(work / "data/train.txt") &&
              fs::exists(work / "data/user_map.txt"),
          "prepare writes the dataset directory");
    check(fs::exists(work / "data/config"), "prepare serializes its resolved config");

    // prepare determinism: byte-identical outputs on rerun
    check(run(bin + " prepare --input " + w + "/ratings.tsv --kcore 5 --seed 7 --out " + w +
              "/data2 2>/dev/null") == 0,
          "prepare rerun succeeds");
    for (const char* f : {"meta", "train.txt", "val.txt", "test.txt", "user_map.txt",
                          "item_map.txt"})
        check(slurp(work / "data" / f) == slurp(work / "data2" / f),
              std::string("prepare deterministic: ") + f);

    check(run(bin + " prepare --input " + w + "/missing.tsv --out " + w +
              "/nope 2>/dev/null") == 2,
          "missing input exits with code 2");

    // train (tiny settings)
    const std::string train_flags = " train --data " + w + "/data --k 2 --dim 8 --epochs 4"
                                    " --batch-size 64 --lr 0.05 --seed 11 --eval-every 2";
    check(run(bin + train_flags + " --out " + w + "/model.ckpt 2>/dev/null") == 0,
          "train succeeds");
    check(fs::exists(work / "model.ckpt") && fs::exists(work / "model.ckpt.history.csv"),
          "train writes checkpoint and history");
    {
        std::ifstream hist(work / "model.ckpt.history.csv");
        std::string header;
        std::getline(hist, header);
        check(header == "epoch,loss,val_hr20,val_ndcg20", "history CSV header");
    }
    check(fs::exists(work / "model.ckpt.config"), "train serializes its resolved config");

    // rerun from the serialized config reproduces the checkpoint byte-identically
    check(run(bin + " --config " + w + "/model.ckpt.config train --data " + w +
              "/data --out " + w + "/model_b.ckpt 2>/dev/null") == 0,
          "train from resolved config succeeds");
    check(slurp(work / "model.ckpt") == slurp(work / "model_b.ckpt"),
          "config round-trip reproduces the checkpoint");

    // evaluate
    check(run(bin + " evaluate --checkpoint " + w + "/model.ckpt --data " + w +
              "/data --split test --out " + w + "/test.csv 2>/dev/null") == 0,
          "evaluate succeeds");
    {
        std::ifstream csv(work / "test.csv");
        std::string header;
        std::getline(csv, header);
        check(header == "N,hr,ndcg", "evaluate CSV header");
        int rows = 0;
        std::string line;
        while (std::getline(csv, line))
            if (!line.empty()) ++rows;
        check(rows == 5, "evaluate emits one row per cutoff");
    }
    check(run(bin + " evaluate --checkpoint " + w + "/model.ckpt --data " + w +
              "/data --split val --out " + w + "/val.csv 2>/dev/null") == 0,
          "evaluate on val succeeds");
    check(slurp(work / "val.csv") != slurp(work / "test.csv"),
          "val and test reports differ (masking rule)");

    check(run(bin + " evaluate --checkpoint " + w + "/nope.ckpt --data " + w +
              "/data 2>/dev/null") == 2,
          "missing checkpoint exits with code 2");

    // checkpoint/dataset mismatch
    check(run(bin + " evaluate --checkpoint " + w + "/model.ckpt --data " + w +
              "/data_mismatch 2>/dev/null") == 2,
          "bad data dir exits with code 2");

    // diagnose: k=4 -> 5 layers x 2 groups = 10 rows
    check(run(bin + " diagnose --checkpoint " + w + "/model.ckpt --data " + w +
              "/data --k 4 --pairs 200 --seed 3 --out " + w + "/diag.csv 2>/dev/null") == 0,
          "diagnose succeeds");
    {
        std::ifstream csv(work / "diag.csv");
        std::string header;
        std::getline(csv, header);
        check(header == "layer,group,sim_mean,sim_var", "diagnose CSV header");
        int rows = 0;
        std::string line;
        while (std::getline(csv, line))
            if (!line.empty()) ++rows;
        check(rows == 10, "diagnose emits 10 rows for K=4");
    }

    // sweep-k
    check(run(bin + " sweep-k --data " + w + "/data --k-list 0,1 --dim 8 --epochs 2"
              " --batch-size 64 --seed 5 --out " + w + "/sweep.csv --quiet 2>/dev/null") == 0,
          "sweep-k succeeds");
    {
        std::ifstream csv(work / "sweep.csv");
        std::string header, r0, r1;
        std::getline(csv, header);
        std::getline(csv, r0);
        std::getline(csv, r1);
        check(header == "k,hr20,ndcg20", "sweep CSV header");
        check(r0.rfind("0,", 0) == 0 && r1.rfind("1,", 0) == 0, "sweep rows per K");
    }

    fs::remove_all(work);
    std::cout << (failures == 0 ? "ALL OK\n" : "FAILURES\n");
    return failures == 0 ? 0 : 1;
}
