#include "lrgccf/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace lrgccf {

std::vector<std::int32_t> IndexedDataset::positives(const std::vector<Interaction>& split,
                                                    std::int32_t user) const {
    std::vector<std::int32_t> out;
    for (const auto& [u, i] : split)
        if (u == user) out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<InteractionRecord> parse_interactions(std::istream& in, FileFormat format) {
    const char delim = format == FileFormat::Tsv ? '\t' : ',';
    std::vector<InteractionRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto first = line.find(delim);
        if (first == std::string::npos || first == 0)
            throw Error("parse error at line " + std::to_string(lineno) +
                        ": expected at least 2 fields");
        auto second = line.find(delim, first + 1);
        std::string item = second == std::string::npos
                               ? line.substr(first + 1)
                               : line.substr(first + 1, second - first - 1);
        if (item.empty())
            throw Error("parse error at line " + std::to_string(lineno) + ": empty item field");
        records.push_back({line.substr(0, first), std::move(item)});
    }
    if (records.empty()) throw Error("no interaction records in input");
    return records;
}

std::vector<InteractionRecord> parse_interactions_file(const std::string& path,
                                                       FileFormat format) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open input file: " + path);
    return parse_interactions(in, format);
}

std::vector<InteractionRecord> k_core_filter(const std::vector<InteractionRecord>& records,
                                             std::int32_t threshold) {
    if (threshold < 1) throw Error("k-core threshold must be >= 1");

    // Dedup to implicit-feedback edges, keeping first-occurrence order.
    std::vector<InteractionRecord> edges;
    {
        std::unordered_set<std::string> seen;
        edges.reserve(records.size());
        for (const auto& r : records) {
            std::string key = r.user + '\x1f' + r.item;
            if (seen.insert(std::move(key)).second) edges.push_back(r);
        }
    }

    std::unordered_map<std::string, std::int32_t> user_deg, item_deg;
    for (const auto& e : edges) {
        ++user_deg[e.user];
        ++item_deg[e.item];
    }

    // Iterative peeling to a fixed point.
    bool changed = true;
    std::vector<char> alive(edges.size(), 1);
    while (changed) {
        changed = false;
        for (std::size_t idx = 0; idx < edges.size(); ++idx) {
            if (!alive[idx]) continue;
            const auto& e = edges[idx];
            if (user_deg[e.user] < threshold || item_deg[e.item] < threshold) {
                alive[idx] = 0;
                --user_deg[e.user];
                --item_deg[e.item];
                changed = true;
            }
        }
    }

    std::vector<InteractionRecord> out;
    for (std::size_t idx = 0; idx < edges.size(); ++idx)
        if (alive[idx]) out.push_back(edges[idx]);
    if (out.empty()) throw Error("k-core filter eliminated all data");
    return out;
}

IndexedDataset split_dataset(const std::vector<InteractionRecord>& records,
                             SplitRatios ratios, std::uint64_t seed) {
    if (records.size() < 3) throw Error("need at least 3 records to split");
    const double ratio_sum = ratios.train + ratios.val + ratios.test;
    if (std::abs(ratio_sum - 1.0) > 1e-9) throw Error("split ratios must sum to 1");

    IndexedDataset ds;
    ds.seed = seed;

    // Contiguous ids in first-appearance order.
    std::unordered_map<std::string, std::int32_t> user_idx, item_idx;
    std::vector<Interaction> indexed;
    indexed.reserve(records.size());
    for (const auto& r : records) {
        auto [uit, unew] = user_idx.try_emplace(r.user, ds.num_users);
        if (unew) {
            ds.user_ids.push_back(r.user);
            ++ds.num_users;
        }
        auto [iit, inew] = item_idx.try_emplace(r.item, ds.num_items);
        if (inew) {
            ds.item_ids.push_back(r.item);
            ++ds.num_items;
        }
        indexed.emplace_back(uit->second, iit->second);
    }

    const std::size_t n = indexed.size();
    const auto n_val = static_cast<std::size_t>(static_cast<double>(n) * ratios.val);
    const auto n_test = static_cast<std::size_t>(static_cast<double>(n) * ratios.test);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    // 0 = train, 1 = val, 2 = test
    std::vector<char> bucket(n, 0);
    for (std::size_t k = 0; k < n_val; ++k) bucket[order[k]] = 1;
    for (std::size_t k = n_val; k < n_val + n_test; ++k) bucket[order[k]] = 2;

    // Every user needs at least one train positive: move one record back
    // from the user's larger split bucket (val on ties).
    std::vector<std::int32_t> user_train_count(static_cast<std::size_t>(ds.num_users), 0);
    for (std::size_t k = 0; k < n; ++k)
        if (bucket[k] == 0) ++user_train_count[static_cast<std::size_t>(indexed[k].first)];
    for (std::int32_t u = 0; u < ds.num_users; ++u) {
        if (user_train_count[static_cast<std::size_t>(u)] > 0) continue;
        std::int32_t in_val = 0, in_test = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (indexed[k].first != u) continue;
            if (bucket[k] == 1) ++in_val;
            else if (bucket[k] == 2) ++in_test;
        }
        const char from = in_val >= in_test ? 1 : 2;
        for (std::size_t k = 0; k < n; ++k) {
            if (indexed[k].first == u && bucket[k] == from) {
                bucket[k] = 0;
                break;
            }
        }
        user_train_count[static_cast<std::size_t>(u)] = 1;
    }

    for (std::size_t k = 0; k < n; ++k) {
        switch (bucket[k]) {
            case 0: ds.train.push_back(indexed[k]); break;
            case 1: ds.val.push_back(indexed[k]); break;
            default: ds.test.push_back(indexed[k]); break;
        }
    }

    ds.user_train_items.assign(static_cast<std::size_t>(ds.num_users), {});
    for (const auto& [u, i] : ds.train)
        ds.user_train_items[static_cast<std::size_t>(u)].push_back(i);
    for (auto& items : ds.user_train_items) std::sort(items.begin(), items.end());

    return ds;
}

namespace {

void write_split(const std::string& path, const std::vector<Interaction>& split) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    for (const auto& [u, i] : split) out << u << '\t' << i << '\n';
}

std::vector<Interaction> read_split(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::vector<Interaction> out;
    std::int32_t u, i;
    while (in >> u >> i) out.emplace_back(u, i);
    return out;
}

void write_map(const std::string& path, const std::vector<std::string>& ids) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    for (std::size_t k = 0; k < ids.size(); ++k) out << ids[k] << '\t' << k << '\n';
}

std::vector<std::string> read_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto tab = line.rfind('\t');
        if (tab == std::string::npos) throw Error("malformed map line in " + path);
        auto idx = static_cast<std::size_t>(std::stoll(line.substr(tab + 1)));
        if (ids.size() <= idx) ids.resize(idx + 1);
        ids[idx] = line.substr(0, tab);
    }
    return ids;
}

}  // namespace

void save_dataset(const IndexedDataset& ds, const std::string& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream meta(dir + "/meta", std::ios::binary);
        if (!meta) throw Error("cannot write " + dir + "/meta");
        meta << "M=" << ds.num_users << '\n'
             << "N=" << ds.num_items << '\n'
             << "train=" << ds.train.size() << '\n'
             << "val=" << ds.val.size() << '\n'
             << "test=" << ds.test.size() << '\n'
             << "seed=" << ds.seed << '\n'
             << "threshold=" << ds.kcore_threshold << '\n';
    }
    write_split(dir + "/train.txt", ds.train);
    write_split(dir + "/val.txt", ds.val);
    write_split(dir + "/test.txt", ds.test);
    write_map(dir + "/user_map.txt", ds.user_ids);
    write_map(dir + "/item_map.txt", ds.item_ids);
}

IndexedDataset load_dataset(const std::string& dir) {
    IndexedDataset ds;
    {
        std::ifstream meta(dir + "/meta");
        if (!meta) throw Error("cannot read " + dir + "/meta: not a dataset directory?");
        std::string line;
        while (std::getline(meta, line)) {
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(0, eq);
            const std::string val = line.substr(eq + 1);
            if (key == "M") ds.num_users = static_cast<std::int32_t>(std::stol(val));
            else if (key == "N") ds.num_items = static_cast<std::int32_t>(std::stol(val));
            else if (key == "seed") ds.seed = std::stoull(val);
            else if (key == "threshold")
                ds.kcore_threshold = static_cast<std::int32_t>(std::stol(val));
        }
    }
    ds.train = read_split(dir + "/train.txt");
    ds.val = read_split(dir + "/val.txt");
    ds.test = read_split(dir + "/test.txt");
    ds.user_ids = read_map(dir + "/user_map.txt");
    ds.item_ids = read_map(dir + "/item_map.txt");
    if (static_cast<std::int32_t>(ds.user_ids.size()) != ds.num_users ||
        static_cast<std::int32_t>(ds.item_ids.size()) != ds.num_items)
        throw Error("dataset meta does not match id maps in " + dir);
    ds.user_train_items.assign(static_cast<std::size_t>(ds.num_users), {});
    for (const auto& [u, i] : ds.train) {
        if (u < 0 || u >= ds.num_users || i < 0 || i >= ds.num_items)
            throw Error("train index out of range in " + dir);
        ds.user_train_items[static_cast<std::size_t>(u)].push_back(i);
    }
    for (auto& items : ds.user_train_items) std::sort(items.begin(), items.end());
    return ds;
}

}  // namespace lrgccf
