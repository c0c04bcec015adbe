#ifndef LRGCCF_DATASET_HPP_
#define LRGCCF_DATASET_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lrgccf/common.hpp"

namespace lrgccf {

struct InteractionRecord {
    std::string user;
    std::string item;
};

enum class FileFormat { Tsv, Csv };

struct SplitRatios {
    double train = 0.8;
    double val = 0.1;
    double test = 0.1;
};

using Interaction = std::pair<std::int32_t, std::int32_t>;  // (user index, item index)

struct IndexedDataset {
    std::int32_t num_users = 0;  // M
    std::int32_t num_items = 0;  // N
    std::vector<Interaction> train;
    std::vector<Interaction> val;
    std::vector<Interaction> test;
    // Per-user sorted train-positive item indices (R_u).
    std::vector<std::vector<std::int32_t>> user_train_items;
    // index -> raw id
    std::vector<std::string> user_ids;
    std::vector<std::string> item_ids;
    std::uint64_t seed = 0;
    std::int32_t kcore_threshold = 0;

    // Sorted positives for a user in a given split, built on demand.
    std::vector<std::int32_t> positives(const std::vector<Interaction>& split,
                                        std::int32_t user) const;
};

// Reads "user<delim>item[<delim>extra...]" lines; duplicates retained.
// Throws Error naming the line number on malformed input.
std::vector<InteractionRecord> parse_interactions(std::istream& in, FileFormat format);
std::vector<InteractionRecord> parse_interactions_file(const std::string& path,
                                                       FileFormat format);

// Deduplicates (user,item) pairs, then iteratively peels users/items with
// fewer than `threshold` interactions until a fixed point.
std::vector<InteractionRecord> k_core_filter(const std::vector<InteractionRecord>& records,
                                             std::int32_t threshold);

// Global random split at the given ratios; any user left without a train
// record gets one moved back from its largest split bucket. Ids are
// reindexed contiguously in first-appearance order.
IndexedDataset split_dataset(const std::vector<InteractionRecord>& records,
                             SplitRatios ratios, std::uint64_t seed);

// Dataset directory: meta, train.txt, val.txt, test.txt, user_map.txt, item_map.txt
void save_dataset(const IndexedDataset& ds, const std::string& dir);
IndexedDataset load_dataset(const std::string& dir);

}  // namespace lrgccf

#endif
