#include "lungbench/dataset/split.hpp"

#include <map>
#include <set>
#include <string>

#include "lungbench/common/error.hpp"
#include "lungbench/common/random.hpp"

namespace lungbench::dataset {

std::vector<FoldAssignment> grouped_kfold(const DatasetManifest& manifest) {
    const int k = manifest.fold_count;
    if (k < 2) throw Error("split.folds", "fold_count must be at least 2");

    std::set<std::string> group_set;
    for (const auto& rec : manifest.records) {
        if (rec.split != Split::test) group_set.insert(rec.group_key);
    }
    if (group_set.size() < static_cast<std::size_t>(k)) {
        throw Error("split.groups", "too few groups: " + std::to_string(group_set.size()) +
                                        " distinct group keys for " + std::to_string(k) + " folds");
    }

    std::vector<std::string> groups(group_set.begin(), group_set.end());
    Rng rng(mix_seed(manifest.seed, 0xF01D));
    rng.shuffle(groups);
    std::map<std::string, int> fold_of;
    for (std::size_t i = 0; i < groups.size(); ++i) fold_of[groups[i]] = static_cast<int>(i % k);

    std::vector<FoldAssignment> folds(k);
    for (std::size_t r = 0; r < manifest.records.size(); ++r) {
        const auto& rec = manifest.records[r];
        if (rec.split == Split::test) continue;
        const int f = fold_of.at(rec.group_key);
        for (int i = 0; i < k; ++i) {
            (i == f ? folds[i].validation : folds[i].train).push_back(r);
        }
    }
    return folds;
}

}  // namespace lungbench::dataset
