#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cosched/profiles.hpp"

namespace cosched {

// dataset.csv: provenance comments, then one row per sample with the full
// feature vector. Reals use shortest round-trip form, so a written dataset
// reproduces the in-memory samples bit for bit.
struct DatasetFile {
    FeatureSet feature_set;
    std::vector<ColocationSample> samples;
    std::uint64_t profiles_hash = 0;
    std::uint64_t colocations_hash = 0;
    int clamped_rows = 0; // measurements whose raw degradation was negative
};

void write_dataset_csv(const std::string& path, const DatasetFile& dataset);
DatasetFile load_dataset_csv(const std::string& path);

} // namespace cosched
