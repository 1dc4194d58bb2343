#pragma once

// On-disk formats.
//
//  * Binary matrix (.bin): raw IEEE-754 float64, little-endian, column-major,
//    no header. Shapes come from the accompanying JSON.
//  * CSV matrix (.csv): one matrix row per line, comma-separated.
//  * Model manifest (JSON):
//      {"n": 3, "n_i": 1, "n_o": 1, "degree": 1,
//       "gamma": ["g0.bin", "g1.csv", [[...], ...]]}
//    Each gamma entry is a .bin path, a .csv path (both relative to the
//    manifest), or inline rows. Snapshot-only manifests replace "degree" /
//    "gamma" by "snapshots": [{"p": 0.5, "G": <same entry forms>}, ...].
//  * Realization directory: realization.json
//      {"format": "ploewner-realization", "version": 1, "r", "n", "n_i", "n_o",
//       "storage_order": "column-major", "dtype": "float64-le",
//       "files": {"E": "E.bin", ...}}
//    plus E.bin (r x r), A.bin (r x r), B.bin (r x n_i), C.bin (n_o x r),
//    X.bin (r x n), Y.bin (n x r).
//  * Error grid CSV: header "omega,p,delta,formula,cond_estimate", one row
//    per cell, omega-major, numbers printed with 17 significant digits.
//    Failed cells carry delta "nan" and formula "failed".

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "ploewner/evaluate.hpp"
#include "ploewner/loewner.hpp"
#include "ploewner/models.hpp"
#include "ploewner/rankbounds.hpp"

namespace ploewner::formats {

namespace fs = std::filesystem;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// "%.17g"
std::string fmt17(double v);

void write_matrix_bin(const fs::path& path, const MatR& M);
MatR read_matrix_bin(const fs::path& path, Eigen::Index rows, Eigen::Index cols);

MatR parse_matrix_csv(const std::string& text);
MatR read_matrix_csv(const fs::path& path);
void write_matrix_csv(const fs::path& path, const MatR& M);

/// A model manifest holds either polynomial coefficients or raw snapshots.
struct ModelSource {
    std::optional<ParametricModel> model;
    std::optional<SnapshotSet> snapshots;
};

ModelSource load_model_manifest(const fs::path& path);

/// Writes manifest + one .bin per coefficient into `dir`; returns the manifest path.
fs::path save_model_manifest(const fs::path& dir, const ParametricModel& model);

void save_realization(const fs::path& dir, const ParametricRealization& real);
ParametricRealization load_realization(const fs::path& dir);

void write_error_grid_csv(std::ostream& os, const ErrorGrid& grid);

nlohmann::json rank_report_json(const RankReport& rep);

nlohmann::json partition_json(const Partition& part);

} // namespace ploewner::formats
