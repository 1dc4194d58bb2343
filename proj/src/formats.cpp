#include "ploewner/formats.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace ploewner::formats {

namespace {

using nlohmann::json;

std::uint64_t to_le(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t out = 0;
        for (int b = 0; b < 8; ++b) out |= ((v >> (8 * b)) & 0xFFu) << (8 * (7 - b));
        return out;
    }
    return v;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

template <typename T>
T get_field(const json& j, const char* key, const fs::path& src) {
    if (!j.contains(key)) throw FormatError(src.string() + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(src.string() + ": field '" + key + "' has wrong type: " + e.what());
    }
}

MatR read_entry(const json& entry, const fs::path& base, Eigen::Index rows, Eigen::Index cols,
                const std::string& what) {
    MatR M;
    if (entry.is_string()) {
        const fs::path p = base / entry.get<std::string>();
        if (p.extension() == ".bin") return read_matrix_bin(p, rows, cols);
        M = read_matrix_csv(p);
    } else if (entry.is_array()) {
        const auto r = static_cast<Eigen::Index>(entry.size());
        const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(entry.front().size()) : 0;
        M.resize(r, c);
        for (Eigen::Index i = 0; i < r; ++i) {
            const json& row = entry[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
                throw FormatError(what + ": ragged inline matrix");
            }
            for (Eigen::Index k = 0; k < c; ++k) M(i, k) = row[static_cast<std::size_t>(k)].get<double>();
        }
    } else {
        throw FormatError(what + ": expected a file name or inline rows");
    }
    if (M.rows() != rows || M.cols() != cols) {
        throw FormatError(what + " is " + std::to_string(M.rows()) + "x" + std::to_string(M.cols()) +
                          ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    return M;
}

const char* const kRealizationFiles[] = {"E", "A", "B", "C", "X", "Y"};

} // namespace

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_matrix_bin(const fs::path& path, const MatR& M) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    std::vector<std::uint64_t> raw(static_cast<std::size_t>(M.size()));
    for (Eigen::Index k = 0; k < M.size(); ++k) raw[static_cast<std::size_t>(k)] = to_le(std::bit_cast<std::uint64_t>(M.data()[k]));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
    if (!out) throw FormatError("short write to " + path.string());
}

MatR read_matrix_bin(const fs::path& path, Eigen::Index rows, Eigen::Index cols) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw FormatError("cannot open " + path.string());
    const auto bytes = static_cast<std::uint64_t>(in.tellg());
    const auto expected = static_cast<std::uint64_t>(rows * cols) * 8u;
    if (bytes != expected) {
        throw FormatError(path.string() + ": holds " + std::to_string(bytes) + " bytes, expected " +
                          std::to_string(expected) + " for a " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " float64 matrix");
    }
    in.seekg(0);
    std::vector<std::uint64_t> raw(static_cast<std::size_t>(rows * cols));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(expected));
    MatR M(rows, cols);
    for (Eigen::Index k = 0; k < M.size(); ++k) M.data()[k] = std::bit_cast<double>(to_le(raw[static_cast<std::size_t>(k)]));
    return M;
}

MatR parse_matrix_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw FormatError("CSV: cannot parse '" + cell + "' as a number");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) throw FormatError("CSV: ragged rows");
        rows.push_back(std::move(row));
    }
    const auto r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(rows.front().size()) : 0;
    MatR M(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index k = 0; k < c; ++k) M(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    return M;
}

MatR read_matrix_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_matrix_csv(ss.str());
}

void write_matrix_csv(const fs::path& path, const MatR& M) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index k = 0; k < M.cols(); ++k) out << (k ? "," : "") << fmt17(M(i, k));
        out << '\n';
    }
}

ModelSource load_model_manifest(const fs::path& path) {
    const json j = read_json(path);
    const fs::path base = path.parent_path();
    const SystemDims dims{get_field<Eigen::Index>(j, "n", path), get_field<Eigen::Index>(j, "n_i", path),
                          get_field<Eigen::Index>(j, "n_o", path)};
    if (dims.n < 0 || dims.n_i < 1 || dims.n_o < 1) throw FormatError(path.string() + ": invalid dimensions");
    ModelSource src;
    try {
        if (j.contains("gamma")) {
            const json& gs = j.at("gamma");
            if (!gs.is_array() || gs.empty()) throw FormatError(path.string() + ": 'gamma' must be a nonempty array");
            if (j.contains("degree") && get_field<std::size_t>(j, "degree", path) + 1 != gs.size()) {
                throw FormatError(path.string() + ": 'degree' does not match the number of gamma matrices");
            }
            std::vector<MatR> gamma;
            for (std::size_t k = 0; k < gs.size(); ++k) {
                gamma.push_back(read_entry(gs[k], base, dims.block_rows(), dims.block_cols(),
                                           path.string() + ": gamma[" + std::to_string(k) + "]"));
            }
            src.model.emplace(dims, std::move(gamma));
        } else if (j.contains("snapshots")) {
            std::vector<Snapshot> snaps;
            for (const json& s : j.at("snapshots")) {
                Snapshot snap;
                snap.p = get_field<double>(s, "p", path);
                if (!s.contains("G")) throw FormatError(path.string() + ": snapshot without 'G'");
                snap.G = read_entry(s.at("G"), base, dims.block_rows(), dims.block_cols(),
                                    path.string() + ": snapshot at p = " + fmt17(snap.p));
                snaps.push_back(std::move(snap));
            }
            src.snapshots.emplace(dims, std::move(snaps));
        } else {
            throw FormatError(path.string() + ": manifest needs either 'gamma' or 'snapshots'");
        }
    } catch (const std::invalid_argument& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return src;
}

fs::path save_model_manifest(const fs::path& dir, const ParametricModel& model) {
    fs::create_directories(dir);
    json j;
    j["n"] = model.dims().n;
    j["n_i"] = model.dims().n_i;
    j["n_o"] = model.dims().n_o;
    j["degree"] = model.degree();
    j["storage_order"] = "column-major";
    j["dtype"] = "float64-le";
    json files = json::array();
    for (std::size_t k = 0; k < model.gamma().size(); ++k) {
        const std::string name = "gamma" + std::to_string(k) + ".bin";
        write_matrix_bin(dir / name, model.gamma()[k]);
        files.push_back(name);
    }
    j["gamma"] = files;
    const fs::path manifest = dir / "model.json";
    write_json(manifest, j);
    return manifest;
}

void save_realization(const fs::path& dir, const ParametricRealization& real) {
    fs::create_directories(dir);
    const MatR* mats[] = {&real.E(), &real.A(), &real.B(), &real.C(), &real.X(), &real.Y()};
    json files;
    for (int k = 0; k < 6; ++k) {
        const std::string name = std::string(kRealizationFiles[k]) + ".bin";
        write_matrix_bin(dir / name, *mats[k]);
        files[kRealizationFiles[k]] = name;
    }
    json j;
    j["format"] = "ploewner-realization";
    j["version"] = 1;
    j["r"] = real.r();
    j["n"] = real.dims().n;
    j["n_i"] = real.dims().n_i;
    j["n_o"] = real.dims().n_o;
    j["storage_order"] = "column-major";
    j["dtype"] = "float64-le";
    j["files"] = files;
    write_json(dir / "realization.json", j);
}

ParametricRealization load_realization(const fs::path& dir) {
    const fs::path meta_path = dir / "realization.json";
    const json j = read_json(meta_path);
    if (j.value("format", "") != "ploewner-realization") {
        throw FormatError(meta_path.string() + ": not a realization manifest");
    }
    if (j.value("storage_order", "column-major") != "column-major" || j.value("dtype", "float64-le") != "float64-le") {
        throw FormatError(meta_path.string() + ": unsupported storage order or dtype");
    }
    const auto r = get_field<Eigen::Index>(j, "r", meta_path);
    const SystemDims d{get_field<Eigen::Index>(j, "n", meta_path), get_field<Eigen::Index>(j, "n_i", meta_path),
                       get_field<Eigen::Index>(j, "n_o", meta_path)};
    if (r < 1 || d.n < 0 || d.n_i < 1 || d.n_o < 1) throw FormatError(meta_path.string() + ": invalid dimensions");
    const json files = j.value("files", json::object());
    auto load = [&](const char* key, Eigen::Index rows, Eigen::Index cols) {
        const std::string name = files.value(key, std::string(key) + ".bin");
        return read_matrix_bin(dir / name, rows, cols);
    };
    try {
        return ParametricRealization(d, load("E", r, r), load("A", r, r), load("B", r, d.n_i), load("C", d.n_o, r),
                                     load("X", r, d.n), load("Y", d.n, r));
    } catch (const std::invalid_argument& e) {
        throw FormatError(meta_path.string() + ": " + e.what());
    }
}

void write_error_grid_csv(std::ostream& os, const ErrorGrid& grid) {
    os << "omega,p,delta,formula,cond_estimate\n";
    for (std::size_t i = 0; i < grid.omegas.size(); ++i) {
        for (std::size_t j = 0; j < grid.params.size(); ++j) {
            const ErrorCell& c = grid.at(i, j);
            os << fmt17(grid.omegas[i]) << ',' << fmt17(grid.params[j]) << ',';
            if (c.failed) {
                os << "nan,failed," << fmt17(c.cond_estimate) << '\n';
            } else {
                os << fmt17(c.delta) << ',' << to_string(c.formula) << ',' << fmt17(c.cond_estimate) << '\n';
            }
        }
    }
}

nlohmann::json rank_report_json(const RankReport& rep) {
    json j;
    j["rank_L"] = rep.rank_L;
    j["rank_Ls"] = rep.rank_Ls;
    j["bound_L"] = rep.bound_L;
    j["bound_Ls"] = rep.bound_Ls;
    j["bounds"] = {{"L", rep.bound_L}, {"Ls", rep.bound_Ls}};
    j["per_gamma"] = rep.rank_gamma;
    j["per_xi"] = rep.rank_xi;
    j["holds"] = {rep.holds.first, rep.holds.second};
    if (rep.affine) j["affine_equality"] = rep.affine_equality;
    return j;
}

nlohmann::json partition_json(const Partition& part) {
    json j;
    json left = json::array();
    json right = json::array();
    for (const auto& pt : part.left) left.push_back({{"index", pt.index}, {"value", pt.value}});
    for (const auto& pt : part.right) right.push_back({{"index", pt.index}, {"value", pt.value}});
    j["left"] = left;
    j["right"] = right;
    return j;
}

} // namespace ploewner::formats
