#pragma once

#include "pmog/benchstats.hpp"
#include "pmog/common.hpp"
#include "pmog/flow.hpp"
#include "pmog/geometry.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace pmog::io {

// All numeric output is written at 17 significant digits so every 64-bit
// value round-trips exactly and reruns produce byte-identical files.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) throw DomainError("format_double: non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string escape_json(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DomainError("cannot write file: " + path);
  out << content;
  if (!out) throw DomainError("write failed: " + path);
}

inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DomainError("invalid JSON in " + what);
  return j;
}

// --------------------------------------------------------------------------
// Embedding schema: {"dim": int, "vectors": [[number, ...], ...]} plus
// optional per-file keys. Readers ignore keys they do not know, so centers
// and samples files double as plain embedding files.
// --------------------------------------------------------------------------

inline std::string vector_json(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (i) out += ", ";
    out += format_double(row[i]);
  }
  out += "]";
  return out;
}

inline std::string vectors_json(const Matrix& m, const std::string& indent) {
  std::string out = "[\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out += indent + "  " + vector_json(m.row(r));
    out += (r + 1 < m.rows()) ? ",\n" : "\n";
  }
  out += indent + "]";
  return out;
}

inline void write_embedding_file(const std::string& path, const Matrix& vectors) {
  std::string out = "{\n";
  out += "  \"dim\": " + std::to_string(vectors.cols()) + ",\n";
  out += "  \"vectors\": " + vectors_json(vectors, "  ") + "\n";
  out += "}\n";
  write_file(path, out);
}

inline Matrix parse_vectors(const nlohmann::json& j, const std::string& what) {
  if (!j.contains("dim") || !j.contains("vectors"))
    throw DomainError(what + ": expected keys \"dim\" and \"vectors\"");
  const auto dim = j.at("dim").get<Eigen::Index>();
  const auto& rows = j.at("vectors");
  if (dim < 1 || !rows.is_array() || rows.empty())
    throw DomainError(what + ": need a positive dim and at least one vector");
  Matrix m(static_cast<Eigen::Index>(rows.size()), dim);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim)
      throw DomainError(what + ": vector " + std::to_string(r) +
                        " does not have dim entries");
    for (Eigen::Index c = 0; c < dim; ++c)
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  if (!m.allFinite()) throw DomainError(what + ": non-finite entries");
  return m;
}

inline Matrix read_embedding_file(const std::string& path) {
  return parse_vectors(parse_json(read_file(path), path), path);
}

// --------------------------------------------------------------------------
// Center sets and mixture samples
// --------------------------------------------------------------------------

inline void write_centers_file(const std::string& path, const CenterSet& set,
                               std::uint64_t seed) {
  std::string out = "{\n";
  out += "  \"dim\": " + std::to_string(set.centers.cols()) + ",\n";
  out += "  \"n\": " + std::to_string(set.centers.rows()) + ",\n";
  out += "  \"gamma_euc\": " + format_double(set.gamma_euc) + ",\n";
  out += "  \"seed\": " + std::to_string(seed) + ",\n";
  out += "  \"base\": " + vector_json(set.base.transpose()) + ",\n";
  out += "  \"vectors\": " + vectors_json(set.centers, "  ") + "\n";
  out += "}\n";
  write_file(path, out);
}

inline CenterSet read_centers_file(const std::string& path) {
  nlohmann::json j = parse_json(read_file(path), path);
  CenterSet set;
  set.centers = parse_vectors(j, path);
  if (!j.contains("base") || !j.contains("gamma_euc"))
    throw DomainError(path + ": not a centers file (missing base/gamma_euc)");
  const auto& base = j.at("base");
  set.base.resize(static_cast<Eigen::Index>(base.size()));
  for (Eigen::Index i = 0; i < set.base.size(); ++i)
    set.base[i] = base[static_cast<std::size_t>(i)].get<double>();
  set.gamma_euc = j.at("gamma_euc").get<double>();
  if (set.base.size() != set.centers.cols())
    throw DimensionError(path + ": base dimension disagrees with centers");
  return set;
}

struct SamplesFile {
  Matrix samples;
  std::vector<int> components;
  int component_count = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

inline void write_samples_file(const std::string& path, const SamplesFile& file) {
  std::string out = "{\n";
  out += "  \"dim\": " + std::to_string(file.samples.cols()) + ",\n";
  out += "  \"n\": " + std::to_string(file.component_count) + ",\n";
  out += "  \"sigma\": " + format_double(file.sigma) + ",\n";
  out += "  \"seed\": " + std::to_string(file.seed) + ",\n";
  out += "  \"components\": [";
  for (std::size_t i = 0; i < file.components.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(file.components[i]);
  }
  out += "],\n";
  out += "  \"vectors\": " + vectors_json(file.samples, "  ") + "\n";
  out += "}\n";
  write_file(path, out);
}

inline SamplesFile read_samples_file(const std::string& path) {
  nlohmann::json j = parse_json(read_file(path), path);
  SamplesFile file;
  file.samples = parse_vectors(j, path);
  if (!j.contains("components") || !j.contains("n"))
    throw DomainError(path + ": not a samples file (missing components/n)");
  file.component_count = j.at("n").get<int>();
  file.sigma = j.value("sigma", 0.0);
  file.seed = j.value("seed", std::uint64_t{0});
  for (const auto& c : j.at("components")) file.components.push_back(c.get<int>());
  if (static_cast<Eigen::Index>(file.components.size()) != file.samples.rows())
    throw DomainError(path + ": component list length disagrees with samples");
  return file;
}

// --------------------------------------------------------------------------
// Flow model checkpoints: layer shapes plus flattened weights, every value a
// 17-digit decimal string for exact round-trips.
// --------------------------------------------------------------------------

inline void save_flow_model(const std::string& path, const FlowModel& model,
                            const ToyDatasetSpec& spec) {
  std::string out = "{\n";
  out += "  \"dataset\": {\"cluster_count\": " + std::to_string(spec.cluster_count) +
         ", \"radius\": " + format_double(spec.radius) +
         ", \"cluster_std\": " + format_double(spec.cluster_std) +
         ", \"cond_dim\": " + std::to_string(spec.cond_dim) +
         ", \"seed\": " + std::to_string(spec.seed) + "},\n";
  out += "  \"cond_dim\": " + std::to_string(model.cond_dim) + ",\n";
  out += "  \"training_steps\": " + std::to_string(model.training_steps) + ",\n";
  out += "  \"final_loss\": \"" + format_double(model.final_loss) + "\",\n";
  out += "  \"heldout_loss_initial\": \"" + format_double(model.heldout_loss_initial) + "\",\n";
  out += "  \"heldout_loss_final\": \"" + format_double(model.heldout_loss_final) + "\",\n";
  out += "  \"layers\": [\n";
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    out += "    {\"out\": " + std::to_string(layer.w.rows()) +
           ", \"in\": " + std::to_string(layer.w.cols()) + ",\n";
    out += "     \"w\": [";
    for (Eigen::Index i = 0; i < layer.w.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.w.cols(); ++j) {
        if (i || j) out += ", ";
        out += "\"" + format_double(layer.w(i, j)) + "\"";
      }
    out += "],\n     \"b\": [";
    for (Eigen::Index i = 0; i < layer.b.size(); ++i) {
      if (i) out += ", ";
      out += "\"" + format_double(layer.b[i]) + "\"";
    }
    out += "]}";
    out += (l + 1 < model.layers.size()) ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  write_file(path, out);
}

inline std::pair<FlowModel, ToyDatasetSpec> load_flow_model(const std::string& path) {
  nlohmann::json j = parse_json(read_file(path), path);
  FlowModel model;
  ToyDatasetSpec spec;
  try {
    const auto& ds = j.at("dataset");
    spec.cluster_count = ds.at("cluster_count").get<int>();
    spec.radius = ds.at("radius").get<double>();
    spec.cluster_std = ds.at("cluster_std").get<double>();
    spec.cond_dim = ds.at("cond_dim").get<int>();
    spec.seed = ds.at("seed").get<std::uint64_t>();
    model.cond_dim = j.at("cond_dim").get<int>();
    model.training_steps = j.at("training_steps").get<long>();
    model.final_loss = std::stod(j.at("final_loss").get<std::string>());
    model.heldout_loss_initial = std::stod(j.at("heldout_loss_initial").get<std::string>());
    model.heldout_loss_final = std::stod(j.at("heldout_loss_final").get<std::string>());
    for (const auto& jl : j.at("layers")) {
      DenseLayer layer;
      const auto rows = jl.at("out").get<Eigen::Index>();
      const auto cols = jl.at("in").get<Eigen::Index>();
      const auto& w = jl.at("w");
      const auto& b = jl.at("b");
      if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
          static_cast<Eigen::Index>(b.size()) != rows)
        throw DomainError(path + ": layer shape disagrees with weight count");
      layer.w.resize(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index c = 0; c < cols; ++c)
          layer.w(i, c) = std::stod(w[static_cast<std::size_t>(i * cols + c)].get<std::string>());
      layer.b.resize(rows);
      for (Eigen::Index i = 0; i < rows; ++i)
        layer.b[i] = std::stod(b[static_cast<std::size_t>(i)].get<std::string>());
      model.layers.push_back(std::move(layer));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(path + ": malformed model checkpoint (" + e.what() + ")");
  }
  if (model.layers.empty()) throw DomainError(path + ": checkpoint has no layers");
  return {std::move(model), spec};
}

// --------------------------------------------------------------------------
// CSV: cells are written verbatim, so reading a file and writing its rows
// back reproduces it byte for byte.
// --------------------------------------------------------------------------

inline void write_csv(const std::string& path,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += row[i];
    }
    out += "\n";
  }
  write_file(path, out);
}

inline std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    if (line.empty() || line.back() == ',') row.push_back("");
    rows.push_back(std::move(row));
  }
  return rows;
}

// --------------------------------------------------------------------------
// Prompt records (JSON lines)
// --------------------------------------------------------------------------

inline EmbeddingVector parse_embedding(const nlohmann::json& arr, const std::string& what) {
  if (!arr.is_array() || arr.empty())
    throw DomainError(what + ": embedding must be a nonempty array");
  EmbeddingVector v(static_cast<Eigen::Index>(arr.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = arr[static_cast<std::size_t>(i)].get<double>();
  return v;
}

inline std::vector<PromptRecord> read_prompt_records(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<PromptRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string what = path + ":" + std::to_string(line_no);
    nlohmann::json j = parse_json(line, what);
    PromptRecord rec;
    try {
      rec.id = j.at("id").get<std::string>();
      rec.semantic_emb = parse_embedding(j.at("semantic_emb"), what);
      rec.spatial_emb = parse_embedding(j.at("spatial_emb"), what);
      rec.stylistic_emb = parse_embedding(j.at("stylistic_emb"), what);
      rec.spa_count = j.at("spa_count").get<long>();
      rec.sty_count = j.at("sty_count").get<long>();
      rec.token_count = j.at("token_count").get<long>();
    } catch (const nlohmann::json::exception& e) {
      throw DomainError(what + ": malformed prompt record (" + e.what() + ")");
    }
    validate(rec);
    records.push_back(std::move(rec));
  }
  return records;
}

inline void write_id_list(const std::string& path, const std::vector<std::string>& ids) {
  std::string out = "[";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + escape_json(ids[i]) + "\"";
  }
  out += "]\n";
  write_file(path, out);
}

}  // namespace pmog::io
