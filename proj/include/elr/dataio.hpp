#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "elr/graph.hpp"
#include "elr/matrix.hpp"

namespace elr {

namespace fs = std::filesystem;

// Every loader rejects malformed input with FormatError (file and line)
// rather than repairing it.

// One undirected edge per line, "src<TAB>dst[<TAB>weight]"; '#' starts a
// comment line; blank lines are skipped; weight defaults to 1.0.
SparseMatrix load_graph(const fs::path& path, std::size_t n);
// Canonical form: i < j ascending, weight column only when != 1.
void save_graph(const fs::path& path, const SparseMatrix& a);

// n rows of comma-separated reals.
DenseMatrix load_features(const fs::path& path, std::size_t n);
void save_features(const fs::path& path, const DenseMatrix& x);

// "node<TAB>label" lines; nodes without a line are kUnlabeled.
std::vector<Label> load_labels(const fs::path& path, std::size_t n);
void save_labels(const fs::path& path, std::span<const Label> labels);

// {"train": [...], "val": [...], "test": [...]}, validated against n.
NodeSplit load_split(const fs::path& path, std::size_t n);
void save_split(const fs::path& path, const NodeSplit& split);

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

// Paths are relative to the manifest's directory. n_features == 0 selects
// identity features and leaves `features` empty.
struct DatasetManifest {
  std::string name;
  std::size_t n_nodes = 0;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::string edges;
  std::string features;
  std::string labels;
  std::string split;
  std::map<std::string, std::string> checksums;  // relative path -> sha256
};

DatasetManifest load_manifest(const fs::path& path);
void save_manifest(const fs::path& path, const DatasetManifest& m);

struct Dataset {
  DatasetManifest manifest;
  fs::path root;
  SparseGraph graph;
  NodeSplit split;
};

// Loads every referenced file after checking its checksum, and the graph
// against the manifest's counts.
Dataset load_dataset(const fs::path& manifest_path);

// Writes edges.tsv, features.csv (unless identity), labels.tsv, split.json
// and manifest.json into `dir`; returns the manifest path.
fs::path write_dataset(const fs::path& dir, const std::string& name, const SparseGraph& graph,
                       const NodeSplit& split);

}  // namespace elr
