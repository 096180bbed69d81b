#include "elr/dataio.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dataio_detail.hpp"
#include "elr/error.hpp"

namespace elr {

using detail::parse_number;
using detail::split_fields;
using detail::trim_cr;
using json = nlohmann::json;

SparseMatrix load_graph(const fs::path& path, std::size_t n) {
  auto in = detail::open_input(path);
  const std::string file = path.string();
  std::vector<Edge> edges;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_fields(line, '\t');
    if (fields.size() < 2 || fields.size() > 3)
      throw FormatError(file, line_no, "expected src<TAB>dst[<TAB>weight]");
    const auto src = parse_number<std::uint64_t>(fields[0]);
    const auto dst = parse_number<std::uint64_t>(fields[1]);
    if (!src || !dst) throw FormatError(file, line_no, "node ids must be non-negative integers");
    if (*src >= n || *dst >= n)
      throw FormatError(file, line_no,
                        "node id " + std::to_string(std::max(*src, *dst)) + " >= n = " +
                            std::to_string(n));
    double w = 1.0;
    if (fields.size() == 3) {
      const auto parsed = parse_number<double>(fields[2]);
      if (!parsed || !std::isfinite(*parsed))
        throw FormatError(file, line_no, "weight is not a finite number");
      w = *parsed;
    }
    edges.push_back({static_cast<std::uint32_t>(*src), static_cast<std::uint32_t>(*dst), w});
  }
  return build_symmetric(n, edges);
}

void save_graph(const fs::path& path, const SparseMatrix& a) {
  auto out = detail::open_output(path);
  for (const Edge& e : upper_edges(a)) {
    out << e.src << '\t' << e.dst;
    if (e.weight != 1.0) out << '\t' << detail::format_double(e.weight);
    out << '\n';
  }
  if (!out) throw FormatError(path.string(), 0, "write failed");
}

DenseMatrix load_features(const fs::path& path, std::size_t n) {
  auto in = detail::open_input(path);
  const std::string file = path.string();
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim_cr(raw);
    if (line.empty()) continue;
    const auto fields = split_fields(line, ',');
    if (rows == 0) cols = fields.size();
    if (fields.size() != cols)
      throw FormatError(file, line_no,
                        "expected " + std::to_string(cols) + " columns, found " +
                            std::to_string(fields.size()));
    for (auto f : fields) {
      const auto v = parse_number<double>(f);
      if (!v || !std::isfinite(*v))
        throw FormatError(file, line_no, "value '" + std::string(f) + "' is not a finite number");
      values.push_back(*v);
    }
    ++rows;
  }
  if (rows != n)
    throw FormatError(file, 0,
                      "expected " + std::to_string(n) + " rows, found " + std::to_string(rows));
  return DenseMatrix(rows, cols, std::move(values));
}

void save_features(const fs::path& path, const DenseMatrix& x) {
  auto out = detail::open_output(path);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = x.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << detail::format_double(row[j]);
    }
    out << '\n';
  }
  if (!out) throw FormatError(path.string(), 0, "write failed");
}

std::vector<Label> load_labels(const fs::path& path, std::size_t n) {
  auto in = detail::open_input(path);
  const std::string file = path.string();
  std::vector<Label> labels(n, kUnlabeled);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_fields(line, '\t');
    if (fields.size() != 2) throw FormatError(file, line_no, "expected node<TAB>label");
    const auto node = parse_number<std::uint64_t>(fields[0]);
    const auto label = parse_number<Label>(fields[1]);
    if (!node || !label || *label < 0)
      throw FormatError(file, line_no, "node and label must be non-negative integers");
    if (*node >= n)
      throw FormatError(file, line_no, "node id " + std::to_string(*node) + " >= n");
    if (labels[*node] != kUnlabeled)
      throw FormatError(file, line_no, "node " + std::to_string(*node) + " labeled twice");
    labels[*node] = *label;
  }
  return labels;
}

void save_labels(const fs::path& path, std::span<const Label> labels) {
  auto out = detail::open_output(path);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] != kUnlabeled) out << i << '\t' << labels[i] << '\n';
  if (!out) throw FormatError(path.string(), 0, "write failed");
}

NodeSplit load_split(const fs::path& path, std::size_t n) {
  auto in = detail::open_input(path);
  const std::string file = path.string();
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(file, 0, std::string("invalid JSON: ") + e.what());
  }
  NodeSplit split;
  auto read_part = [&](const char* name, std::vector<NodeId>& dst) {
    if (!doc.is_object() || !doc.contains(name) || !doc[name].is_array())
      throw FormatError(file, 0, std::string("missing array '") + name + "'");
    for (const auto& v : doc[name]) {
      if (!v.is_number_unsigned()) throw FormatError(file, 0, std::string(name) + ": bad node id");
      dst.push_back(v.get<NodeId>());
    }
  };
  read_part("train", split.train);
  read_part("val", split.val);
  read_part("test", split.test);
  try {
    split.validate(n);
  } catch (const Error& e) {
    throw FormatError(file, 0, e.what());
  }
  return split;
}

void save_split(const fs::path& path, const NodeSplit& split) {
  auto out = detail::open_output(path);
  json doc = {{"train", split.train}, {"val", split.val}, {"test", split.test}};
  out << doc.dump() << '\n';
  if (!out) throw FormatError(path.string(), 0, "write failed");
}

std::string sha256_file(const fs::path& path) {
  auto in = detail::open_input(path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256: digest initialization failed");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

DatasetManifest load_manifest(const fs::path& path) {
  auto in = detail::open_input(path);
  const std::string file = path.string();
  DatasetManifest m;
  try {
    const json doc = json::parse(in);
    m.name = doc.at("name").get<std::string>();
    m.n_nodes = doc.at("n_nodes").get<std::size_t>();
    m.n_features = doc.at("n_features").get<std::size_t>();
    m.n_classes = doc.at("n_classes").get<std::size_t>();
    m.edges = doc.at("edges").get<std::string>();
    m.features = doc.value("features", std::string());
    m.labels = doc.at("labels").get<std::string>();
    m.split = doc.at("split").get<std::string>();
    m.checksums = doc.value("checksums", std::map<std::string, std::string>());
  } catch (const json::exception& e) {
    throw FormatError(file, 0, std::string("bad manifest: ") + e.what());
  }
  if (m.n_features > 0 && m.features.empty())
    throw FormatError(file, 0, "n_features > 0 requires a features file");
  return m;
}

void save_manifest(const fs::path& path, const DatasetManifest& m) {
  json doc = {{"name", m.name},         {"n_nodes", m.n_nodes}, {"n_features", m.n_features},
              {"n_classes", m.n_classes}, {"edges", m.edges},   {"labels", m.labels},
              {"split", m.split},       {"checksums", m.checksums}};
  if (!m.features.empty()) doc["features"] = m.features;
  auto out = detail::open_output(path);
  out << doc.dump(2) << '\n';
  if (!out) throw FormatError(path.string(), 0, "write failed");
}

Dataset load_dataset(const fs::path& manifest_path) {
  Dataset ds;
  ds.manifest = load_manifest(manifest_path);
  ds.root = manifest_path.parent_path();
  const auto& m = ds.manifest;

  auto resolve = [&](const std::string& rel) {
    const fs::path p = ds.root / rel;
    if (!fs::exists(p)) throw FormatError(p.string(), 0, "referenced file does not exist");
    const auto it = m.checksums.find(rel);
    if (it != m.checksums.end() && sha256_file(p) != it->second)
      throw FormatError(p.string(), 0, "checksum mismatch");
    return p;
  };

  ds.graph.adjacency = load_graph(resolve(m.edges), m.n_nodes);
  if (m.n_features == 0) {
    ds.graph.features = DenseMatrix::identity(m.n_nodes);
    ds.graph.identity_features = true;
  } else {
    ds.graph.features = load_features(resolve(m.features), m.n_nodes);
    if (ds.graph.features.cols() != m.n_features)
      throw FormatError((ds.root / m.features).string(), 0,
                        "expected " + std::to_string(m.n_features) + " feature columns, found " +
                            std::to_string(ds.graph.features.cols()));
  }
  const fs::path labels_path = resolve(m.labels);
  ds.graph.labels = load_labels(labels_path, m.n_nodes);
  ds.graph.n_classes = m.n_classes;
  for (Label y : ds.graph.labels)
    if (y != kUnlabeled && static_cast<std::size_t>(y) >= m.n_classes)
      throw FormatError(labels_path.string(), 0,
                        "label " + std::to_string(y) + " outside [0, n_classes)");
  ds.split = load_split(resolve(m.split), m.n_nodes);
  return ds;
}

fs::path write_dataset(const fs::path& dir, const std::string& name, const SparseGraph& graph,
                       const NodeSplit& split) {
  fs::create_directories(dir);
  DatasetManifest m;
  m.name = name;
  m.n_nodes = graph.n_nodes();
  m.n_classes = graph.n_classes;
  m.edges = "edges.tsv";
  m.labels = "labels.tsv";
  m.split = "split.json";
  save_graph(dir / m.edges, graph.adjacency);
  save_labels(dir / m.labels, graph.labels);
  save_split(dir / m.split, split);
  if (!graph.identity_features) {
    m.n_features = graph.n_features();
    m.features = "features.csv";
    save_features(dir / m.features, graph.features);
  }
  for (const std::string* rel : {&m.edges, &m.features, &m.labels, &m.split})
    if (!rel->empty()) m.checksums[*rel] = sha256_file(dir / *rel);
  const fs::path manifest = dir / "manifest.json";
  save_manifest(manifest, m);
  return manifest;
}

}  // namespace elr
