#include "rau/graph/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <unordered_map>

#include <boost/tokenizer.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "detail/le_io.hpp"
#include "rau/error.hpp"

namespace rau::graph {

namespace fs = std::filesystem;

namespace {

using Row = std::vector<std::string>;

class CsvReader {
 public:
  explicit CsvReader(const fs::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw ValidationError("cannot open " + path.string());
  }

  bool next(Row& row) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      row.clear();
      try {
        boost::tokenizer<boost::escaped_list_separator<char>> tok(line);
        for (const auto& field : tok) row.push_back(field);
      } catch (const boost::escaped_list_error& e) {
        fail(std::string("malformed field: ") + e.what());
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError(fmt::format("{}:{}: {}", path_.filename().string(), line_no_, msg));
  }

  void expect_header(const Row& expected) {
    Row header;
    if (!next(header)) fail("empty file");
    if (header != expected) fail("expected header " + fmt::format("{}", fmt::join(expected, ",")));
  }

 private:
  fs::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

double parse_real(const CsvReader& r, const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) r.fail("not a finite number: '" + s + "'");
  return v;
}

struct NodeTable {
  std::vector<std::string> ids;
  std::unordered_map<std::string, Index> index;

  Index lookup(const CsvReader& r, const std::string& id) const {
    auto it = index.find(id);
    if (it == index.end()) r.fail("unknown node id '" + id + "'");
    return it->second;
  }
};

IncidenceMatrix read_incidence(const fs::path& path, const NodeTable& nodes) {
  CsvReader r(path);
  r.expect_header({"node_id", "entity_id"});
  std::unordered_map<std::string, Index> entities;
  IncidenceMatrix inc;
  inc.n_users = nodes.ids.size();
  Row row;
  while (r.next(row)) {
    if (row.size() != 2) r.fail("expected 2 fields");
    const Index u = nodes.lookup(r, row[0]);
    auto [it, fresh] = entities.try_emplace(row[1], static_cast<Index>(entities.size()));
    inc.entries.emplace_back(u, it->second);
  }
  inc.n_entities = entities.size();
  std::sort(inc.entries.begin(), inc.entries.end());
  const auto before = inc.entries.size();
  inc.entries.erase(std::unique(inc.entries.begin(), inc.entries.end()), inc.entries.end());
  if (inc.entries.size() != before)
    spdlog::debug("{}: dropped {} repeated (node, entity) rows", path.filename().string(), before - inc.entries.size());
  return inc;
}

SparseAdjacency read_edges(const fs::path& path, const NodeTable& nodes) {
  CsvReader r(path);
  r.expect_header({"src", "dst"});
  std::vector<std::pair<Index, Index>> edges;
  Row row;
  while (r.next(row)) {
    if (row.size() != 2) r.fail("expected 2 fields");
    edges.emplace_back(nodes.lookup(r, row[0]), nodes.lookup(r, row[1]));
  }
  return SparseAdjacency::from_edges(nodes.ids.size(), edges);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\\\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

constexpr std::array<char, 4> kGraphMagic = {'R', 'A', 'U', 'G'};
constexpr std::uint32_t kGraphVersion = 1;

void put_string(std::ostream& out, const std::string& s) {
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  std::uint32_t len = 0;
  if (!detail::get_le(in, len)) throw ValidationError("graph.bin: truncated string");
  std::string s(len, '\0');
  if (!in.read(s.data(), len)) throw ValidationError("graph.bin: truncated string");
  return s;
}

template <class U>
U get_checked(std::istream& in) {
  U v{};
  if (!detail::get_le(in, v)) throw ValidationError("graph.bin: truncated file");
  return v;
}

double get_real(std::istream& in) {
  double d = 0.0;
  if (!detail::get_f64(in, d)) throw ValidationError("graph.bin: truncated file");
  return d;
}

}  // namespace

MultiRelationGraph load_dataset_dir(const fs::path& dir, const RelationBuildOptions& options) {
  if (!fs::is_directory(dir)) throw ValidationError(dir.string() + " is not a directory");

  NodeTable nodes;
  std::vector<double> values;
  std::size_t d = 0;
  {
    CsvReader r(dir / "features.csv");
    Row row;
    if (!r.next(row)) r.fail("empty file");
    if (row.size() < 2 || row[0] != "node_id") r.fail("expected header node_id,f0,...");
    d = row.size() - 1;
    for (std::size_t k = 0; k < d; ++k)
      if (row[k + 1] != "f" + std::to_string(k)) r.fail("feature column " + std::to_string(k) + " must be named f" + std::to_string(k));
    while (r.next(row)) {
      if (row.size() != d + 1) r.fail(fmt::format("expected {} fields, got {}", d + 1, row.size()));
      auto [it, fresh] = nodes.index.try_emplace(row[0], static_cast<Index>(nodes.ids.size()));
      if (!fresh) r.fail("duplicate node id '" + row[0] + "'");
      nodes.ids.push_back(row[0]);
      for (std::size_t k = 0; k < d; ++k) values.push_back(parse_real(r, row[k + 1]));
    }
  }
  if (nodes.ids.empty()) throw ValidationError("features.csv: no nodes");
  const std::size_t n = nodes.ids.size();

  std::vector<Label> labels(n, Label::kUnlabeled);
  {
    CsvReader r(dir / "labels.csv");
    r.expect_header({"node_id", "label"});
    Row row;
    while (r.next(row)) {
      if (row.size() == 1) row.emplace_back();
      if (row.size() != 2) r.fail("expected 2 fields");
      const Index v = nodes.lookup(r, row[0]);
      if (row[1] == "1") labels[v] = Label::kAnomalous;
      else if (row[1] == "0") labels[v] = Label::kBenign;
      else if (!row[1].empty()) r.fail("label must be 0, 1 or empty, got '" + row[1] + "'");
    }
  }

  // name -> (path, is_edge_list); std::map keeps relations ordered by name
  std::map<std::string, std::pair<fs::path, bool>> sources;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string file = entry.path().filename().string();
    if (entry.path().extension() != ".csv") continue;
    const std::string stem = entry.path().stem().string();
    bool edges = false;
    std::string name;
    if (stem.starts_with("incidence_")) name = stem.substr(10);
    else if (stem.starts_with("edges_")) name = stem.substr(6), edges = true;
    else continue;
    if (name.empty()) throw ValidationError(file + ": empty relation name");
    if (!sources.emplace(name, std::make_pair(entry.path(), edges)).second)
      throw ValidationError("relation '" + name + "' is given both as incidence and edge list");
  }
  if (sources.empty()) throw ValidationError(dir.string() + ": no incidence_<relation>.csv or edges_<relation>.csv files");

  std::vector<Relation> relations;
  for (const auto& [name, src] : sources) {
    if (src.second) {
      relations.push_back({name, read_edges(src.first, nodes)});
    } else {
      RelationBuildReport report;
      auto adj = build_relation_graph(read_incidence(src.first, nodes), options, &report);
      if (!report.dropped_entities.empty())
        spdlog::warn("relation '{}': skipped {} entities above the degree cap {}", name, report.dropped_entities.size(),
                     options.max_entity_degree);
      relations.push_back({name, std::move(adj)});
    }
  }
  return MultiRelationGraph(Matrix(n, d, std::move(values)), std::move(relations), std::move(labels),
                            std::move(nodes.ids));
}

void write_dataset_dir(const fs::path& dir, const Matrix& features, const std::vector<Label>& labels,
                       const std::vector<std::string>& node_ids, const std::vector<NamedIncidence>& relations) {
  if (node_ids.size() != features.rows() || labels.size() != features.rows())
    throw ValidationError("write_dataset_dir: node count mismatch");
  fs::create_directories(dir);

  auto f = open_out(dir / "features.csv");
  f << "node_id";
  for (std::size_t k = 0; k < features.cols(); ++k) f << ",f" << k;
  f << '\n';
  for (std::size_t i = 0; i < features.rows(); ++i) {
    f << csv_field(node_ids[i]);
    for (double v : features.row(i)) f << fmt::format(",{:.17g}", v);
    f << '\n';
  }

  auto l = open_out(dir / "labels.csv");
  l << "node_id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    l << csv_field(node_ids[i]) << ',';
    if (is_labeled(labels[i])) l << static_cast<int>(labels[i]);
    l << '\n';
  }

  for (const auto& rel : relations) {
    rel.incidence.validate();
    if (rel.incidence.n_users != features.rows()) throw ValidationError("write_dataset_dir: incidence user count mismatch");
    auto out = open_out(dir / ("incidence_" + rel.name + ".csv"));
    out << "node_id,entity_id\n";
    for (auto [u, e] : rel.incidence.entries) {
      const std::string entity = rel.entity_ids.empty() ? "e" + std::to_string(e) : rel.entity_ids.at(e);
      out << csv_field(node_ids[u]) << ',' << csv_field(entity) << '\n';
    }
  }
}

void write_node_index(const fs::path& path, const std::vector<std::string>& node_ids) {
  auto out = open_out(path);
  out << "node_id,index\n";
  for (std::size_t i = 0; i < node_ids.size(); ++i) out << csv_field(node_ids[i]) << ',' << i << '\n';
}

void save_graph_bin(const fs::path& path, const MultiRelationGraph& g) {
  auto out = open_out(path);
  out.write(kGraphMagic.data(), kGraphMagic.size());
  detail::put_le<std::uint32_t>(out, kGraphVersion);
  detail::put_le<std::uint64_t>(out, g.n());
  detail::put_le<std::uint64_t>(out, g.feature_dim());
  for (double v : g.features().values()) detail::put_f64(out, v);
  for (Label l : g.labels()) out.put(static_cast<char>(l));
  detail::put_le<std::uint8_t>(out, g.node_ids().empty() ? 0 : 1);
  for (const auto& id : g.node_ids()) put_string(out, id);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.relation_count()));
  for (const auto& rel : g.relations()) {
    put_string(out, rel.name);
    const CsrMatrix& m = rel.adjacency.matrix();
    detail::put_le<std::uint64_t>(out, m.nnz());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto cols = m.row_cols(r);
      auto vals = m.row_values(r);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(r));
        detail::put_le<std::uint32_t>(out, cols[k]);
        detail::put_f64(out, vals[k]);
      }
    }
  }
  if (!out) throw ValidationError("graph.bin: write failed");
}

MultiRelationGraph load_graph_bin(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kGraphMagic)
    throw ValidationError(path.string() + ": bad magic (expected RAUG)");
  if (get_checked<std::uint32_t>(in) != kGraphVersion) throw ValidationError("graph.bin: unsupported version");
  const auto n = get_checked<std::uint64_t>(in);
  const auto d = get_checked<std::uint64_t>(in);
  if (n > (1ULL << 32) || d > (1ULL << 24)) throw ValidationError("graph.bin: implausible dimensions");
  std::vector<double> values(n * d);
  for (double& v : values) v = get_real(in);
  std::vector<Label> labels(n);
  for (Label& l : labels) {
    const auto raw = static_cast<std::int8_t>(get_checked<std::uint8_t>(in));
    if (raw < -1 || raw > 1) throw ValidationError("graph.bin: bad label");
    l = static_cast<Label>(raw);
  }
  std::vector<std::string> ids;
  if (get_checked<std::uint8_t>(in) != 0) {
    ids.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) ids.push_back(get_string(in));
  }
  const auto r_count = get_checked<std::uint32_t>(in);
  std::vector<Relation> relations;
  for (std::uint32_t r = 0; r < r_count; ++r) {
    std::string name = get_string(in);
    const auto nnz = get_checked<std::uint64_t>(in);
    std::vector<Triplet> t;
    t.reserve(nnz);
    for (std::uint64_t k = 0; k < nnz; ++k) {
      const auto row = get_checked<std::uint32_t>(in);
      const auto col = get_checked<std::uint32_t>(in);
      if (row >= n || col >= n) throw ValidationError("graph.bin: index out of range");
      t.push_back({row, col, get_real(in)});
    }
    relations.push_back({std::move(name), SparseAdjacency(CsrMatrix::from_triplets(n, n, std::move(t)))});
  }
  return MultiRelationGraph(Matrix(n, d, std::move(values)), std::move(relations), std::move(labels), std::move(ids));
}

MultiRelationGraph load_graph(const fs::path& path, const RelationBuildOptions& options) {
  if (fs::is_directory(path)) return load_dataset_dir(path, options);
  return load_graph_bin(path);
}

}  // namespace rau::graph
