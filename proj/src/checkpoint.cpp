#include "sceptre/checkpoint.hpp"

#include <zlib.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "sceptre/errors.hpp"

namespace sceptre {

namespace {

constexpr std::string_view kMagic = "SCEPTRE-CHECKPOINT";

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

void check_field(const std::string& s, std::string_view what) {
  if (s.empty() || s.find_first_of("\t\n\r ") != std::string::npos)
    throw Error(std::string(what) + " '" + s + "' cannot be stored: empty or contains whitespace");
}

std::uint32_t crc_of(std::string_view body) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < body.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(body.size() - off, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(body.data() + off), n);
    off += n;
  }
  return static_cast<std::uint32_t>(crc);
}

class Reader {
 public:
  explicit Reader(std::string body) : in_(std::move(body)) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw ChecksumError("checkpoint body ends early");
    return w;
  }
  void expect(std::string_view keyword) {
    if (word() != keyword) throw ChecksumError("checkpoint body malformed near '" + std::string(keyword) + "'");
  }
  std::uint64_t count() {
    const auto w = word();
    char* end = nullptr;
    const auto v = std::strtoull(w.c_str(), &end, 10);
    if (end != w.c_str() + w.size()) throw ChecksumError("checkpoint body has a bad integer: " + w);
    return v;
  }
  double real() {
    const auto w = word();
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (end != w.c_str() + w.size()) throw ChecksumError("checkpoint body has a bad number: " + w);
    return v;
  }

 private:
  std::istringstream in_;
};

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& c) {
  const auto& p = c.params;
  if (c.product_ids.size() != p.num_products()) throw Error("checkpoint product ids do not match the model");
  if (c.node_ids.size() != c.allocation.num_nodes()) throw Error("checkpoint node ids do not match the allocation");
  if (c.vocabulary.size() != p.vocab_size()) throw Error("checkpoint vocabulary does not match the model");
  if (c.allocation.num_topics() != p.num_topics()) throw Error("checkpoint allocation does not match the model");

  std::ostringstream body;
  body << "topics " << p.num_topics() << '\n';
  body << "smoothing " << hexfloat(c.smoothing) << '\n';
  body << "graphs " << p.num_graphs();
  for (auto g : p.graphs()) body << ' ' << graph_name(g);
  body << '\n';
  body << "nodes " << c.node_ids.size() << '\n';
  for (std::size_t n = 0; n < c.node_ids.size(); ++n) {
    check_field(c.node_ids[n], "node id");
    body << c.node_ids[n] << ' ' << c.allocation.topic_count(static_cast<NodeIndex>(n)) << '\n';
  }
  body << "vocabulary " << c.vocabulary.size() << '\n';
  for (const auto& e : c.vocabulary.entries()) {
    check_field(e.token, "token");
    body << e.token << ' ' << e.frequency << ' ' << e.document_frequency << '\n';
  }
  body << "products " << p.num_products() << '\n';
  for (std::size_t i = 0; i < p.num_products(); ++i) {
    check_field(c.product_ids[i], "product id");
    const auto active = p.active(static_cast<ProductIndex>(i));
    body << c.product_ids[i] << ' ' << active.size();
    for (auto k : active) body << ' ' << k;
    body << '\n';
  }
  body << "values " << p.size() << '\n';
  for (double v : p.values()) body << hexfloat(v) << '\n';
  body << "end\n";

  const auto text = body.str();
  char crc[16];
  std::snprintf(crc, sizeof crc, "%08x", crc_of(text));
  out << kMagic << '\t' << kCheckpointVersion << '\n' << "crc32\t" << crc << '\t' << text.size() << '\n' << text;
  if (!out) throw Error("failed to write checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ChecksumError("checkpoint is empty");
  const auto tab = header.find('\t');
  if (tab == std::string::npos || header.substr(0, tab) != kMagic) throw Error("not a checkpoint file");
  char* end = nullptr;
  const long version = std::strtol(header.c_str() + tab + 1, &end, 10);
  if (end == header.c_str() + tab + 1 || *end != '\0') throw Error("checkpoint version unreadable");
  if (version > kCheckpointVersion)
    throw VersionError("checkpoint version " + std::to_string(version) + " is newer than supported version " +
                       std::to_string(kCheckpointVersion));
  if (version < 1) throw VersionError("checkpoint version " + std::to_string(version) + " is not supported");

  std::string crc_line;
  if (!std::getline(in, crc_line)) throw ChecksumError("checkpoint truncated before checksum");
  std::istringstream crc_in(crc_line);
  std::string label, crc_hex;
  std::size_t length = 0;
  if (!(crc_in >> label >> crc_hex >> length) || label != "crc32") throw ChecksumError("checksum line malformed");
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (body.size() != length)
    throw ChecksumError("checkpoint body has " + std::to_string(body.size()) + " bytes, expected " +
                        std::to_string(length));
  char actual[16];
  std::snprintf(actual, sizeof actual, "%08x", crc_of(body));
  if (crc_hex != actual) throw ChecksumError("checkpoint checksum mismatch");

  Reader r(std::move(body));
  Checkpoint c;
  r.expect("topics");
  const auto K = r.count();
  r.expect("smoothing");
  c.smoothing = r.real();
  r.expect("graphs");
  std::vector<GraphType> graphs(r.count());
  for (auto& g : graphs) {
    const auto name = r.word();
    const auto parsed = parse_graph_type(name);
    if (!parsed) throw ChecksumError("unknown graph type in checkpoint: " + name);
    g = *parsed;
  }
  r.expect("nodes");
  std::vector<std::size_t> counts(r.count());
  c.node_ids.resize(counts.size());
  for (std::size_t n = 0; n < counts.size(); ++n) {
    c.node_ids[n] = r.word();
    counts[n] = r.count();
  }
  c.allocation = TopicAllocation(std::move(counts));
  if (c.allocation.num_topics() != K) throw ChecksumError("allocation does not cover the topics");
  r.expect("vocabulary");
  std::vector<Vocabulary::Entry> entries(r.count());
  for (auto& e : entries) {
    e.token = r.word();
    e.frequency = r.count();
    e.document_frequency = r.count();
  }
  c.vocabulary = Vocabulary(std::move(entries));
  r.expect("products");
  std::vector<std::vector<TopicIndex>> sets(r.count());
  c.product_ids.resize(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    c.product_ids[i] = r.word();
    sets[i].resize(r.count());
    for (auto& k : sets[i]) {
      k = static_cast<TopicIndex>(r.count());
      if (k >= K) throw ChecksumError("active topic out of range in checkpoint");
    }
  }
  c.params = ModelParams(std::move(sets), K, c.vocabulary.size(), std::move(graphs));
  r.expect("values");
  if (r.count() != c.params.size()) throw ChecksumError("parameter count does not match the layout");
  for (auto& v : c.params.values()) v = r.real();
  r.expect("end");
  return c;
}

void save_model(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp);
    write_checkpoint(out, checkpoint);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace sceptre
