#include "selftrain/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace selftrain {
namespace {

constexpr uint32_t kFormatVersion = 1;
constexpr uint32_t kDtypeF32 = 1;
constexpr uint32_t kDtypeU8 = 2;
constexpr uint64_t kMaxElements = 1ULL << 31;

void put_u32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

uint32_t get_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint32_t f32_bits(float f) {
  uint32_t u;
  std::memcpy(&u, &f, 4);
  return u;
}

float bits_f32(uint32_t u) {
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_all(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error("short write to " + path.string());
}

std::string encode_header(const char* magic, uint32_t dtype, uint32_t sem,
                          uint32_t c, uint32_t h, uint32_t w) {
  std::string out;
  out.append(magic, 4);
  put_u32(out, kFormatVersion);
  put_u32(out, dtype);
  put_u32(out, sem);
  put_u32(out, c);
  put_u32(out, h);
  put_u32(out, w);
  return out;
}

MapHeader decode_header(const std::string& bytes,
                        const std::filesystem::path& path) {
  if (bytes.size() < 28)
    throw io_error("truncated header in " + path.string());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  MapHeader h;
  std::memcpy(h.magic, p, 4);
  if (std::memcmp(h.magic, "PMAP", 4) != 0 &&
      std::memcmp(h.magic, "LMAP", 4) != 0)
    throw io_error("bad magic in " + path.string());
  h.version = get_u32(p + 4);
  if (h.version != kFormatVersion)
    throw io_error("unsupported format version " + std::to_string(h.version) +
                   " in " + path.string());
  h.dtype = get_u32(p + 8);
  const uint32_t sem = get_u32(p + 12);
  if (sem > 2) throw io_error("unknown semantics tag in " + path.string());
  h.semantics = static_cast<MapSemantics>(sem);
  h.channels = get_u32(p + 16);
  h.height = get_u32(p + 20);
  h.width = get_u32(p + 24);
  const uint64_t n = static_cast<uint64_t>(h.channels) * h.height * h.width;
  if (h.channels == 0 || h.height == 0 || h.width == 0 || n > kMaxElements)
    throw io_error("dimension overflow in " + path.string());
  return h;
}

void check_payload_size(const MapHeader& h, size_t have, size_t elem_size,
                        const std::filesystem::path& path) {
  const uint64_t want =
      static_cast<uint64_t>(h.channels) * h.height * h.width * elem_size;
  if (have != want + 28)
    throw io_error("truncated file " + path.string() + ": expected " +
                   std::to_string(want + 28) + " bytes, got " +
                   std::to_string(have));
}

}  // namespace

void save_dense_map_unchecked(const Tensor3f& m, MapSemantics sem,
                              const std::filesystem::path& path) {
  std::string bytes =
      encode_header("PMAP", kDtypeF32, static_cast<uint32_t>(sem), m.channels,
                    m.height, m.width);
  bytes.reserve(bytes.size() + m.data.size() * 4);
  for (float f : m.data) put_u32(bytes, f32_bits(f));
  write_all(path, bytes);
}

void save_dense_map(const Tensor3f& m, MapSemantics sem,
                    const std::filesystem::path& path) {
  if (sem == MapSemantics::kProbability) validate_prob_map(m);
  if (sem == MapSemantics::kPrior) {
    for (float v : m.data)
      if (!(v >= 0.0f))
        throw validation_error("prior value negative: " + std::to_string(v));
  }
  if (sem == MapSemantics::kFeature) {
    for (float v : m.data)
      if (!std::isfinite(v))
        throw validation_error("feature value not finite");
  }
  save_dense_map_unchecked(m, sem, path);
}

Tensor3f load_dense_map(const std::filesystem::path& path, MapSemantics* sem) {
  const std::string bytes = read_all(path);
  const MapHeader h = decode_header(bytes, path);
  if (std::memcmp(h.magic, "PMAP", 4) != 0)
    throw io_error("expected PMAP magic in " + path.string());
  if (h.dtype != kDtypeF32)
    throw io_error("expected float32 payload in " + path.string());
  check_payload_size(h, bytes.size(), 4, path);
  Tensor3f m(h.channels, h.height, h.width);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + 28;
  for (size_t i = 0; i < m.data.size(); ++i)
    m.data[i] = bits_f32(get_u32(p + i * 4));
  switch (h.semantics) {
    case MapSemantics::kProbability:
      validate_prob_map(m);
      break;
    case MapSemantics::kPrior:
      for (float v : m.data)
        if (!(v >= 0.0f))
          throw validation_error("prior value negative in " + path.string());
      break;
    case MapSemantics::kFeature:
      for (float v : m.data)
        if (!std::isfinite(v))
          throw validation_error("feature value not finite in " +
                                 path.string());
      break;
  }
  if (sem) *sem = h.semantics;
  return m;
}

void save_prob_map(const ProbMap& m, const std::filesystem::path& path) {
  save_dense_map(m, MapSemantics::kProbability, path);
}

ProbMap load_prob_map(const std::filesystem::path& path) {
  MapSemantics sem;
  Tensor3f m = load_dense_map(path, &sem);
  if (sem != MapSemantics::kProbability)
    throw validation_error("map " + path.string() +
                           " does not carry probability semantics");
  return m;
}

void save_label_map(const LabelMap& m, const std::filesystem::path& path) {
  validate_label_map(m);
  std::string bytes = encode_header("LMAP", kDtypeU8, 0, m.classes, m.height,
                                    m.width);
  bytes.append(reinterpret_cast<const char*>(m.values.data()),
               m.values.size());
  write_all(path, bytes);
}

LabelMap load_label_map(const std::filesystem::path& path) {
  const std::string bytes = read_all(path);
  const MapHeader h = decode_header(bytes, path);
  if (std::memcmp(h.magic, "LMAP", 4) != 0)
    throw io_error("expected LMAP magic in " + path.string());
  if (h.dtype != kDtypeU8)
    throw io_error("expected uint8 payload in " + path.string());
  check_payload_size(h, bytes.size(), 1, path);
  LabelMap m(h.channels, h.height, h.width);
  std::memcpy(m.values.data(), bytes.data() + 28, m.values.size());
  try {
    validate_label_map(m);
  } catch (const validation_error& e) {
    throw validation_error(std::string(e.what()) + " in " + path.string());
  }
  return m;
}

MapHeader read_map_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  std::string head(28, '\0');
  in.read(head.data(), 28);
  if (in.gcount() != 28) throw io_error("truncated header in " + path.string());
  return decode_header(head, path);
}

size_t Manifest::source_count() const {
  return static_cast<size_t>(
      std::count_if(records.begin(), records.end(),
                    [](const ManifestRecord& r) { return r.is_source; }));
}

size_t Manifest::target_count() const { return records.size() - source_count(); }

std::vector<const ManifestRecord*> Manifest::sources() const {
  std::vector<const ManifestRecord*> out;
  for (const auto& r : records)
    if (r.is_source) out.push_back(&r);
  return out;
}

std::vector<const ManifestRecord*> Manifest::targets() const {
  std::vector<const ManifestRecord*> out;
  for (const auto& r : records)
    if (!r.is_source) out.push_back(&r);
  return out;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& field) {
  if (field == "-" || field.empty()) return {};
  std::filesystem::path p(field);
  return p.is_absolute() ? p : base / p;
}

void check_map_file(const std::filesystem::path& p, uint32_t classes,
                    const std::string& id) {
  if (!std::filesystem::exists(p))
    throw validation_error("manifest record " + id + " references missing file " +
                           p.string());
  const MapHeader h = read_map_header(p);
  // Feature maps carry an arbitrary channel count; everything else must
  // agree with the declared class count.
  if (h.semantics != MapSemantics::kFeature && h.channels != classes)
    throw validation_error("manifest record " + id + ": " + p.string() +
                           " has " + std::to_string(h.channels) +
                           " classes, manifest declares " +
                           std::to_string(classes));
}

}  // namespace

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open manifest " + path.string());
  const std::filesystem::path base = path.parent_path();

  Manifest m;
  std::set<std::string> seen;
  std::string line;
  size_t lineno = 0;
  bool have_classes = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (!have_classes) {
      if (fields[0] != "classes" || fields.size() < 2)
        throw validation_error("manifest " + path.string() +
                               ": first record must be a classes declaration");
      m.class_names.assign(fields.begin() + 1, fields.end());
      m.classes = static_cast<uint32_t>(m.class_names.size());
      if (m.classes < 2)
        throw validation_error("manifest declares fewer than 2 classes");
      have_classes = true;
      continue;
    }
    if (fields.size() < 4 || fields.size() > 5)
      throw validation_error("manifest line " + std::to_string(lineno) +
                             ": expected 4 or 5 tab-separated fields");
    ManifestRecord r;
    r.id = fields[0];
    if (r.id.empty())
      throw validation_error("manifest line " + std::to_string(lineno) +
                             ": empty id");
    if (!seen.insert(r.id).second)
      throw validation_error("duplicate manifest id: " + r.id);
    if (fields[1] == "source") {
      r.is_source = true;
    } else if (fields[1] == "target") {
      r.is_source = false;
    } else {
      throw validation_error("manifest record " + r.id +
                             ": role must be source or target, got " +
                             fields[1]);
    }
    r.prob_path = resolve(base, fields[2]);
    r.label_path = resolve(base, fields[3]);
    if (fields.size() == 5) r.feat_path = resolve(base, fields[4]);
    m.records.push_back(std::move(r));
  }
  if (!have_classes || m.records.empty())
    throw validation_error("empty manifest: " + path.string());

  for (const auto& r : m.records) {
    if (!r.prob_path.empty()) check_map_file(r.prob_path, m.classes, r.id);
    if (!r.label_path.empty()) check_map_file(r.label_path, m.classes, r.id);
    if (!r.feat_path.empty()) check_map_file(r.feat_path, m.classes, r.id);
  }
  return m;
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write manifest " + path.string());
  const std::filesystem::path base = path.parent_path();
  auto rel = [&base](const std::filesystem::path& p) -> std::string {
    if (p.empty()) return "-";
    std::error_code ec;
    const auto r = std::filesystem::relative(p, base, ec);
    return ec ? p.string() : r.string();
  };
  out << "classes";
  for (const auto& n : m.class_names) out << '\t' << n;
  out << '\n';
  for (const auto& r : m.records) {
    out << r.id << '\t' << (r.is_source ? "source" : "target") << '\t'
        << rel(r.prob_path) << '\t' << rel(r.label_path);
    if (!r.feat_path.empty()) out << '\t' << rel(r.feat_path);
    out << '\n';
  }
  if (!out) throw io_error("short write to " + path.string());
}

}  // namespace selftrain
