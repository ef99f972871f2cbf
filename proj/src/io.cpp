#include "cbm/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace cbm {

namespace {

[[noreturn]] void fail_line(const std::filesystem::path& path, std::size_t line,
                            const std::string& what) {
  throw parse_error(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

std::uint64_t parse_uint(const std::string& tok, const std::filesystem::path& p,
                         std::size_t line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    fail_line(p, line, "expected a non-negative integer, got '" + tok + "'");
  return v;
}

double parse_real(const std::string& tok, const std::filesystem::path& p,
                  std::size_t line) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    fail_line(p, line, "expected a numeric value, got '" + tok + "'");
  return v;
}

index_t to_zero_based(std::uint64_t raw, bool one_based,
                      const std::filesystem::path& p, std::size_t line) {
  if (one_based) {
    if (raw == 0) fail_line(p, line, "index 0 in a one-based file");
    raw -= 1;
  }
  if (raw >= kVirtualParent)
    fail_line(p, line, "index " + std::to_string(raw) + " too large");
  return static_cast<index_t>(raw);
}

CsrBinaryMatrix finish_graph(index_t rows, index_t cols,
                             std::vector<std::pair<index_t, index_t>> entries,
                             const GraphLoadOptions& opts) {
  if (opts.symmetrize) {
    if (rows != cols)
      throw std::invalid_argument("symmetrize requires a square matrix");
    const std::size_t n = entries.size();
    entries.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i)
      entries.emplace_back(entries[i].second, entries[i].first);
  }
  if (opts.drop_self_loops) {
    std::erase_if(entries, [](const auto& e) { return e.first == e.second; });
  }
  return CsrBinaryMatrix::from_coo(rows, cols, std::move(entries));
}

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(path.string() + ": cannot open file");
  return in;
}

}  // namespace

CsrBinaryMatrix load_matrix_market(const std::filesystem::path& path,
                                   const GraphLoadOptions& opts) {
  std::ifstream in = open_text(path);
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) fail_line(path, 1, "empty file");
  ++lineno;
  auto header = split_ws(line);
  for (auto& t : header)
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return std::tolower(c); });
  if (header.size() < 5 || header[0] != "%%matrixmarket" || header[1] != "matrix")
    fail_line(path, 1, "not a MatrixMarket matrix header");
  if (header[2] != "coordinate")
    fail_line(path, 1, "only coordinate (sparse) format is supported");
  const std::string& field = header[3];
  if (field != "pattern" && field != "real" && field != "integer")
    fail_line(path, 1, "unsupported field '" + field + "'");
  const std::string& symmetry = header[4];
  if (symmetry != "general" && symmetry != "symmetric" &&
      symmetry != "skew-symmetric")
    fail_line(path, 1, "unsupported symmetry '" + symmetry + "'");
  const bool mirror = symmetry != "general";
  const bool has_value = field != "pattern";

  // size line (comments and blanks may precede it)
  index_t n_rows = 0, n_cols = 0;
  std::uint64_t declared_nnz = 0;
  for (;;) {
    if (!std::getline(in, line)) fail_line(path, lineno + 1, "missing size line");
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 3) fail_line(path, lineno, "size line must be 'rows cols nnz'");
    const std::uint64_t r = parse_uint(tok[0], path, lineno);
    const std::uint64_t c = parse_uint(tok[1], path, lineno);
    declared_nnz = parse_uint(tok[2], path, lineno);
    if (r >= kVirtualParent || c >= kVirtualParent)
      fail_line(path, lineno, "matrix dimensions too large");
    n_rows = static_cast<index_t>(r);
    n_cols = static_cast<index_t>(c);
    break;
  }

  std::vector<std::pair<index_t, index_t>> entries;
  entries.reserve(mirror ? 2 * declared_nnz : declared_nnz);
  std::uint64_t seen = 0;
  while (seen < declared_nnz) {
    if (!std::getline(in, line))
      fail_line(path, lineno + 1,
                "unexpected end of file: expected " +
                    std::to_string(declared_nnz) + " entries, got " +
                    std::to_string(seen));
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    const std::size_t expected = has_value ? 3 : 2;
    if (tok.size() != expected)
      fail_line(path, lineno, "entry must have " + std::to_string(expected) +
                                  " fields");
    const index_t r =
        to_zero_based(parse_uint(tok[0], path, lineno), opts.one_based, path, lineno);
    const index_t c =
        to_zero_based(parse_uint(tok[1], path, lineno), opts.one_based, path, lineno);
    if (r >= n_rows || c >= n_cols)
      fail_line(path, lineno, "entry (" + tok[0] + ", " + tok[1] +
                                  ") outside the declared " +
                                  std::to_string(n_rows) + "x" +
                                  std::to_string(n_cols) + " bounds");
    ++seen;
    if (has_value && parse_real(tok[2], path, lineno) == 0.0)
      continue;  // explicit zero carries no pattern entry
    entries.emplace_back(r, c);
    if (mirror && r != c) entries.emplace_back(c, r);
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    if (!split_ws(line).empty()) fail_line(path, lineno, "trailing data");
  }
  return finish_graph(n_rows, n_cols, std::move(entries), opts);
}

CsrBinaryMatrix load_edge_list(const std::filesystem::path& path,
                               const GraphLoadOptions& opts) {
  std::ifstream in = open_text(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::pair<index_t, index_t>> entries;
  index_t max_node = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto tok = split_ws(line);
    if (tok.size() != 2)
      fail_line(path, lineno, "expected 'src dst', got " +
                                  std::to_string(tok.size()) + " fields");
    const index_t s =
        to_zero_based(parse_uint(tok[0], path, lineno), opts.one_based, path, lineno);
    const index_t d =
        to_zero_based(parse_uint(tok[1], path, lineno), opts.one_based, path, lineno);
    entries.emplace_back(s, d);
    max_node = std::max({max_node, s, d});
    any = true;
  }
  const index_t n = any ? max_node + 1 : 0;
  return finish_graph(n, n, std::move(entries), opts);
}

// ---------------------------------------------------------------------------
// CBM1 container
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'C', 'B', 'M', '1'};
constexpr std::uint8_t kVersion = 1;

void append_u8(std::vector<unsigned char>& buf, std::uint8_t v) {
  buf.push_back(v);
}

void append_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back((v >> (8 * i)) & 0xff);
}

void append_u64(std::vector<unsigned char>& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back((v >> (8 * i)) & 0xff);
}

void append_f64(std::vector<unsigned char>& buf, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  append_u64(buf, bits);
}

struct Reader {
  const unsigned char* p;
  std::size_t left;

  void need(std::size_t n) const {
    if (left < n) throw format_error("truncated container");
  }
  std::uint8_t u8() {
    need(1);
    --left;
    return *p++;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(*p++) << (8 * i);
    left -= 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(*p++) << (8 * i);
    left -= 8;
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
};

}  // namespace

void save_cbm(const CbmMatrix& c, const std::filesystem::path& path) {
  std::vector<unsigned char> buf;
  const std::uint64_t m = c.n_rows;
  const std::uint64_t nnz = c.delta_matrix.nnz();
  buf.reserve(40 + m * 8 + (m + 1) * 8 + nnz * 12 +
              (c.is_normalized ? m * 8 : 0));

  buf.insert(buf.end(), kMagic, kMagic + 4);
  append_u8(buf, kVersion);
  append_u8(buf, c.is_normalized ? 1 : 0);
  append_u8(buf, 0);  // reserved
  append_u8(buf, 0);
  append_u64(buf, c.n_rows);
  append_u64(buf, c.n_cols);
  append_u64(buf, c.alpha);
  append_u64(buf, nnz);
  for (index_t p : c.chain.parent) append_u32(buf, p);
  for (index_t t : c.chain.topo_order) append_u32(buf, t);
  for (offset_t o : c.delta_matrix.row_ptr) append_u64(buf, o);
  for (index_t ci : c.delta_matrix.col_idx) append_u32(buf, ci);
  for (real_t v : c.delta_matrix.values)
    append_f64(buf, static_cast<double>(v));
  if (c.is_normalized)
    for (real_t v : c.row_scale) append_f64(buf, static_cast<double>(v));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw format_error(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw format_error(path.string() + ": write failed");
}

CbmMatrix load_cbm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw format_error(path.string() + ": cannot open file");
  const std::streamsize size = in.tellg();
  in.seekg(0);
  std::vector<unsigned char> buf(static_cast<std::size_t>(size));
  if (size > 0 &&
      !in.read(reinterpret_cast<char*>(buf.data()), size))
    throw format_error(path.string() + ": read failed");

  Reader r{buf.data(), buf.size()};
  r.need(4);
  if (std::memcmp(r.p, kMagic, 4) != 0)
    throw format_error("bad magic: not a CBM1 container");
  r.p += 4;
  r.left -= 4;
  if (r.u8() != kVersion) throw format_error("unsupported container version");
  const std::uint8_t flags = r.u8();
  if (flags > 1) throw format_error("unknown flag bits set");
  const bool normalized = flags & 1;
  if (r.u8() != 0 || r.u8() != 0)
    throw format_error("reserved header bytes must be zero");

  const std::uint64_t m64 = r.u64();
  const std::uint64_t n64 = r.u64();
  const std::uint64_t alpha = r.u64();
  const std::uint64_t nnz = r.u64();
  if (m64 >= kVirtualParent || n64 >= kVirtualParent)
    throw format_error("container dimensions too large");
  const index_t m = static_cast<index_t>(m64);
  const index_t n = static_cast<index_t>(n64);
  if (normalized && m != n)
    throw format_error("normalized container must be square");

  // The remaining payload size is fully determined by the header.
  const std::uint64_t expect = 8ull * m + 8ull * (m64 + 1) + 12ull * nnz +
                               (normalized ? 8ull * m : 0);
  if (r.left != expect) throw format_error("container payload size mismatch");

  CbmMatrix c;
  c.n_rows = m;
  c.n_cols = n;
  c.alpha = alpha;
  c.is_normalized = normalized;

  std::vector<index_t> parent(m);
  for (index_t& v : parent) v = r.u32();
  std::vector<index_t> stored_topo(m);
  for (index_t& v : stored_topo) v = r.u32();

  std::vector<offset_t> row_ptr(static_cast<std::size_t>(m) + 1);
  for (offset_t& v : row_ptr) v = r.u64();
  std::vector<index_t> col_idx(nnz);
  for (index_t& v : col_idx) v = r.u32();
  std::vector<double> raw_values(nnz);
  for (double& v : raw_values) v = r.f64();
  std::vector<double> raw_scale;
  if (normalized) {
    raw_scale.resize(m);
    for (double& v : raw_scale) v = r.f64();
    for (double v : raw_scale)
      if (!std::isfinite(v) || v <= 0.0)
        throw format_error("row_scale entries must be positive and finite");
  }

  try {
    c.chain = CompressionChain::from_parents(std::move(parent));
    std::vector<real_t> values(raw_values.begin(), raw_values.end());
    c.delta_matrix = CsrRealMatrix(m, n, std::move(row_ptr),
                                   std::move(col_idx), std::move(values));
  } catch (const std::invalid_argument& e) {
    throw format_error(std::string("invalid container structure: ") + e.what());
  }
  if (c.chain.topo_order != stored_topo)
    throw format_error("stored topological order is inconsistent");

  if (normalized) {
    c.row_scale.assign(raw_scale.begin(), raw_scale.end());
    for (offset_t k = 0; k < nnz; ++k) {
      const double expected = raw_scale[c.delta_matrix.col_idx[k]];
      if (raw_values[k] != expected && raw_values[k] != -expected)
        throw format_error("delta values disagree with the column scales");
    }
  } else {
    for (double v : raw_values)
      if (v != 1.0 && v != -1.0)
        throw format_error("delta values must be +1 or -1");
  }
  return c;
}

}  // namespace cbm
