#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "cbm/builder.hpp"
#include "cbm/csr.hpp"

namespace cbm {

/// Raised on malformed text input; the message carries the line number.
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised on a bad or truncated CBM container.
class format_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GraphLoadOptions {
  bool symmetrize = false;       // add the reverse of every edge
  bool drop_self_loops = false;  // discard diagonal entries
  bool one_based = false;        // input indices start at 1 (Matrix Market
                                 // files conventionally do)
};

/// Loads a sparse coordinate Matrix Market file (pattern or numeric; numeric
/// nonzeros are coerced to 1, explicit zeros dropped). "symmetric" and
/// "skew-symmetric" headers are expanded to the full pattern. Throws
/// parse_error with a line number on malformed input or out-of-bounds
/// indices.
CsrBinaryMatrix load_matrix_market(const std::filesystem::path& path,
                                   const GraphLoadOptions& opts = {});

/// Loads a whitespace "src dst" edge list; '#' starts a comment line, blank
/// lines are skipped. The matrix is square with n = max index + 1.
CsrBinaryMatrix load_edge_list(const std::filesystem::path& path,
                               const GraphLoadOptions& opts = {});

// CBM1 container: magic "CBM1", version byte, flags byte (bit 0 =
// normalized), two reserved bytes, then little-endian u64 header fields
// (n_rows, n_cols, alpha, delta nnz) followed by the parent array (u32,
// kVirtualParent for root branches), topo_order (u32), the delta CSR arrays
// (u64 row_ptr, u32 col_idx, f64 values) and, when normalized, row_scale
// (f64). Derived chain data is rebuilt on load.

/// Writes the container; throws format_error on I/O failure.
void save_cbm(const CbmMatrix& c, const std::filesystem::path& path);

/// Reads and fully validates a container: bad magic or version, truncation,
/// trailing bytes or any structural-invariant violation raises format_error.
/// load_cbm(save_cbm(c)) reproduces c field for field.
CbmMatrix load_cbm(const std::filesystem::path& path);

}  // namespace cbm
