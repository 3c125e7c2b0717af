#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ncsg {

// Report emission. Byte-stable by construction: ordered_json preserves
// insertion order and every float is printed with 17 significant digits,
// so identical runs produce identical bytes and values round-trip through
// a JSON parser without loss.

using OrderedJson = nlohmann::ordered_json;

/// 2-space-indented dump with numbers rendered %.17g (non-finite → null).
std::string dump_stable(const OrderedJson& j);

/// One row of the plot-ready spectral table; absent cells print empty.
struct SpectralCsvRow {
  std::optional<double> shell_lo, shell_hi, d_min, d_max, tail_norm, s_k1;
};

/// Header exactly "shell_lo,shell_hi,d_min,d_max,tail_norm,s_k1".
std::string csv_spectral_table(const std::vector<SpectralCsvRow>& rows);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace ncsg
