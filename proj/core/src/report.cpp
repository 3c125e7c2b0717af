#include "ncsg/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ncsg/errors.hpp"

namespace ncsg {
namespace {

void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
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
  out += '"';
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void dump_rec(const OrderedJson& j, std::string& out, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
  const std::string pad_in(2 * static_cast<std::size_t>(depth + 1), ' ');
  switch (j.type()) {
    case OrderedJson::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& item : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        append_escaped(out, item.key());
        out += ": ";
        dump_rec(item.value(), out, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case OrderedJson::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad_in;
        dump_rec(j[i], out, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case OrderedJson::value_t::string:
      append_escaped(out, j.get<std::string>());
      return;
    case OrderedJson::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case OrderedJson::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      return;
    case OrderedJson::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      return;
    case OrderedJson::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += "null";
      return;
  }
}

void append_cell(std::string& out, const std::optional<double>& v) {
  if (v) out += format_double(*v);
}

}  // namespace

std::string dump_stable(const OrderedJson& j) {
  std::string out;
  dump_rec(j, out, 0);
  out += "\n";
  return out;
}

std::string csv_spectral_table(const std::vector<SpectralCsvRow>& rows) {
  std::string out = "shell_lo,shell_hi,d_min,d_max,tail_norm,s_k1\n";
  for (const SpectralCsvRow& r : rows) {
    append_cell(out, r.shell_lo);
    out += ',';
    append_cell(out, r.shell_hi);
    out += ',';
    append_cell(out, r.d_min);
    out += ',';
    append_cell(out, r.d_max);
    out += ',';
    append_cell(out, r.tail_norm);
    out += ',';
    append_cell(out, r.s_k1);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace ncsg
