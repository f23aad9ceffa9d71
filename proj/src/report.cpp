#include "mpbvp/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mpbvp/errors.hpp"

namespace mpbvp {

namespace {

void dump(const Report& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (j.type()) {
    case nlohmann::detail::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad_in;
        out += Report(it.key()).dump();
        out += ": ";
        dump(it.value(), out, depth + 1);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "}";
      return;
    }
    case nlohmann::detail::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad_in;
        dump(j[i], out, depth + 1);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "]";
      return;
    }
    case nlohmann::detail::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.15g", v);
      // keep the token a valid JSON number
      bool looks_integral = true;
      for (const char* p = buf; *p; ++p)
        if (*p == '.' || *p == 'e' || *p == 'E' || *p == 'n' || *p == 'i')
          looks_integral = false;
      out += buf;
      if (looks_integral) out += ".0";
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string render_report(const Report& report) {
  std::string out;
  dump(report, out, 0);
  out += "\n";
  return out;
}

void write_report_file(const std::filesystem::path& path, const Report& report) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << render_report(report);
}

}  // namespace mpbvp
