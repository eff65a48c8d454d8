#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dlr/error.hpp"
#include "dlr/harness.hpp"

namespace dlr {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void append_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += quote(fields[i]);
  }
  out += '\n';
}

std::string empty_note(const std::vector<std::size_t>& groups) {
  if (groups.empty()) return {};
  std::string s = "empty groups:";
  for (std::size_t g : groups) s += " " + std::to_string(g);
  return s;
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"kind",   "n",         "k",           "d",
                                             "trial",  "seed",      "l2_error",    "excess_risk",
                                             "trace_msg", "wall_ms", "l2_error_stderr", "excess_risk_stderr",
                                             "thm1_scaling", "note"};
  return cols;
}

std::string results_to_csv(const SweepResult& result) {
  std::string out;
  append_row(out, csv_columns());
  for (const RunRecord& r : result.records)
    append_row(out, {"run", std::to_string(r.cell.n), std::to_string(r.cell.k), std::to_string(r.cell.d),
                     std::to_string(r.trial), std::to_string(r.seed), num(r.l2_error), num(r.excess_risk),
                     opt(r.trace_msg), opt(r.wall_ms), "", "", "", empty_note(r.empty_groups)});
  for (const CellSummary& s : result.summaries)
    append_row(out, {"summary", std::to_string(s.cell.n), std::to_string(s.cell.k), std::to_string(s.cell.d), "-1",
                     "", num(s.l2_mean), num(s.excess_mean), opt(s.trace_msg), "", num(s.l2_stderr),
                     num(s.excess_stderr), num(s.scalings.thm1), ""});
  for (const SkippedCell& s : result.skipped)
    append_row(out, {"skipped", std::to_string(s.cell.n), std::to_string(s.cell.k), std::to_string(s.cell.d), "",
                     "", "", "", "", "", "", "", "", s.reason});
  return out;
}

void write_results(const SweepResult& result, const std::filesystem::path& path) {
  if (result.records.empty()) throw Error("write_results: no records to write to " + path.string());
  const std::string text = results_to_csv(result);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("write_results: cannot open " + path.string() + ": " + std::strerror(errno));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw Error("write_results: write to " + path.string() + " failed: " + std::strerror(errno));
}

const std::string& CsvTable::at(std::size_t row, const std::string& column) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == column) return rows.at(row).at(c);
  throw Error("csv: no column named '" + column + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("read_csv: cannot open " + path.string() + ": " + std::strerror(errno));
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      field.clear();
      lines.push_back(std::move(fields));
      fields.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw Error("read_csv: unterminated quote in " + path.string());
  if (any) {
    fields.push_back(std::move(field));
    lines.push_back(std::move(fields));
  }
  if (lines.empty()) throw Error("read_csv: " + path.string() + " has no header");

  CsvTable t;
  t.header = std::move(lines.front());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != t.header.size())
      throw Error("read_csv: " + path.string() + " line " + std::to_string(i + 1) + " has " +
                  std::to_string(lines[i].size()) + " fields, expected " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(lines[i]));
  }
  return t;
}

}  // namespace dlr
