#include "fnls/report.hpp"

#include "fnls/errors.hpp"
#include "fnls/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fnls {

namespace {

using nlohmann::json;

void write_json(std::ostream& os, const json& j) {
  switch (j.type()) {
    case json::value_t::object: {
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        first = false;
        os << json(it.key()).dump() << ':';
        write_json(os, it.value());
      }
      os << '}';
      break;
    }
    case json::value_t::array: {
      os << '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ',';
        write_json(os, j[i]);
      }
      os << ']';
      break;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v))
        os << format_real(v);
      else
        os << "null";
      break;
    }
    default:
      os << j.dump();
  }
}

std::string compact(const json& j) {
  std::ostringstream os;
  write_json(os, j);
  return os.str();
}

json cell_json(const Cell& c) {
  return std::visit([](const auto& v) { return json(v); }, c);
}

Cell json_cell(const json& j) {
  if (j.is_null()) return std::nan("");
  if (j.is_number_float()) return j.get<double>();
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_string()) return j.get<std::string>();
  throw ParseError("unsupported cell in report JSON", 1, 1);
}

std::string csv_cell(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_real(*d);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

Cell parse_cell(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  if (!text.empty() && text.find_first_of(".eE") == std::string::npos) {
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() + text.size()) return v;
  }
  if (!text.empty()) {
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() + text.size()) return v;
  }
  return text;
}

std::string preamble(const Report& r) {
  return std::string(kCsvMagic) + "\n" + compact(r.config) + "\n";
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

json read_preamble(const std::vector<std::string>& lines) {
  if (lines.size() < 3 || lines[0] != kCsvMagic) throw ParseError("not an fnls CSV report", 1, 1);
  try {
    return json::parse(lines[1]);
  } catch (const json::parse_error& e) {
    throw ParseError("bad config echo", 2, static_cast<int>(e.byte));
  }
}

// Byte offset (1-based, as nlohmann reports it) to line and column.
ParseError json_error(const std::string& text, const json::exception& e, std::size_t byte) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return ParseError(e.what(), line, column);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Report report_from_doc(const json& doc) {
  Report r;
  r.config = doc.at("config");
  const json& res = doc.at("results");
  for (const auto& c : res.at("columns")) r.columns.push_back(c.get<std::string>());
  for (const auto& row : res.at("rows")) {
    std::vector<Cell> cells;
    for (const auto& c : row) cells.push_back(json_cell(c));
    r.rows.push_back(std::move(cells));
  }
  for (auto it = res.at("summary").begin(); it != res.at("summary").end(); ++it)
    r.summary[it.key()] = json_cell(it.value());
  return r;
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

bool Report::operator==(const Report& other) const {
  auto same_cell = [](const Cell& a, const Cell& b) {
    if (a.index() != b.index()) return false;
    if (const double* x = std::get_if<double>(&a)) {
      const double y = std::get<double>(b);
      return (std::isnan(*x) && std::isnan(y)) || *x == y;
    }
    return a == b;
  };
  if (config != other.config || columns != other.columns ||
      rows.size() != other.rows.size() || summary.size() != other.summary.size())
    return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != other.rows[i].size()) return false;
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      if (!same_cell(rows[i][j], other.rows[i][j])) return false;
  }
  for (const auto& [k, v] : summary) {
    const auto it = other.summary.find(k);
    if (it == other.summary.end() || !same_cell(v, it->second)) return false;
  }
  return true;
}

nlohmann::json run_metadata(nlohmann::json echo, std::uint64_t seed) {
  echo["metadata"] = {{"revision", kRevision},
                      {"seed", seed},
                      {"random_algorithm", kRandomAlgorithm}};
  return echo;
}

std::string render_csv(const Report& r) {
  std::string out = preamble(r);
  for (std::size_t i = 0; i < r.columns.size(); ++i)
    out += (i ? "," : "") + csv_cell(r.columns[i]);
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += '\n';
  }
  return out;
}

std::string render_summary_csv(const Report& r) {
  std::string out = preamble(r) + "key,value\n";
  for (const auto& [k, v] : r.summary) out += csv_cell(k) + "," + csv_cell(v) + "\n";
  return out;
}

std::string render_json(const Report& r) {
  json results = json::object();
  results["columns"] = r.columns;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr = json::array();
    for (const Cell& c : row) jr.push_back(cell_json(c));
    rows.push_back(std::move(jr));
  }
  results["rows"] = std::move(rows);
  json summary = json::object();
  for (const auto& [k, v] : r.summary) summary[k] = cell_json(v);
  results["summary"] = std::move(summary);
  json doc = {{"schema_version", kSchemaVersion}, {"config", r.config}, {"results", results}};
  return compact(doc) + "\n";
}

Report parse_csv(const std::string& table, const std::string& summary) {
  Report r;
  const auto lines = lines_of(table);
  r.config = read_preamble(lines);
  for (const std::string& c : split_csv(lines[2])) r.columns.push_back(c);
  if (lines[2].empty()) r.columns.clear();
  for (std::size_t i = 3; i < lines.size(); ++i) {
    std::vector<Cell> row;
    for (const std::string& c : split_csv(lines[i])) row.push_back(parse_cell(c));
    r.rows.push_back(std::move(row));
  }
  const auto slines = lines_of(summary);
  if (read_preamble(slines) != r.config)
    throw ParseError("summary belongs to a different run", 2, 1);
  for (std::size_t i = 3; i < slines.size(); ++i) {
    const auto parts = split_csv(slines[i]);
    if (parts.size() != 2) throw ParseError("malformed summary row", static_cast<int>(i) + 1, 1);
    r.summary[parts[0]] = parse_cell(parts[1]);
  }
  return r;
}

Report parse_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw json_error(text, e, e.byte);
  }
  try {
    if (doc.at("schema_version").get<int>() != kSchemaVersion)
      throw ParseError("unsupported schema version", 1, 1);
    return report_from_doc(doc);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 1, 1);
  }
}

std::vector<std::filesystem::path> emit_report(const Report& r, bool as_json,
                                               const std::filesystem::path& dir,
                                               const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
  if (as_json) {
    const auto path = dir / (stem + ".json");
    write_file(path, render_json(r));
    return {path};
  }
  const auto table = dir / (stem + ".csv");
  const auto summary = dir / (stem + "_summary.csv");
  write_file(table, render_csv(r));
  write_file(summary, render_summary_csv(r));
  return {table, summary};
}

}  // namespace fnls
