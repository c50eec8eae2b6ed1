#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "bequest/cli.hpp"
#include "json.hpp"

namespace bequest::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string non_finite(double value) {
  if (std::isnan(value)) return "nan";
  return value > 0 ? "inf" : "-inf";
}

std::string cell_text(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else {
          return v;
        }
      },
      cell);
}

std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

Json cell_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return non_finite(v);
          return v;
        } else {
          return v;
        }
      },
      cell);
}

std::string render_json(const Report& report) {
  Json doc;
  doc["schema_version"] = 1;
  doc["command"] = std::string(to_string(report.command));
  for (const auto& [name, value] : report.fields) doc[name] = cell_json(value);
  for (const auto& table : report.tables) {
    Json rows = Json::array();
    for (const auto& row : table.rows) {
      Json obj = Json::object();
      for (std::size_t i = 0; i < table.columns.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
      rows.push_back(std::move(obj));
    }
    doc[table.name] = std::move(rows);
  }
  return doc.dump(2) + "\n";
}

std::string render_csv(const Report& report) {
  std::ostringstream out;
  std::vector<Table> tables = report.tables;
  if (tables.empty()) {
    Table single{"fields", {}, {{}}};
    for (const auto& [name, value] : report.fields) {
      single.columns.push_back(name);
      single.rows.front().push_back(value);
    }
    tables.push_back(std::move(single));
  }
  bool first = true;
  for (const auto& table : tables) {
    if (!first) out << "\n";
    first = false;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      out << (i ? "," : "") << csv_escape(table.columns[i]);
    }
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(cell_text(row[i]));
      out << "\n";
    }
  }
  return out.str();
}

std::string render_text(const Report& report) {
  std::ostringstream out;
  std::size_t key_width = 0;
  for (const auto& field : report.fields) key_width = std::max(key_width, field.first.size());
  for (const auto& [name, value] : report.fields) {
    const std::string text = cell_text(value);
    out << name << ":" << std::string(key_width - name.size() + 1, ' ') << (text.empty() ? "-" : text) << "\n";
  }
  for (const auto& table : report.tables) {
    out << "\n[" << table.name << "]\n";
    std::vector<std::size_t> width(table.columns.size());
    std::vector<std::vector<std::string>> cells;
    for (std::size_t i = 0; i < width.size(); ++i) width[i] = table.columns[i].size();
    for (const auto& row : table.rows) {
      auto& line = cells.emplace_back();
      for (std::size_t i = 0; i < row.size(); ++i) {
        line.push_back(cell_text(row[i]));
        if (line.back().empty()) line.back() = "-";
        width[i] = std::max(width[i], line.back().size());
      }
    }
    auto emit = [&](const std::vector<std::string>& line) {
      for (std::size_t i = 0; i < line.size(); ++i) {
        out << (i ? "  " : "") << line[i];
        if (i + 1 < line.size()) out << std::string(width[i] - line[i].size(), ' ');
      }
      out << "\n";
    };
    emit(table.columns);
    for (const auto& line : cells) emit(line);
  }
  return out.str();
}

}  // namespace

std::string format_number(double value) {
  if (!std::isfinite(value)) return non_finite(value);
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

std::string render(const Report& report, Format format) {
  switch (format) {
    case Format::Csv:
      return render_csv(report);
    case Format::Json:
      return render_json(report);
    case Format::Text:
      break;
  }
  return render_text(report);
}

}  // namespace bequest::cli
