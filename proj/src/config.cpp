#include "onebit/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "onebit/core_model.hpp"

namespace onebit {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find(sep, start);
    const auto piece = trim(text.substr(start, end == std::string_view::npos ? text.size() - start
                                                                             : end - start));
    if (!piece.empty()) out.push_back(piece);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

long long parse_int_value(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size())
    throw InvalidArgument("invalid integer for " + what + ": '" + text + "'");
  return v;
}

std::uint64_t parse_u64_value(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text[0] != '-') v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size())
    throw InvalidArgument("invalid unsigned integer for " + what + ": '" + text + "'");
  return v;
}

double parse_real_value(const std::string& text, const std::string& what) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size())
    throw InvalidArgument("invalid number for " + what + ": '" + text + "'");
  return v;
}

bool parse_bool_value(const std::string& text, const std::string& what) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw InvalidArgument("invalid boolean for " + what + ": '" + text + "'");
}

IniDocument IniDocument::parse(std::string_view text) {
  IniDocument doc;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw InvalidArgument("config line " + std::to_string(line_no) + ": unterminated section");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!doc.has_section(current)) {
        doc.order_.push_back(current);
        doc.sections_[current];
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(std::string_view(line).substr(0, eq));
    if (key.empty())
      throw InvalidArgument("config line " + std::to_string(line_no) + ": empty key");
    doc.set(current, key, trim(std::string_view(line).substr(eq + 1)));
  }
  return doc;
}

IniDocument IniDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void IniDocument::set(const std::string& section, const std::string& key, std::string value) {
  if (!has_section(section)) order_.push_back(section);
  sections_[section][key] = std::move(value);
}

const std::map<std::string, std::string>& IniDocument::section(const std::string& name) const {
  static const std::map<std::string, std::string> empty;
  const auto it = sections_.find(name);
  return it == sections_.end() ? empty : it->second;
}

bool IniDocument::has_section(const std::string& name) const {
  return sections_.count(name) != 0;
}

std::vector<std::string> IniDocument::section_names() const { return order_; }

std::string IniDocument::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& name : order_) {
    if (!first) out << '\n';
    first = false;
    if (!name.empty()) out << '[' << name << "]\n";
    for (const auto& [key, value] : sections_.at(name)) out << key << " = " << value << '\n';
  }
  return out.str();
}

}  // namespace onebit
