#ifndef ONEBIT_CONFIG_HPP
#define ONEBIT_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace onebit {

/// Flat key-value text with optional [section] headers.
///
///   # comment
///   [sweep]
///   n = 512
///   m-grid = 256,512,1024
///
/// Keys before the first header live in the "" section. Later assignments
/// overwrite earlier ones.
class IniDocument {
 public:
  static IniDocument parse(std::string_view text);
  /// Throws InvalidArgument naming the path when it cannot be read.
  static IniDocument load(const std::filesystem::path& path);

  void set(const std::string& section, const std::string& key, std::string value);
  /// Section contents; empty map when the section is absent.
  const std::map<std::string, std::string>& section(const std::string& name) const;
  bool has_section(const std::string& name) const;
  std::vector<std::string> section_names() const;

  std::string to_string() const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

std::vector<std::string> split_list(std::string_view text, char sep = ',');

// Whole-string numeric parsing; InvalidArgument mentions `what` on failure.
long long parse_int_value(const std::string& text, const std::string& what);
std::uint64_t parse_u64_value(const std::string& text, const std::string& what);
double parse_real_value(const std::string& text, const std::string& what);
bool parse_bool_value(const std::string& text, const std::string& what);

}  // namespace onebit

#endif  // ONEBIT_CONFIG_HPP
