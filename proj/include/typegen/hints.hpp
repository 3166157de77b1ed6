#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "typegen/frontend/source_module.hpp"

namespace typegen {

enum class HintSource { UserCurrentFile, UserOtherFile, ThirdParty };

const char* to_string(HintSource source);

struct TypeHint {
  std::string name;
  HintSource source = HintSource::UserCurrentFile;

  bool operator==(const TypeHint&) const = default;
};

/// Ordered by source priority, duplicate-free, at most `cap` entries.
struct TypeHintSet {
  std::vector<TypeHint> entries;

  std::vector<std::string> names() const;
};

/// Class names exported by installed packages, keyed by top-level package.
class TypeDatabase {
 public:
  TypeDatabase() = default;
  explicit TypeDatabase(std::map<std::string, std::vector<std::string>> packages);

  const std::map<std::string, std::vector<std::string>>& packages() const {
    return packages_;
  }
  /// Types of a package, or nullptr when the package is unknown.
  const std::vector<std::string>* find(const std::string& package) const;

  std::string to_json() const;
  static TypeDatabase from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static TypeDatabase load(const std::filesystem::path& path);

  bool operator==(const TypeDatabase&) const = default;

 private:
  std::map<std::string, std::vector<std::string>> packages_;
};

/// Indexes each root: a package directory or a single-file module. Class
/// names are ordered by module path, then name. Files that fail to parse
/// are logged and skipped.
TypeDatabase build_typedb(const std::vector<std::filesystem::path>& roots);

/// Indexes every importable package and module found directly inside a
/// site-packages style directory.
TypeDatabase build_typedb_from_site(const std::filesystem::path& site_dir);

struct HintOptions {
  int cap = 50;
  /// Prefix third-party names with the module name or alias they were
  /// imported under (`requests.Session`).
  bool qualified = false;
};

/// Classes of the current file, then classes of project files it imports
/// (one level), then database types of imported third-party packages.
TypeHintSet collect_hints(const SourceModule& m,
                          const std::filesystem::path& project_root,
                          const TypeDatabase& db, HintOptions options = {});

/// "Available user-defined and third-party types: A, B." or "" when empty.
std::string render_hint(const TypeHintSet& hints);

}  // namespace typegen
