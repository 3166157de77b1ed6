#include "typegen/hints.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "typegen/error.hpp"

namespace typegen {

namespace fs = std::filesystem;

const char* to_string(HintSource source) {
  switch (source) {
    case HintSource::UserCurrentFile: return "user-current-file";
    case HintSource::UserOtherFile: return "user-other-file";
    case HintSource::ThirdParty: return "third-party";
  }
  return "?";
}

std::vector<std::string> TypeHintSet::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries) out.push_back(e.name);
  return out;
}

TypeDatabase::TypeDatabase(std::map<std::string, std::vector<std::string>> packages)
    : packages_(std::move(packages)) {
  for (auto& [name, types] : packages_) {
    std::set<std::string> seen;
    std::vector<std::string> unique;
    for (auto& t : types) {
      if (seen.insert(t).second) unique.push_back(std::move(t));
    }
    types = std::move(unique);
  }
}

const std::vector<std::string>* TypeDatabase::find(const std::string& package) const {
  auto it = packages_.find(package);
  return it == packages_.end() ? nullptr : &it->second;
}

std::string TypeDatabase::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, types] : packages_) j[name] = types;
  return j.dump(2) + "\n";
}

TypeDatabase TypeDatabase::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("type database is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("type database must be a JSON object");
  std::map<std::string, std::vector<std::string>> packages;
  for (const auto& [name, types] : j.items()) {
    if (!types.is_array()) {
      throw InputError("type database entry '" + name + "' is not a list");
    }
    auto& out = packages[name];
    for (const auto& t : types) {
      if (!t.is_string()) {
        throw InputError("type database entry '" + name + "' has a non-string type");
      }
      out.push_back(t.get<std::string>());
    }
  }
  return TypeDatabase(std::move(packages));
}

void TypeDatabase::save(const fs::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << to_json();
}

TypeDatabase TypeDatabase::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

namespace {

// Module-level class names of a file, or nullopt when it cannot be parsed.
std::optional<std::vector<std::string>> module_classes(const fs::path& file) {
  try {
    SourceModule m = load_module(file);
    std::vector<std::string> out;
    for (const auto& c : m.classes()) {
      if (c.qualified_name == c.name) out.push_back(c.name);
    }
    return out;
  } catch (const Error& e) {
    spdlog::warn("skipping {}: {}", file.string(), e.what());
    return std::nullopt;
  }
}

bool is_identifier(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string module_path_of(const fs::path& root, const fs::path& file) {
  fs::path rel = file.lexically_relative(root);
  std::string out = root.filename().string();
  for (const auto& part : rel) {
    std::string p = part.string();
    if (p == "__init__.py") break;
    if (p.size() > 3 && p.substr(p.size() - 3) == ".py") p = p.substr(0, p.size() - 3);
    out += "." + p;
  }
  return out;
}

std::vector<std::string> index_package(const fs::path& root) {
  std::vector<std::pair<std::string, fs::path>> files;
  if (fs::is_regular_file(root)) {
    files.push_back({root.stem().string(), root});
  } else {
    for (auto it = fs::recursive_directory_iterator(
             root, fs::directory_options::skip_permission_denied);
         it != fs::recursive_directory_iterator(); ++it) {
      if (it->is_directory() && it->path().filename() == "__pycache__") {
        it.disable_recursion_pending();
        continue;
      }
      if (it->is_regular_file() && it->path().extension() == ".py") {
        files.push_back({module_path_of(root, it->path()), it->path()});
      }
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& [module, file] : files) {
    auto classes = module_classes(file);
    if (!classes) continue;
    std::sort(classes->begin(), classes->end());
    for (auto& c : *classes) {
      if (seen.insert(c).second) out.push_back(std::move(c));
    }
  }
  return out;
}

bool has_python_files(const fs::path& dir) {
  for (auto it = fs::recursive_directory_iterator(
           dir, fs::directory_options::skip_permission_denied);
       it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_regular_file() && it->path().extension() == ".py") return true;
  }
  return false;
}

}  // namespace

TypeDatabase build_typedb(const std::vector<fs::path>& roots) {
  std::map<std::string, std::vector<std::string>> packages;
  for (const auto& root : roots) {
    if (!fs::exists(root)) throw InputError("no such package: " + root.string());
    std::string name = fs::is_regular_file(root) ? root.stem().string()
                                                 : root.filename().string();
    auto& types = packages[name];
    for (auto& t : index_package(root)) types.push_back(std::move(t));
  }
  return TypeDatabase(std::move(packages));
}

TypeDatabase build_typedb_from_site(const fs::path& site_dir) {
  if (!fs::is_directory(site_dir)) {
    throw InputError("not a directory: " + site_dir.string());
  }
  std::vector<fs::path> roots;
  for (const auto& entry : fs::directory_iterator(site_dir)) {
    const fs::path& p = entry.path();
    if (entry.is_directory()) {
      if (!is_identifier(p.filename().string())) continue;
      if (p.filename() == "__pycache__") continue;
      if (has_python_files(p)) roots.push_back(p);
    } else if (entry.is_regular_file() && p.extension() == ".py" &&
               is_identifier(p.stem().string())) {
      roots.push_back(p);
    }
  }
  std::sort(roots.begin(), roots.end());
  return build_typedb(roots);
}

namespace {

class HintCollector {
 public:
  HintCollector(const SourceModule& m, const fs::path& project_root,
                const TypeDatabase& db, HintOptions options)
      : m_(m), root_(project_root), db_(db), options_(options) {}

  TypeHintSet run() {
    for (const auto& c : m_.classes()) add(c.name, HintSource::UserCurrentFile);
    for (const auto& rec : m_.imports()) user_import(rec);
    for (const auto& rec : m_.imports()) third_party_import(rec);
    TypeHintSet out;
    for (auto& [name, source] : pending_) {
      if (static_cast<int>(out.entries.size()) >= options_.cap) break;
      out.entries.push_back({name, source});
    }
    return out;
  }

 private:
  void add(const std::string& name, HintSource source) {
    if (seen_.insert(name).second) pending_.push_back({name, source});
  }

  std::vector<fs::path> bases_for(const ImportRecord& rec) const {
    if (!rec.is_relative) {
      std::vector<fs::path> bases = {root_};
      if (!m_.path().empty()) bases.push_back(m_.path().parent_path());
      return bases;
    }
    fs::path base = m_.path().empty() ? root_ : m_.path().parent_path();
    for (int i = 1; i < rec.level; ++i) base = base.parent_path();
    return {base};
  }

  static std::string dotted_tail(const ImportRecord& rec) {
    return rec.module.substr(static_cast<size_t>(rec.level));
  }

  std::optional<fs::path> resolve(const std::vector<fs::path>& bases,
                                  const std::string& dotted) const {
    for (const auto& base : bases) {
      fs::path p = base;
      if (!dotted.empty()) {
        std::stringstream ss(dotted);
        for (std::string part; std::getline(ss, part, '.');) p /= part;
      }
      fs::path file = p;
      file += ".py";
      if (!dotted.empty() && fs::is_regular_file(file)) return file;
      if (fs::is_regular_file(p / "__init__.py")) return p / "__init__.py";
    }
    return std::nullopt;
  }

  const std::vector<std::string>& classes_of(const fs::path& file) {
    auto key = file.lexically_normal().string();
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_.emplace(key, module_classes(file).value_or(std::vector<std::string>{}))
               .first;
    }
    return it->second;
  }

  static std::string join(const std::string& a, const std::string& b) {
    if (a.empty()) return b;
    return a + "." + b;
  }

  void user_import(const ImportRecord& rec) {
    auto bases = bases_for(rec);
    std::string tail = dotted_tail(rec);
    bool resolved = false;
    if (rec.names.empty()) {
      if (auto file = resolve(bases, tail)) {
        for (const auto& c : classes_of(*file)) add(c, HintSource::UserOtherFile);
        resolved = true;
      }
    } else {
      auto module_file = resolve(bases, tail);
      for (const auto& name : rec.names) {
        if (name == "*") {
          if (module_file) {
            for (const auto& c : classes_of(*module_file)) add(c, HintSource::UserOtherFile);
          }
          continue;
        }
        if (auto sub = resolve(bases, join(tail, name))) {
          for (const auto& c : classes_of(*sub)) add(c, HintSource::UserOtherFile);
          resolved = true;
        } else if (module_file) {
          const auto& classes = classes_of(*module_file);
          if (std::find(classes.begin(), classes.end(), name) != classes.end()) {
            add(name, HintSource::UserOtherFile);
          }
        }
      }
      resolved = resolved || module_file.has_value();
    }
    if (resolved) {
      local_.insert(rec.module);
    } else if (rec.is_relative) {
      spdlog::debug("{}: cannot resolve relative import {}", m_.path().string(),
                    rec.module);
    }
  }

  void third_party_import(const ImportRecord& rec) {
    if (rec.is_relative || local_.count(rec.module)) return;
    std::string package = rec.module.substr(0, rec.module.find('.'));
    const auto* types = db_.find(package);
    if (types == nullptr) {
      spdlog::debug("{}: no type database entry for {}", m_.path().string(), package);
      return;
    }
    if (rec.names.empty()) {
      std::string prefix = rec.module;
      for (const auto& [alias, original] : rec.aliases) {
        if (original == rec.module) prefix = alias;
      }
      for (const auto& t : *types) {
        add(options_.qualified ? prefix + "." + t : t, HintSource::ThirdParty);
      }
      return;
    }
    for (const auto& name : rec.names) {
      if (name == "*") {
        for (const auto& t : *types) add(t, HintSource::ThirdParty);
        continue;
      }
      if (std::find(types->begin(), types->end(), name) == types->end()) continue;
      std::string shown = name;
      if (options_.qualified) {
        for (const auto& [alias, original] : rec.aliases) {
          if (original == name) shown = alias;
        }
      }
      add(shown, HintSource::ThirdParty);
    }
  }

  const SourceModule& m_;
  fs::path root_;
  const TypeDatabase& db_;
  HintOptions options_;
  std::set<std::string> seen_;
  std::set<std::string> local_;
  std::vector<std::pair<std::string, HintSource>> pending_;
  std::map<std::string, std::vector<std::string>> cache_;
};

}  // namespace

TypeHintSet collect_hints(const SourceModule& m, const fs::path& project_root,
                          const TypeDatabase& db, HintOptions options) {
  if (options.cap < 0) throw InputError("hint cap must be non-negative");
  return HintCollector(m, project_root, db, options).run();
}

std::string render_hint(const TypeHintSet& hints) {
  if (hints.entries.empty()) return "";
  std::string out = "Available user-defined and third-party types: ";
  for (size_t i = 0; i < hints.entries.size(); ++i) {
    if (i > 0) out += ", ";
    out += hints.entries[i].name;
  }
  return out + ".";
}

}  // namespace typegen
