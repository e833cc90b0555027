#include "hinf/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "hinf/error.hpp"
#include "hinf/matrix_market.hpp"

namespace hinf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const fs::path& path, const std::string& msg) {
  throw Error(ErrorCode::ParseError, path.string() + ": " + msg);
}

fs::path resolve(const fs::path& base, const json& j, const char* key, const fs::path& manifest) {
  if (!j.contains(key)) fail(manifest, std::string("missing required key '") + key + "'");
  if (!j.at(key).is_string()) fail(manifest, std::string("key '") + key + "' must be a path string");
  const fs::path p = j.at(key).get<std::string>();
  return p.is_absolute() ? p : base / p;
}

SystemManifest interpret(const json& j, const fs::path& path);

}  // namespace

SystemManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open manifest");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(path, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(path, "manifest must be a JSON object");
  try {
    return interpret(j, path);
  } catch (const json::exception& e) {
    fail(path, std::string("bad manifest field: ") + e.what());
  }
}

namespace {

SystemManifest interpret(const json& j, const fs::path& path) {
  SystemManifest m;
  const fs::path base = path.parent_path();
  m.name = j.value("name", path.stem().string());
  const std::string domain = j.value("domain", std::string("continuous"));
  if (domain == "continuous") {
    m.domain = Domain::Continuous;
  } else if (domain == "discrete") {
    m.domain = Domain::Discrete;
  } else {
    fail(path, "domain must be 'continuous' or 'discrete'");
  }
  m.a = resolve(base, j, "A", path);
  m.b = resolve(base, j, "B", path);
  m.c = resolve(base, j, "C", path);
  m.d = resolve(base, j, "D", path);
  const bool e_identity = j.value("E_identity", false);
  if (j.contains("E") && !j.at("E").is_null()) {
    if (e_identity) fail(path, "'E' given together with E_identity=true");
    m.e = resolve(base, j, "E", path);
  }
  if (j.contains("storage")) {
    const std::string s = j.at("storage").get<std::string>();
    if (s == "dense") {
      m.storage = Storage::Dense;
    } else if (s == "sparse") {
      m.storage = Storage::Sparse;
    } else {
      fail(path, "storage must be 'dense' or 'sparse'");
    }
  }
  return m;
}

}  // namespace

StateSpaceSystem load_system(const SystemManifest& m) {
  const RawMatrix a = read_matrix_market(m.a);
  const RawMatrix b = read_matrix_market(m.b);
  const RawMatrix c = read_matrix_market(m.c);
  const RawMatrix d = read_matrix_market(m.d);
  std::optional<RawMatrix> e;
  if (m.e) e = read_matrix_market(*m.e);
  const Storage storage = m.storage.value_or(a.dense ? Storage::Dense : Storage::Sparse);
  return validate_system(a, b, c, d, e, m.domain, storage);
}

StateSpaceSystem load_system(const fs::path& manifest_path) {
  return load_system(read_manifest(manifest_path));
}

fs::path write_system(const fs::path& dir, const std::string& name, const StateSpaceSystem& sys) {
  fs::create_directories(dir);
  json j;
  j["name"] = name;
  j["domain"] = sys.domain() == Domain::Continuous ? "continuous" : "discrete";
  const std::string prefix = name + "_";
  if (sys.storage() == Storage::Dense) {
    write_matrix_market(dir / (prefix + "A.mtx"), sys.A());
    if (!sys.e_is_identity()) write_matrix_market(dir / (prefix + "E.mtx"), sys.E());
    j["storage"] = "dense";
  } else {
    write_matrix_market(dir / (prefix + "A.mtx"), sys.A_sparse());
    if (!sys.e_is_identity()) write_matrix_market(dir / (prefix + "E.mtx"), sys.E_sparse());
    j["storage"] = "sparse";
  }
  write_matrix_market(dir / (prefix + "B.mtx"), sys.B());
  write_matrix_market(dir / (prefix + "C.mtx"), sys.C());
  write_matrix_market(dir / (prefix + "D.mtx"), sys.D());
  j["A"] = prefix + "A.mtx";
  j["B"] = prefix + "B.mtx";
  j["C"] = prefix + "C.mtx";
  j["D"] = prefix + "D.mtx";
  if (!sys.e_is_identity()) {
    j["E"] = prefix + "E.mtx";
  } else {
    j["E_identity"] = true;
  }
  const fs::path out = dir / (name + ".json");
  std::ofstream f(out);
  if (!f) fail(out, "cannot open for writing");
  f << j.dump(2) << '\n';
  return out;
}

}  // namespace hinf
