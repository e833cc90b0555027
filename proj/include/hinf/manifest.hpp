#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "hinf/system.hpp"

namespace hinf {

/// JSON manifest naming one Matrix Market file per system matrix:
///
///   {"name": "...", "domain": "continuous" | "discrete",
///    "A": "a.mtx", "B": "b.mtx", "C": "c.mtx", "D": "d.mtx",
///    "E": "e.mtx",               (optional, identity when absent)
///    "E_identity": true,         (optional, must not contradict "E")
///    "storage": "dense" | "sparse"}  (optional)
///
/// Relative paths resolve against the manifest's directory. Without
/// "storage", a coordinate-format A selects sparse storage.
struct SystemManifest {
  std::string name;
  Domain domain = Domain::Continuous;
  std::filesystem::path a, b, c, d;
  std::optional<std::filesystem::path> e;
  std::optional<Storage> storage;
};

/// Throws Error{ParseError}.
SystemManifest read_manifest(const std::filesystem::path& path);

/// Reads and validates the referenced matrices. Missing or malformed files
/// raise Error{ParseError}; shape problems raise Error{DimensionMismatch}.
StateSpaceSystem load_system(const SystemManifest& manifest);
StateSpaceSystem load_system(const std::filesystem::path& manifest_path);

/// Writes a.mtx ... (e.mtx unless E is the identity marker) and
/// <name>.json into dir. Returns the manifest path.
std::filesystem::path write_system(const std::filesystem::path& dir, const std::string& name,
                                   const StateSpaceSystem& sys);

}  // namespace hinf
