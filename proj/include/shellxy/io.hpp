#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "shellxy/mesh.hpp"
#include "shellxy/minimize.hpp"

namespace shellxy {

/// Shortest round-trip-safe text for a double (17 significant digits).
std::string format_double(double x);

/// Hash git would give the content as a blob: sha1("blob <size>\0" + content), hex.
std::string git_blob_sha1(std::string_view content);
std::string sha256_hex(std::string_view content);

std::string off_text(const Triangulation& tri);
/// Content hash of the mesh's OFF text.
std::string mesh_hash(const Triangulation& tri);

/// Writes to a sibling temp file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

/// `iteration,energy,grad_norm` rows (plus winding columns when tracked).
std::string trace_csv(const SolveTrace& trace, bool with_winding);

}  // namespace shellxy
