#include "shellxy/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "shellxy/error.hpp"

namespace shellxy {

namespace {

std::string digest_hex(const EVP_MD* md, std::string_view prefix, std::string_view content) {
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx && EVP_DigestInit_ex(ctx, md, nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, prefix.data(), prefix.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, out, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error(ErrorCode::IoError, "digest computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[out[i] >> 4];
    hex += kHex[out[i] & 15];
  }
  return hex;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string git_blob_sha1(std::string_view content) {
  std::string header = "blob " + std::to_string(content.size());
  header.push_back('\0');
  return digest_hex(EVP_sha1(), header, content);
}

std::string sha256_hex(std::string_view content) { return digest_hex(EVP_sha256(), {}, content); }

std::string off_text(const Triangulation& tri) {
  std::ostringstream os;
  write_off(os, tri);
  return os.str();
}

std::string mesh_hash(const Triangulation& tri) { return git_blob_sha1(off_text(tri)); }

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string trace_csv(const SolveTrace& trace, bool with_winding) {
  std::string out = with_winding ? "iteration,energy,grad_norm,total_winding,defect_crossing\n"
                                 : "iteration,energy,grad_norm\n";
  for (const TraceRow& r : trace.iterates) {
    out += std::to_string(r.iteration) + ',' + format_double(r.energy) + ',' +
           format_double(r.grad_norm);
    if (with_winding) {
      out += ',' + std::to_string(r.total_winding) + ',' + (r.defect_crossing ? "1" : "0");
    }
    out += '\n';
  }
  return out;
}

}  // namespace shellxy
