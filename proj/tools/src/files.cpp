#include "files.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "eprqkd/errors.hpp"

namespace eprqkd::cli {

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string_view to_string(ChecksumStatus status) {
  switch (status) {
    case ChecksumStatus::verified: return "verified";
    case ChecksumStatus::no_sidecar: return "no checksum file";
    case ChecksumStatus::skipped: return "skipped";
  }
  return "?";
}

ChecksumStatus verify_checksum(const std::filesystem::path& path, bool skip) {
  if (skip) return ChecksumStatus::skipped;
  auto sidecar = path;
  sidecar += ".sha256";
  if (!std::filesystem::exists(sidecar)) return ChecksumStatus::no_sidecar;

  std::istringstream in(read_file(sidecar));
  std::string expected;
  in >> expected;
  std::transform(expected.begin(), expected.end(), expected.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const std::string actual = sha256_hex(read_file(path));
  if (expected != actual) {
    throw ValidationError("checksum mismatch for " + path.string() + ": expected " + expected +
                          ", got " + actual + " (pass --no-verify to use a modified file)");
  }
  return ChecksumStatus::verified;
}

}  // namespace eprqkd::cli
