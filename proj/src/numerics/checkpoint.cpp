// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/numerics/checkpoint.hpp"

#include "cannedbot/error.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cannedbot::numerics {

namespace {

constexpr std::array<char, 8> kMagic = {'C', 'B', 'C', 'K', 'P', 'T', '\0', '\0'};

class Fnv1a {
 public:
  void update(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  template <typename T>
  void update_value(const T& v) { update(&v, sizeof(T)); }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::uint64_t digest_value(const ParameterStore& params) {
  Fnv1a h;
  for (const Parameter& p : params) {
    h.update(p.name.data(), p.name.size());
    h.update_value(static_cast<std::uint64_t>(p.value.rows()));
    h.update_value(static_cast<std::uint64_t>(p.value.cols()));
    h.update(p.value.data(), sizeof(Real) * static_cast<std::size_t>(p.value.size()));
  }
  return h.value();
}

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error(ErrorCode::kParse, "truncated checkpoint");
  return v;
}

std::string read_string(std::istream& is, std::uint64_t max_len = 1ULL << 32) {
  const auto len = read_pod<std::uint64_t>(is);
  if (len > max_len) throw Error(ErrorCode::kParse, "corrupt checkpoint string length");
  std::string s(len, '\0');
  is.read(s.data(), static_cast<std::streamsize>(len));
  if (!is) throw Error(ErrorCode::kParse, "truncated checkpoint");
  return s;
}

}  // namespace

std::string parameter_digest(const ParameterStore& params) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << digest_value(params);
  return os.str();
}

void save_checkpoint(const std::filesystem::path& path, const ParameterStore& params,
                     const nlohmann::json& manifest) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    os.write(kMagic.data(), kMagic.size());
    write_pod(os, kCheckpointVersion);
    const std::string m = manifest.dump();
    write_pod(os, static_cast<std::uint64_t>(m.size()));
    os.write(m.data(), static_cast<std::streamsize>(m.size()));
    write_pod(os, static_cast<std::uint64_t>(params.size()));
    for (const Parameter& p : params) {
      write_pod(os, static_cast<std::uint64_t>(p.name.size()));
      os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
      write_pod(os, static_cast<std::uint64_t>(p.value.rows()));
      write_pod(os, static_cast<std::uint64_t>(p.value.cols()));
      os.write(reinterpret_cast<const char*>(p.value.data()),
               static_cast<std::streamsize>(sizeof(Real) * static_cast<std::size_t>(p.value.size())));
    }
    write_pod(os, digest_value(params));
    if (!os) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open checkpoint " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw Error(ErrorCode::kParse, "not a checkpoint: " + path.string());
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kParse, "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.manifest = nlohmann::json::parse(read_string(is));
  const auto count = read_pod<std::uint64_t>(is);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = read_string(is, 4096);
    const auto rows = read_pod<std::uint64_t>(is);
    const auto cols = read_pod<std::uint64_t>(is);
    if (rows > (1ULL << 28) || cols > (1ULL << 28)) throw Error(ErrorCode::kParse, "corrupt shape");
    Tensor t(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    is.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(sizeof(Real) * rows * cols));
    if (!is) throw Error(ErrorCode::kParse, "truncated checkpoint tensor " + name);
    ck.params.add(std::move(name), std::move(t));
  }
  const auto stored = read_pod<std::uint64_t>(is);
  if (stored != digest_value(ck.params)) {
    throw Error(ErrorCode::kChecksumMismatch, "checkpoint digest mismatch in " + path.string());
  }
  return ck;
}

}  // namespace cannedbot::numerics
