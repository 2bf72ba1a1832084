#include "opsum/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "opsum/error.hpp"

namespace opsum {

namespace {

constexpr const char* kMagic = "opsum-checkpoint";

void put_le32(std::ostream& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof bits);
  const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                         static_cast<char>((bits >> 16) & 0xff),
                         static_cast<char>((bits >> 24) & 0xff)};
  out.write(bytes, 4);
}

float get_le32(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  fail(ErrorKind::kData, "checkpoint " + path + ": " + what);
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::kData, "cannot write checkpoint " + path);
  out << kMagic << "\n";
  out << "version " << kCheckpointVersion << "\n";
  out << "precision " << precision_name(checkpoint.precision) << "\n";
  for (const auto& [key, value] : checkpoint.meta) {
    require(key.find_first_of(" \n") == std::string::npos &&
                value.find('\n') == std::string::npos,
            ErrorKind::kArgument, "checkpoint metadata must be single-line: " + key);
    out << "meta " << key << " " << value << "\n";
  }
  for (const auto& [name, t] : checkpoint.params) {
    out << "tensor " << name << " " << t.rank();
    for (std::size_t d : t.shape()) out << " " << d;
    out << "\n";
  }
  out << "end\n";
  for (const auto& [name, t] : checkpoint.params) {
    for (double v : t.values()) put_le32(out, static_cast<float>(v));
  }
  require(static_cast<bool>(out), ErrorKind::kData, "failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kData, "cannot open checkpoint " + path);
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  Checkpoint ck;
  std::vector<std::pair<std::string, Shape>> layout;
  std::size_t pos = 0;
  bool ended = false;
  int line_no = 0;
  while (!ended) {
    const std::size_t nl = contents.find('\n', pos);
    if (nl == std::string::npos) bad(path, "truncated header");
    const std::string line = contents.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (line_no == 1) {
      if (line != kMagic) bad(path, "missing magic line");
    } else if (key == "version") {
      int version = 0;
      ls >> version;
      if (version != kCheckpointVersion) bad(path, "unsupported version " + std::to_string(version));
    } else if (key == "precision") {
      std::string p;
      ls >> p;
      ck.precision = parse_precision(p);
    } else if (key == "meta") {
      std::string k;
      ls >> k;
      std::string v;
      std::getline(ls, v);
      if (!v.empty() && v[0] == ' ') v.erase(0, 1);
      ck.meta[k] = v;
    } else if (key == "tensor") {
      std::string name;
      std::size_t rank = 0;
      ls >> name >> rank;
      Shape shape(rank);
      for (auto& d : shape) ls >> d;
      if (!ls || name.empty() || rank == 0) bad(path, "malformed tensor line " + std::to_string(line_no));
      layout.emplace_back(name, shape);
    } else if (key == "end") {
      ended = true;
    } else {
      bad(path, "unknown header line " + std::to_string(line_no) + ": " + line);
    }
  }

  std::size_t expected = 0;
  for (const auto& [_, shape] : layout) expected += shape_size(shape) * 4;
  const std::size_t actual = contents.size() - pos;
  if (actual != expected) {
    bad(path, "payload is " + std::to_string(actual) + " bytes, header declares " +
                  std::to_string(expected));
  }
  const auto* data = reinterpret_cast<const unsigned char*>(contents.data() + pos);
  for (const auto& [name, shape] : layout) {
    Tensor t(shape);
    for (double& v : t.values()) {
      v = static_cast<double>(get_le32(data));
      data += 4;
    }
    ck.params.add(name, std::move(t));
  }
  return ck;
}

}  // namespace opsum
