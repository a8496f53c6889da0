// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "groupcl/error.hpp"

namespace groupcl {

namespace {

constexpr std::string_view kMagic = "GRPCLCKP";

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <class T>
  void put(T v) {
    v = to_little(v);
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void bytes(std::string_view s) { out_.write(s.data(), static_cast<std::streamsize>(s.size())); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  template <class T>
  T get(const char* what) {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof v);
    if (in_.gcount() != sizeof v) throw CorruptCheckpointError(std::string("checkpoint truncated while reading ") + what);
    return to_little(v);
  }
  std::string bytes(std::uint64_t n, const char* what) {
    if (n > (1u << 30)) throw CorruptCheckpointError(std::string("checkpoint declares an implausible ") + what + " length");
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::uint64_t>(in_.gcount()) != n) {
      throw CorruptCheckpointError(std::string("checkpoint truncated while reading ") + what);
    }
    return s;
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
};

struct Entry {
  std::string name;
  const Matrix* value;
};

std::vector<Entry> table(const ModelState& s) {
  std::vector<Entry> out;
  auto add_all = [&](const char* tag, const ParameterMap& m) {
    for (const auto& [name, v] : m) out.push_back({std::string(tag) + "/" + name, &v});
  };
  add_all("param", s.params);
  add_all("param.m", s.encoder_opt.first_moment);
  add_all("param.v", s.encoder_opt.second_moment);
  add_all("varnet", s.varnet);
  add_all("varnet.m", s.varnet_opt.first_moment);
  add_all("varnet.v", s.varnet_opt.second_moment);
  return out;
}

}  // namespace

void write_checkpoint(const ModelState& s, std::ostream& out) {
  Writer w(out);
  w.bytes(kMagic);
  w.put<std::uint32_t>(kCheckpointVersion);
  const std::string config = s.config.to_text();
  w.put<std::uint64_t>(config.size());
  w.bytes(config);
  w.put<std::uint64_t>(s.feature_dim);
  w.put<std::uint64_t>(s.epoch);
  w.put<std::uint64_t>(s.encoder_opt.step);
  w.put<std::uint64_t>(s.varnet_opt.step);
  const auto entries = table(s);
  w.put<std::uint64_t>(entries.size());
  for (const auto& e : entries) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(e.name.size()));
    w.bytes(e.name);
    w.put<std::uint64_t>(e.value->rows());
    w.put<std::uint64_t>(e.value->cols());
  }
  for (const auto& e : entries)
    for (double v : e.value->data()) w.put<double>(v);
}

ModelState read_checkpoint(std::istream& in) {
  Reader r(in);
  if (r.bytes(kMagic.size(), "magic") != kMagic) throw CorruptCheckpointError("not a checkpoint (bad magic)");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw CorruptCheckpointError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                                 std::to_string(kCheckpointVersion) + ")");
  }
  const std::string text = r.bytes(r.get<std::uint64_t>("config length"), "config");
  std::istringstream config_in(text);

  ModelState s;
  try {
    s.config = RunConfig::from_key_values(parse_key_values(config_in, "checkpoint"));
  } catch (const ConfigError& e) {
    throw CorruptCheckpointError(std::string("checkpoint config invalid: ") + e.what());
  }
  s.feature_dim = r.get<std::uint64_t>("feature_dim");
  s.epoch = r.get<std::uint64_t>("epoch");
  const auto enc_step = r.get<std::uint64_t>("encoder step");
  const auto var_step = r.get<std::uint64_t>("varnet step");

  struct Shape {
    std::string name;
    std::uint64_t rows, cols;
  };
  std::vector<Shape> shapes(r.get<std::uint64_t>("tensor count"));
  for (auto& sh : shapes) {
    sh.name = r.bytes(r.get<std::uint32_t>("name length"), "tensor name");
    sh.rows = r.get<std::uint64_t>("rows");
    sh.cols = r.get<std::uint64_t>("cols");
    if (sh.rows * sh.cols > (1ull << 28)) throw CorruptCheckpointError("tensor '" + sh.name + "' is implausibly large");
  }

  AdamOptions opts;
  opts.learning_rate = s.config.lr;
  s.encoder_opt.options = opts;
  s.varnet_opt.options = opts;
  s.encoder_opt.step = enc_step;
  s.varnet_opt.step = var_step;
  for (const auto& sh : shapes) {
    std::vector<double> values(sh.rows * sh.cols);
    for (double& v : values) v = r.get<double>("tensor payload");
    const auto slash = sh.name.find('/');
    if (slash == std::string::npos) throw CorruptCheckpointError("bad tensor name '" + sh.name + "'");
    const std::string tag = sh.name.substr(0, slash);
    const std::string name = sh.name.substr(slash + 1);
    Matrix m(sh.rows, sh.cols, std::move(values));
    if (tag == "param") s.params[name] = std::move(m);
    else if (tag == "param.m") s.encoder_opt.first_moment[name] = std::move(m);
    else if (tag == "param.v") s.encoder_opt.second_moment[name] = std::move(m);
    else if (tag == "varnet") s.varnet[name] = std::move(m);
    else if (tag == "varnet.m") s.varnet_opt.first_moment[name] = std::move(m);
    else if (tag == "varnet.v") s.varnet_opt.second_moment[name] = std::move(m);
    else throw CorruptCheckpointError("unknown tensor group '" + tag + "'");
  }
  if (!r.at_end()) throw CorruptCheckpointError("checkpoint has trailing bytes");
  return s;
}

void checkpoint_save(const std::filesystem::path& path, const ModelState& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  write_checkpoint(state, out);
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

ModelState checkpoint_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace groupcl
