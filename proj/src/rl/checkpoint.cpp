#include "crosstwin/rl/checkpoint.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "crosstwin/errors.hpp"

namespace crosstwin::rl {

namespace {

constexpr const char* kMagic = "crosstwin-checkpoint v1";

std::string hex(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

void write_layers(std::ostream& os, const char* name, const LayerList& layers) {
  os << "network " << name << ' ' << layers.size() << '\n';
  for (const auto& layer : layers) {
    os << "layer " << layer.weight.rows() << ' ' << layer.weight.cols() << '\n';
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) os << (c ? " " : "") << hex(layer.weight(r, c));
      os << '\n';
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) os << (r ? " " : "") << hex(layer.bias[r]);
    os << '\n';
  }
}

class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw ValidityError("checkpoint truncated");
    return w;
  }
  void expect(const std::string& w) {
    const auto got = word();
    if (got != w) throw ValidityError("checkpoint: expected '" + w + "', found '" + got + "'");
  }
  std::size_t count() {
    const auto w = word();
    char* end = nullptr;
    const auto v = std::strtoull(w.c_str(), &end, 10);
    if (*end != '\0') throw ValidityError("checkpoint: bad integer '" + w + "'");
    return static_cast<std::size_t>(v);
  }
  double real() {
    const auto w = word();
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (*end != '\0') throw ValidityError("checkpoint: bad number '" + w + "'");
    return v;
  }
  std::vector<std::size_t> widths() {
    std::vector<std::size_t> out(count());
    for (auto& w : out) w = count();
    return out;
  }

 private:
  std::istringstream in_;
};

void read_layers(Reader& r, const char* name, LayerList& layers) {
  r.expect("network");
  r.expect(name);
  if (r.count() != layers.size()) throw ValidityError(std::string("checkpoint: layer count mismatch in ") + name);
  for (auto& layer : layers) {
    r.expect("layer");
    const auto rows = r.count();
    const auto cols = r.count();
    if (static_cast<Eigen::Index>(rows) != layer.weight.rows() ||
        static_cast<Eigen::Index>(cols) != layer.weight.cols()) {
      throw ValidityError(std::string("checkpoint: layer shape mismatch in ") + name);
    }
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) layer.weight(i, j) = r.real();
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = r.real();
  }
}

std::vector<std::size_t> hidden_widths(const Mlp& net) {
  std::vector<std::size_t> out;
  const auto& layers = net.layers();
  for (std::size_t k = 0; k + 1 < layers.size(); ++k) out.push_back(static_cast<std::size_t>(layers[k].weight.rows()));
  return out;
}

void write_widths(std::ostream& os, const char* name, const std::vector<std::size_t>& widths) {
  os << name << ' ' << widths.size();
  for (auto w : widths) os << ' ' << w;
  os << '\n';
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string serialize_checkpoint(const Checkpoint& ck) {
  std::ostringstream os;
  const auto& shape = ck.policy.shape();
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, ck.config_hash);
  os << kMagic << '\n';
  os << "config_hash " << hash << '\n';
  os << "shape " << shape.observation_size << ' ' << shape.joint_count << ' ' << shape.max_horizon << '\n';
  write_widths(os, "trunk", shape.trunk_widths);
  write_widths(os, "value", hidden_widths(ck.reward_head.network()));
  write_layers(os, "policy", ck.policy.parameters());
  write_layers(os, "reward_value", ck.reward_head.network().layers());
  write_layers(os, "cost_value", ck.cost_head.network().layers());
  os << "end\n";
  return os.str();
}

Checkpoint parse_checkpoint(const std::string& text) {
  const std::string magic = kMagic;
  if (text.compare(0, magic.size(), magic) != 0) throw ValidityError("not a crosstwin checkpoint (bad header)");
  Reader r(text.substr(magic.size()));
  Checkpoint ck;
  r.expect("config_hash");
  const auto hash = r.word();
  char* end = nullptr;
  ck.config_hash = std::strtoull(hash.c_str(), &end, 16);
  if (*end != '\0') throw ValidityError("checkpoint: bad config hash");
  r.expect("shape");
  PolicyShape shape;
  shape.observation_size = r.count();
  shape.joint_count = r.count();
  shape.max_horizon = r.count();
  r.expect("trunk");
  shape.trunk_widths = r.widths();
  r.expect("value");
  const auto value_widths = r.widths();
  if (shape.observation_size == 0 || shape.joint_count == 0 || shape.max_horizon == 0 || value_widths.empty()) {
    throw ValidityError("checkpoint: degenerate network shape");
  }
  ck.policy = TwoBranchPolicy(shape);
  ck.reward_head = ValueHead(shape.observation_size, value_widths);
  ck.cost_head = ValueHead(shape.observation_size, value_widths);
  read_layers(r, "policy", ck.policy.parameters());
  read_layers(r, "reward_value", ck.reward_head.network().layers());
  read_layers(r, "cost_value", ck.cost_head.network().layers());
  r.expect("end");
  return ck;
}

}  // namespace crosstwin::rl
