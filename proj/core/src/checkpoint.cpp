#include "signrec/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "signrec/errors.hpp"

namespace signrec {

namespace {

constexpr char kMagic[4] = {'S', 'R', 'C', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw DataError("truncated checkpoint");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

nlohmann::json config_to_json(const ModelConfig& c) {
  return {{"t_model", c.t_model},
          {"embed_dim", c.embed_dim},
          {"pooling", pooling_name(c.pooling)},
          {"learning_rate", c.learning_rate},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"loss_weights", c.loss_weights},
          {"seed", c.seed}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.t_model = j.at("t_model").get<int>();
  c.embed_dim = j.at("embed_dim").get<int>();
  c.pooling = parse_pooling(j.at("pooling").get<std::string>());
  c.learning_rate = j.at("learning_rate").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.patience = j.at("patience").get<int>();
  c.loss_weights = j.at("loss_weights").get<std::vector<double>>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);

  nlohmann::json header;
  header["config"] = config_to_json(checkpoint.config);
  nlohmann::json heads = nlohmann::json::array();
  for (const HeadSpec& h : checkpoint.heads)
    heads.push_back({{"name", h.name}, {"size", h.size}});
  header["heads"] = std::move(heads);
  header["subset"] = checkpoint.subset_ids;
  header["pooling"] = pooling_name(checkpoint.params.pooling);
  const std::string header_str = header.dump();

  out.write(kMagic, 4);
  write_u32(out, static_cast<std::uint32_t>(header_str.size()));
  out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));

  auto& params = const_cast<ModelParameters&>(checkpoint.params);
  std::uint32_t count = 0;
  params.visit([&](const char*, Eigen::MatrixXf&) { ++count; });
  write_u32(out, count);
  params.visit([&](const char* name, Eigen::MatrixXf& m) {
    const std::string n = name;
    write_u32(out, static_cast<std::uint32_t>(n.size()));
    out.write(n.data(), static_cast<std::streamsize>(n.size()));
    write_u32(out, static_cast<std::uint32_t>(m.rows()));
    write_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      std::uint32_t bits;
      float v = m.data()[i];
      std::memcpy(&bits, &v, 4);
      write_u32(out, bits);
    }
  });
  if (!out) throw DataError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("not a checkpoint file: " + path);

  const std::uint32_t header_len = read_u32(in);
  std::string header_str(header_len, '\0');
  in.read(header_str.data(), header_len);
  if (!in) throw DataError("truncated checkpoint header: " + path);

  Checkpoint checkpoint;
  try {
    const nlohmann::json header = nlohmann::json::parse(header_str);
    checkpoint.config = config_from_json(header.at("config"));
    for (const auto& jh : header.at("heads"))
      checkpoint.heads.push_back(
          {jh.at("name").get<std::string>(), jh.at("size").get<int>()});
    checkpoint.subset_ids = header.at("subset").get<std::vector<int>>();
    checkpoint.params.pooling =
        parse_pooling(header.at("pooling").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint header: " + std::string(e.what()));
  }

  const std::uint32_t count = read_u32(in);
  std::vector<std::pair<std::string, Eigen::MatrixXf>> tensors;
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::uint32_t name_len = read_u32(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const std::uint32_t rows = read_u32(in);
    const std::uint32_t cols = read_u32(in);
    Eigen::MatrixXf m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const std::uint32_t bits = read_u32(in);
      float v;
      std::memcpy(&v, &bits, 4);
      m.data()[i] = v;
    }
    tensors.emplace_back(std::move(name), std::move(m));
  }

  // rebuild the parameter struct from the named tensors
  std::vector<int> head_sizes;
  for (const HeadSpec& h : checkpoint.heads) head_sizes.push_back(h.size);
  auto find = [&](const std::string& name) -> Eigen::MatrixXf& {
    for (auto& [n, m] : tensors)
      if (n == name) return m;
    throw DataError("checkpoint missing tensor: " + name);
  };
  ModelParameters& p = checkpoint.params;
  p.proj_w = find("proj_w");
  p.proj_b = find("proj_b");
  if (p.pooling == Pooling::TemporalAttention) p.attn = find("attn");
  else p.attn = Eigen::MatrixXf::Zero(0, 1);
  p.h1_w = find("h1_w");
  p.h1_b = find("h1_b");
  p.h2_w = find("h2_w");
  p.h2_b = find("h2_b");
  for (std::size_t h = 0; h < head_sizes.size(); ++h) {
    p.head_w.push_back(find("head" + std::to_string(h) + "_w"));
    p.head_b.push_back(find("head" + std::to_string(h) + "_b"));
  }
  if (!p.all_finite()) throw DataError("checkpoint contains non-finite values");
  return checkpoint;
}

}  // namespace signrec
