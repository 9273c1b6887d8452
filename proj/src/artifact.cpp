#include "brightside/artifact.hpp"

#include <bit>
#include <cstring>
#include <numeric>

#include "brightside/error.hpp"
#include "brightside/hash.hpp"

namespace brightside {

namespace {

using json = nlohmann::json;

constexpr std::string_view kB64 =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

[[noreturn]] void corrupt(const std::string& what) { throw Error(Errc::CorruptArtifact, what); }

std::string encode_doubles(const std::vector<double>& values) {
  std::string bytes(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int k = 0; k < 8; ++k)
      bytes[i * 8 + static_cast<std::size_t>(k)] = static_cast<char>((bits >> (8 * k)) & 0xFF);
  }
  return base64_encode(bytes);
}

std::vector<double> decode_doubles(std::string_view text) {
  const std::string bytes = base64_decode(text);
  if (bytes.size() % 8 != 0) corrupt("array payload is not a whole number of float64 values");
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + static_cast<std::size_t>(k)]))
              << (8 * k);
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

NamedArray from_matrix(std::string name, const Eigen::MatrixXd& m) {
  NamedArray a;
  a.name = std::move(name);
  a.shape = {m.rows(), m.cols()};
  a.values.resize(static_cast<std::size_t>(m.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      a.values.data(), m.rows(), m.cols()) = m;
  return a;
}

NamedArray from_vector(std::string name, const Eigen::VectorXd& v) {
  NamedArray a;
  a.name = std::move(name);
  a.shape = {v.size()};
  a.values.assign(v.data(), v.data() + v.size());
  return a;
}

Eigen::MatrixXd to_matrix(const NamedArray& a) {
  if (a.shape.size() != 2) corrupt("array '" + a.name + "' must be two-dimensional");
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      a.values.data(), a.shape[0], a.shape[1]);
}

Eigen::VectorXd to_vector(const NamedArray& a) {
  if (a.shape.size() != 1) corrupt("array '" + a.name + "' must be one-dimensional");
  return Eigen::Map<const Eigen::VectorXd>(a.values.data(), a.shape[0]);
}

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "sigmoid") return Activation::Sigmoid;
  if (s == "identity") return Activation::Identity;
  corrupt("unknown activation '" + s + "'");
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Identity: return "identity";
  }
  return "identity";
}

}  // namespace

std::string_view model_type_name(ModelType t) noexcept {
  switch (t) {
    case ModelType::Mlp: return "mlp";
    case ModelType::Lstm: return "lstm";
    case ModelType::Svm: return "svm";
    case ModelType::Ordinal: return "ordinal";
  }
  return "unknown";
}

std::optional<ModelType> parse_model_type(std::string_view name) {
  if (name == "mlp") return ModelType::Mlp;
  if (name == "lstm") return ModelType::Lstm;
  if (name == "svm") return ModelType::Svm;
  if (name == "ordinal") return ModelType::Ordinal;
  return std::nullopt;
}

const NamedArray& ModelArtifact::array(std::string_view name) const {
  for (const auto& a : arrays)
    if (a.name == name) return a;
  corrupt("artifact lacks array '" + std::string(name) + "'");
}

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    std::uint32_t n = (static_cast<unsigned char>(bytes[i]) << 16) |
                      (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                      static_cast<unsigned char>(bytes[i + 2]);
    out += kB64[(n >> 18) & 63];
    out += kB64[(n >> 12) & 63];
    out += kB64[(n >> 6) & 63];
    out += kB64[n & 63];
  }
  if (const auto rem = bytes.size() - i; rem > 0) {
    std::uint32_t n = static_cast<unsigned char>(bytes[i]) << 16;
    if (rem == 2) n |= static_cast<unsigned char>(bytes[i + 1]) << 8;
    out += kB64[(n >> 18) & 63];
    out += kB64[(n >> 12) & 63];
    out += rem == 2 ? kB64[(n >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) corrupt("base64 length is not a multiple of 4");
  auto value = [](char c) -> int {
    auto pos = kB64.find(c);
    return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
  };
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      char c = text[i + static_cast<std::size_t>(k)];
      if (c == '=' && last && k >= 2) {
        v[k] = 0;
        ++pad;
      } else {
        if (pad > 0) corrupt("base64 padding in the middle of a quantum");
        v[k] = value(c);
        if (v[k] < 0) corrupt("invalid base64 character");
      }
    }
    std::uint32_t n = (static_cast<std::uint32_t>(v[0]) << 18) | (static_cast<std::uint32_t>(v[1]) << 12) |
                      (static_cast<std::uint32_t>(v[2]) << 6) | static_cast<std::uint32_t>(v[3]);
    out += static_cast<char>((n >> 16) & 0xFF);
    if (pad < 2) out += static_cast<char>((n >> 8) & 0xFF);
    if (pad < 1) out += static_cast<char>(n & 0xFF);
  }
  return out;
}

json to_json(const ModelArtifact& a) {
  json arrays = json::array();
  for (const auto& arr : a.arrays)
    arrays.push_back({{"name", arr.name}, {"shape", arr.shape}, {"values", encode_doubles(arr.values)}});
  return {{"format_version", a.format_version},
          {"model_type", std::string(model_type_name(a.model_type))},
          {"hyperparams", a.hyperparams},
          {"arrays", std::move(arrays)},
          {"vocab_ref", a.vocab_ref},
          {"created_at", a.created_at}};
}

ModelArtifact artifact_from_json(const json& j) {
  try {
    ModelArtifact a;
    a.format_version = j.at("format_version").get<int>();
    if (a.format_version != kArtifactFormatVersion)
      throw Error(Errc::UnsupportedVersion,
                  "unsupported artifact format_version " + std::to_string(a.format_version));
    auto type = parse_model_type(j.at("model_type").get<std::string>());
    if (!type) corrupt("unknown model_type");
    a.model_type = *type;
    a.hyperparams = j.value("hyperparams", json::object());
    a.vocab_ref = j.value("vocab_ref", std::string{});
    a.created_at = j.value("created_at", std::string{});
    for (const auto& arr : j.at("arrays")) {
      NamedArray na;
      na.name = arr.at("name").get<std::string>();
      na.shape = arr.at("shape").get<std::vector<Index>>();
      na.values = decode_doubles(arr.at("values").get<std::string>());
      Index expected = 1;
      for (Index d : na.shape) {
        if (d < 0) corrupt("negative dimension in array '" + na.name + "'");
        expected *= d;
      }
      if (static_cast<std::size_t>(expected) != na.values.size())
        corrupt("array '" + na.name + "' holds " + std::to_string(na.values.size()) +
                " values but its shape needs " + std::to_string(expected));
      a.arrays.push_back(std::move(na));
    }
    return a;
  } catch (const json::exception& e) {
    corrupt(std::string("malformed artifact: ") + e.what());
  }
}

std::string artifact_content_id(const ModelArtifact& a) {
  ModelArtifact copy = a;
  copy.created_at.clear();
  return std::string(model_type_name(a.model_type)) + "-" + to_hex(fnv1a64(to_json(copy).dump()));
}

ModelArtifact to_artifact(const Mlp& m) {
  ModelArtifact a;
  a.model_type = ModelType::Mlp;
  json acts = json::array();
  for (std::size_t k = 0; k < m.layers.size(); ++k) {
    acts.push_back(activation_name(m.layers[k].activation));
    a.arrays.push_back(from_matrix("W" + std::to_string(k), m.layers[k].W));
    a.arrays.push_back(from_vector("b" + std::to_string(k), m.layers[k].b));
  }
  a.hyperparams = {{"activations", acts}, {"input_dim", m.input_dim()}};
  return a;
}

ModelArtifact to_artifact(const LstmParams& m, Index sequence_length) {
  ModelArtifact a;
  a.model_type = ModelType::Lstm;
  a.hyperparams = {{"dropout_rate", m.dropout_rate},
                   {"embed_dim", m.embed_dim()},
                   {"hidden", m.hidden()},
                   {"head", m.W_head.rows()},
                   {"sequence_length", sequence_length}};
  a.arrays.push_back(from_matrix("E", m.embedding));
  const std::pair<Gate, const char*> gates[] = {
      {Gate::Input, "i"}, {Gate::Forget, "f"}, {Gate::Cell, "g"}, {Gate::Output, "o"}};
  for (auto [g, n] : gates) {
    a.arrays.push_back(from_matrix(std::string("W_") + n, m.gate_weights(g)));
    a.arrays.push_back(from_vector(std::string("b_") + n, m.gate_bias(g)));
  }
  a.arrays.push_back(from_matrix("W_head", m.W_head));
  a.arrays.push_back(from_vector("b_head", m.b_head));
  a.arrays.push_back(from_matrix("W_out", m.W_out));
  a.arrays.push_back(from_vector("b_out", m.b_out));
  return a;
}

ModelArtifact to_artifact(const SvmModel& m) {
  ModelArtifact a;
  a.model_type = ModelType::Svm;
  a.hyperparams = {{"lambda", m.lambda}, {"epochs_trained", m.epochs_trained}};
  a.arrays.push_back(from_vector("w", m.w));
  return a;
}

ModelArtifact to_artifact(const OrdinalModel& m) {
  ModelArtifact a;
  a.model_type = ModelType::Ordinal;
  a.hyperparams = {{"classes", kRatingLevels}};
  a.arrays.push_back(from_matrix("W", m.W));
  a.arrays.push_back(from_vector("b", m.b));
  return a;
}

Index artifact_sequence_length(const ModelArtifact& a) {
  return a.hyperparams.value("sequence_length", kDefaultSequenceLength);
}

AnyModel model_from_artifact(const ModelArtifact& a) {
  try {
    switch (a.model_type) {
      case ModelType::Mlp: {
        Mlp m;
        const auto acts = a.hyperparams.at("activations").get<std::vector<std::string>>();
        for (std::size_t k = 0; k < acts.size(); ++k) {
          DenseLayer layer;
          layer.W = to_matrix(a.array("W" + std::to_string(k)));
          layer.b = to_vector(a.array("b" + std::to_string(k)));
          layer.activation = parse_activation(acts[k]);
          if (layer.b.size() != layer.W.rows() ||
              (k > 0 && layer.W.cols() != m.layers.back().W.rows()))
            corrupt("inconsistent MLP layer shapes");
          m.layers.push_back(std::move(layer));
        }
        if (m.layers.empty() || m.layers.back().W.rows() != 1 ||
            m.layers.back().activation != Activation::Sigmoid)
          corrupt("MLP must end in a single sigmoid unit");
        return m;
      }
      case ModelType::Lstm: {
        LstmParams p;
        p.dropout_rate = a.hyperparams.at("dropout_rate").get<double>();
        p.embedding = to_matrix(a.array("E"));
        const Index h = to_vector(a.array("b_i")).size();
        const Index de = p.embedding.cols();
        p.W.resize(4 * h, de + h);
        p.b.resize(4 * h);
        const std::pair<Gate, const char*> gates[] = {
            {Gate::Input, "i"}, {Gate::Forget, "f"}, {Gate::Cell, "g"}, {Gate::Output, "o"}};
        for (auto [g, n] : gates) {
          Eigen::MatrixXd W = to_matrix(a.array(std::string("W_") + n));
          Eigen::VectorXd b = to_vector(a.array(std::string("b_") + n));
          if (W.rows() != h || W.cols() != de + h || b.size() != h)
            corrupt("inconsistent LSTM gate shapes");
          p.gate_weights(g) = W;
          p.gate_bias(g) = b;
        }
        p.W_head = to_matrix(a.array("W_head"));
        p.b_head = to_vector(a.array("b_head"));
        p.W_out = to_matrix(a.array("W_out"));
        p.b_out = to_vector(a.array("b_out"));
        if (p.W_head.cols() != h || p.b_head.size() != p.W_head.rows() || p.W_out.rows() != 1 ||
            p.W_out.cols() != p.W_head.rows() || p.b_out.size() != 1)
          corrupt("inconsistent LSTM head shapes");
        return p;
      }
      case ModelType::Svm: {
        SvmModel m;
        m.w = to_vector(a.array("w"));
        m.lambda = a.hyperparams.value("lambda", 1e-4);
        m.epochs_trained = a.hyperparams.value("epochs_trained", std::size_t{0});
        return m;
      }
      case ModelType::Ordinal: {
        OrdinalModel m;
        m.W = to_matrix(a.array("W"));
        m.b = to_vector(a.array("b"));
        if (m.W.rows() != kRatingLevels || m.b.size() != kRatingLevels)
          corrupt("ordinal model must have five classes");
        return m;
      }
    }
  } catch (const json::exception& e) {
    corrupt(std::string("bad hyperparameters: ") + e.what());
  }
  corrupt("unknown model type");
}

}  // namespace brightside
