#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "brightside/features.hpp"
#include "brightside/lstm.hpp"
#include "brightside/mlp.hpp"
#include "brightside/ordinal.hpp"
#include "brightside/svm.hpp"

namespace brightside {

inline constexpr int kArtifactFormatVersion = 1;

enum class ModelType { Mlp, Lstm, Svm, Ordinal };

std::string_view model_type_name(ModelType t) noexcept;
std::optional<ModelType> parse_model_type(std::string_view name);

struct NamedArray {
  std::string name;
  std::vector<Index> shape;
  std::vector<double> values;  // row-major
};

// Serialized form shared by all four stage models.
struct ModelArtifact {
  int format_version = kArtifactFormatVersion;
  ModelType model_type = ModelType::Svm;
  nlohmann::json hyperparams = nlohmann::json::object();
  std::vector<NamedArray> arrays;
  std::string vocab_ref;
  std::string created_at;

  const NamedArray& array(std::string_view name) const;
};

std::string base64_encode(std::string_view bytes);
// Throws Errc::CorruptArtifact on malformed input.
std::string base64_decode(std::string_view text);

nlohmann::json to_json(const ModelArtifact& a);
// Checks the version first (Errc::UnsupportedVersion), then every array's
// value count against its shape (Errc::CorruptArtifact).
ModelArtifact artifact_from_json(const nlohmann::json& j);

// Content id, independent of created_at: "<type>-<16 hex>".
std::string artifact_content_id(const ModelArtifact& a);

using AnyModel = std::variant<Mlp, LstmParams, SvmModel, OrdinalModel>;

ModelArtifact to_artifact(const Mlp& m);
ModelArtifact to_artifact(const LstmParams& m, Index sequence_length);
ModelArtifact to_artifact(const SvmModel& m);
ModelArtifact to_artifact(const OrdinalModel& m);

// Rebuilds the typed model; Errc::CorruptArtifact on missing arrays or
// inconsistent shapes.
AnyModel model_from_artifact(const ModelArtifact& a);

// Sequence length recorded for LSTM artifacts (default 30 otherwise).
Index artifact_sequence_length(const ModelArtifact& a);

}  // namespace brightside
