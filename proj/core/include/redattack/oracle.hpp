#ifndef REDATTACK_ORACLE_HPP
#define REDATTACK_ORACLE_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "redattack/tensor.hpp"

namespace redattack {

struct Label {
  std::uint32_t id = 0;

  friend bool operator==(const Label&, const Label&) = default;
  friend auto operator<=>(const Label&, const Label&) = default;
};

// Label-only black-box classifier. Implementations must be pure functions
// of the image: classifying the same image twice returns the same label.
class ClassifierOracle {
 public:
  virtual ~ClassifierOracle() = default;

  virtual Label classify(const ImageTensor& image) = 0;
  virtual std::size_t num_classes() const = 0;
};

// Wraps an oracle with a hard query cap. Queries past the cap throw
// BudgetExhausted without touching the inner oracle.
class BudgetedOracle : public ClassifierOracle {
 public:
  // Invoked after every successful query with the 1-based query index.
  using Observer = std::function<void(std::size_t query_index, const ImageTensor&, Label)>;

  BudgetedOracle(ClassifierOracle& inner, std::size_t max_queries);

  Label classify(const ImageTensor& image) override;
  std::size_t num_classes() const override { return inner_.num_classes(); }

  std::size_t max_queries() const { return max_queries_; }
  std::size_t queries_used() const { return queries_used_; }
  std::size_t remaining_budget() const { return max_queries_ - queries_used_; }

  void set_observer(Observer observer) { observer_ = std::move(observer); }

 private:
  ClassifierOracle& inner_;
  std::size_t max_queries_;
  std::size_t queries_used_ = 0;
  Observer observer_;
};

// label = positive_side iff w . x + b >= 0.
class LinearOracle : public ClassifierOracle {
 public:
  LinearOracle(std::vector<double> weights, double bias, Label negative_side = Label{0},
               Label positive_side = Label{1});

  Label classify(const ImageTensor& image) override;
  std::size_t num_classes() const override;

  double score(const ImageTensor& image) const;
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  std::vector<double> weights_;
  double bias_;
  Label negative_;
  Label positive_;
};

// Label of the nearest centroid in squared L2; ties go to the earlier entry.
class NearestCentroidOracle : public ClassifierOracle {
 public:
  struct Centroid {
    Label label;
    ImageTensor image;
  };

  explicit NearestCentroidOracle(std::vector<Centroid> centroids);

  Label classify(const ImageTensor& image) override;
  std::size_t num_classes() const override;

 private:
  std::vector<Centroid> centroids_;
};

enum class Activation { kRelu, kIdentity };

struct DenseLayer {
  std::size_t rows = 0;  // output width
  std::size_t cols = 0;  // input width
  Activation activation = Activation::kIdentity;
  std::vector<double> weights;  // rows x cols, row-major
  std::vector<double> bias;     // rows
};

// Feedforward network: y = act(W x + b) per layer, label = argmax of the
// last layer with ties broken toward the lowest class index.
class MlpOracle : public ClassifierOracle {
 public:
  MlpOracle(std::vector<DenseLayer> layers, std::size_t num_classes,
            std::optional<Shape> input_shape = std::nullopt);

  Label classify(const ImageTensor& image) override;
  std::size_t num_classes() const override { return num_classes_; }

  std::vector<double> logits(const ImageTensor& image) const;
  const std::optional<Shape>& input_shape() const { return input_shape_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

 private:
  std::vector<DenseLayer> layers_;
  std::size_t num_classes_;
  std::optional<Shape> input_shape_;
};

// Talks to a child process over stdin/stdout, one JSON object per line:
//   request  {"shape":[H,W,C],"range":L,"pixels":[...]}
//   response {"label":k}
// The child must answer deterministically. Requests are strictly serialized.
class ExternalOracle : public ClassifierOracle {
 public:
  ExternalOracle(std::string command, std::size_t num_classes);
  ~ExternalOracle() override;

  ExternalOracle(const ExternalOracle&) = delete;
  ExternalOracle& operator=(const ExternalOracle&) = delete;

  Label classify(const ImageTensor& image) override;
  std::size_t num_classes() const override { return num_classes_; }

  const std::string& command() const { return command_; }

 private:
  void write_all(const std::string& data);
  std::string read_line();
  void shutdown();

  std::string command_;
  std::size_t num_classes_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string read_buffer_;
};

std::string encode_oracle_request(const ImageTensor& image);
Label decode_oracle_response(const std::string& line, std::size_t num_classes);

// File loaders. All three formats are JSON documents; see README.
MlpOracle load_mlp(const std::filesystem::path& path);
MlpOracle parse_mlp(const std::string& text);
LinearOracle load_linear(const std::filesystem::path& path);
NearestCentroidOracle load_centroids(const std::filesystem::path& path);

// Resolves a CLI oracle spec: linear:PATH | centroid:PATH | mlp:PATH | exec:COMMAND.
std::unique_ptr<ClassifierOracle> make_oracle(const std::string& spec,
                                              std::size_t external_num_classes = 10);

}  // namespace redattack

#endif  // REDATTACK_ORACLE_HPP
