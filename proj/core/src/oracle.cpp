#include "redattack/oracle.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "redattack/error.hpp"

namespace redattack {

using json = nlohmann::json;

// --- BudgetedOracle -------------------------------------------------------

BudgetedOracle::BudgetedOracle(ClassifierOracle& inner, std::size_t max_queries)
    : inner_(inner), max_queries_(max_queries) {}

Label BudgetedOracle::classify(const ImageTensor& image) {
  if (queries_used_ >= max_queries_) throw BudgetExhausted();
  // The unit is charged before the inner call: a query that throws still
  // reached the model.
  ++queries_used_;
  const Label label = inner_.classify(image);
  if (observer_) observer_(queries_used_, image, label);
  return label;
}

// --- LinearOracle ---------------------------------------------------------

LinearOracle::LinearOracle(std::vector<double> weights, double bias, Label negative_side,
                           Label positive_side)
    : weights_(std::move(weights)), bias_(bias), negative_(negative_side), positive_(positive_side) {
  if (weights_.empty()) throw std::invalid_argument("LinearOracle needs at least one weight");
  if (negative_ == positive_) throw std::invalid_argument("LinearOracle sides need distinct labels");
}

double LinearOracle::score(const ImageTensor& image) const {
  if (image.size() != weights_.size()) {
    throw ShapeMismatch("LinearOracle expects " + std::to_string(weights_.size()) +
                        " pixels, got " + std::to_string(image.size()));
  }
  auto p = image.pixels();
  double s = bias_;
  for (std::size_t i = 0; i < p.size(); ++i) s += weights_[i] * p[i];
  return s;
}

Label LinearOracle::classify(const ImageTensor& image) {
  return score(image) >= 0.0 ? positive_ : negative_;
}

std::size_t LinearOracle::num_classes() const {
  return static_cast<std::size_t>(std::max(negative_.id, positive_.id)) + 1;
}

// --- NearestCentroidOracle ------------------------------------------------

NearestCentroidOracle::NearestCentroidOracle(std::vector<Centroid> centroids)
    : centroids_(std::move(centroids)) {
  if (centroids_.size() < 2) throw std::invalid_argument("need at least two centroids");
  for (const auto& c : centroids_) {
    if (c.image.shape() != centroids_.front().image.shape()) {
      throw ShapeMismatch("centroid shapes differ");
    }
  }
}

Label NearestCentroidOracle::classify(const ImageTensor& image) {
  const Centroid* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& c : centroids_) {
    const double d = l2_sq_dist(image, c.image);
    if (d < best_d) {
      best_d = d;
      best = &c;
    }
  }
  return best->label;
}

std::size_t NearestCentroidOracle::num_classes() const {
  std::uint32_t m = 0;
  for (const auto& c : centroids_) m = std::max(m, c.label.id);
  return static_cast<std::size_t>(m) + 1;
}

// --- MlpOracle ------------------------------------------------------------

MlpOracle::MlpOracle(std::vector<DenseLayer> layers, std::size_t num_classes,
                     std::optional<Shape> input_shape)
    : layers_(std::move(layers)), num_classes_(num_classes), input_shape_(input_shape) {
  if (layers_.empty()) throw DimensionChainError("MLP has no layers");
  if (num_classes_ == 0) throw DimensionChainError("num_classes must be positive");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.rows == 0 || l.cols == 0) {
      throw DimensionChainError("layer " + std::to_string(i) + " has a zero dimension");
    }
    if (l.weights.size() != l.rows * l.cols) {
      throw DimensionChainError("layer " + std::to_string(i) + ": weights has " +
                                std::to_string(l.weights.size()) + " entries, expected " +
                                std::to_string(l.rows * l.cols));
    }
    if (l.bias.size() != l.rows) {
      throw DimensionChainError("layer " + std::to_string(i) + ": bias length " +
                                std::to_string(l.bias.size()) + " != rows " +
                                std::to_string(l.rows));
    }
    if (i > 0 && layers_[i - 1].rows != l.cols) {
      throw DimensionChainError("layer " + std::to_string(i) + " expects " +
                                std::to_string(l.cols) + " inputs but layer " +
                                std::to_string(i - 1) + " produces " +
                                std::to_string(layers_[i - 1].rows));
    }
  }
  if (layers_.back().rows != num_classes_) {
    throw DimensionChainError("final layer width " + std::to_string(layers_.back().rows) +
                              " != num_classes " + std::to_string(num_classes_));
  }
  if (input_shape_ && input_shape_->size() != layers_.front().cols) {
    throw DimensionChainError("input_shape " + input_shape_->str() + " has " +
                              std::to_string(input_shape_->size()) +
                              " pixels but the first layer takes " +
                              std::to_string(layers_.front().cols));
  }
}

std::vector<double> MlpOracle::logits(const ImageTensor& image) const {
  if (input_shape_ && image.shape() != *input_shape_) {
    throw ShapeMismatch("MLP expects shape " + input_shape_->str() + ", got " +
                        image.shape().str());
  }
  if (image.size() != layers_.front().cols) {
    throw ShapeMismatch("MLP expects " + std::to_string(layers_.front().cols) +
                        " pixels, got " + std::to_string(image.size()));
  }
  std::vector<double> x(image.pixels().begin(), image.pixels().end());
  std::vector<double> y;
  for (const auto& l : layers_) {
    y.assign(l.rows, 0.0);
    for (std::size_t r = 0; r < l.rows; ++r) {
      const double* w = l.weights.data() + r * l.cols;
      double s = l.bias[r];
      for (std::size_t c = 0; c < l.cols; ++c) s += w[c] * x[c];
      y[r] = (l.activation == Activation::kRelu) ? std::max(0.0, s) : s;
    }
    x.swap(y);
  }
  return x;
}

Label MlpOracle::classify(const ImageTensor& image) {
  const auto out = logits(image);
  // max_element returns the first maximum, which is the lowest-index tie-break.
  const auto it = std::max_element(out.begin(), out.end());
  return Label{static_cast<std::uint32_t>(it - out.begin())};
}

// --- file formats ---------------------------------------------------------

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOFailure("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

Shape parse_shape(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ParseError(what + ": shape must be [H, W, C]");
  try {
    Shape s{j[0].get<std::size_t>(), j[1].get<std::size_t>(), j[2].get<std::size_t>()};
    if (s.size() == 0) throw ParseError(what + ": shape has a zero dimension");
    return s;
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

template <typename T>
T field(const json& obj, const char* key, const std::string& what) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(what + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(what + ": field '" + key + "': " + e.what());
  }
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "identity" || name == "linear") return Activation::kIdentity;
  throw ParseError("unknown activation '" + name + "'");
}

}  // namespace

MlpOracle parse_mlp(const std::string& text) {
  const json doc = parse_json(text, "mlp");
  const auto num_classes = field<std::size_t>(doc, "num_classes", "mlp");
  std::optional<Shape> input_shape;
  if (doc.contains("input_shape")) input_shape = parse_shape(doc["input_shape"], "mlp input_shape");
  if (!doc.contains("layers") || !doc["layers"].is_array()) {
    throw ParseError("mlp: 'layers' must be a list");
  }
  std::vector<DenseLayer> layers;
  for (const auto& jl : doc["layers"]) {
    DenseLayer l;
    l.rows = field<std::size_t>(jl, "rows", "mlp layer");
    l.cols = field<std::size_t>(jl, "cols", "mlp layer");
    l.activation = parse_activation(field<std::string>(jl, "activation", "mlp layer"));
    l.weights = field<std::vector<double>>(jl, "weights", "mlp layer");
    l.bias = field<std::vector<double>>(jl, "bias", "mlp layer");
    layers.push_back(std::move(l));
  }
  return MlpOracle(std::move(layers), num_classes, input_shape);
}

MlpOracle load_mlp(const std::filesystem::path& path) { return parse_mlp(read_text(path)); }

LinearOracle load_linear(const std::filesystem::path& path) {
  const json doc = parse_json(read_text(path), "linear");
  auto weights = field<std::vector<double>>(doc, "weights", "linear");
  const auto bias = field<double>(doc, "bias", "linear");
  Label neg{0}, pos{1};
  if (doc.contains("labels")) {
    const auto labels = field<std::vector<std::uint32_t>>(doc, "labels", "linear");
    if (labels.size() != 2) throw ParseError("linear: 'labels' must be [negative, positive]");
    neg = Label{labels[0]};
    pos = Label{labels[1]};
  }
  if (doc.contains("input_shape")) {
    const Shape s = parse_shape(doc["input_shape"], "linear input_shape");
    if (s.size() != weights.size()) {
      throw DimensionChainError("linear: input_shape has " + std::to_string(s.size()) +
                                " pixels but there are " + std::to_string(weights.size()) +
                                " weights");
    }
  }
  return LinearOracle(std::move(weights), bias, neg, pos);
}

NearestCentroidOracle load_centroids(const std::filesystem::path& path) {
  const json doc = parse_json(read_text(path), "centroid");
  if (!doc.contains("centroids") || !doc["centroids"].is_array()) {
    throw ParseError("centroid: 'centroids' must be a list");
  }
  std::vector<NearestCentroidOracle::Centroid> cs;
  for (const auto& jc : doc["centroids"]) {
    const Shape s = parse_shape(jc.value("shape", json()), "centroid shape");
    const double range = jc.value("range", 1.0);
    auto pixels = field<std::vector<double>>(jc, "pixels", "centroid");
    cs.push_back({Label{field<std::uint32_t>(jc, "label", "centroid")},
                  ImageTensor(s, std::move(pixels), range)});
  }
  return NearestCentroidOracle(std::move(cs));
}

// --- external process -----------------------------------------------------

std::string encode_oracle_request(const ImageTensor& image) {
  const Shape& s = image.shape();
  json j;
  j["shape"] = {s.height, s.width, s.channels};
  j["range"] = image.range();
  j["pixels"] = std::vector<double>(image.pixels().begin(), image.pixels().end());
  return j.dump() + "\n";
}

Label decode_oracle_response(const std::string& line, std::size_t num_classes) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ExternalProtocolError("malformed response '" + line + "': " + e.what());
  }
  if (!j.is_object() || !j.contains("label") || !j["label"].is_number_integer()) {
    throw ExternalProtocolError("response lacks an integer 'label': " + line);
  }
  const auto v = j["label"].get<std::int64_t>();
  if (v < 0 || static_cast<std::uint64_t>(v) >= num_classes) {
    throw ExternalProtocolError("label " + std::to_string(v) + " outside [0, " +
                                std::to_string(num_classes) + ")");
  }
  return Label{static_cast<std::uint32_t>(v)};
}

ExternalOracle::ExternalOracle(std::string command, std::size_t num_classes)
    : command_(std::move(command)), num_classes_(num_classes) {
  if (num_classes_ == 0) throw std::invalid_argument("external oracle needs num_classes > 0");
  // A child that dies mid-request must surface as an error, not kill us.
  ::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw IOFailure(std::string("pipe: ") + std::strerror(errno));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw IOFailure(std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw IOFailure(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ExternalOracle::~ExternalOracle() { shutdown(); }

void ExternalOracle::shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
    pid_ = -1;
  }
}

void ExternalOracle::write_all(const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ExternalProtocolError("write to '" + command_ + "' failed: " + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string ExternalOracle::read_line() {
  for (;;) {
    const auto nl = read_buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = read_buffer_.substr(0, nl);
      read_buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    char buf[4096];
    const ssize_t n = ::read(from_child_, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ExternalProtocolError("read from '" + command_ + "' failed: " + std::strerror(errno));
    }
    if (n == 0) throw ExternalProtocolError("'" + command_ + "' closed its output");
    read_buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

Label ExternalOracle::classify(const ImageTensor& image) {
  if (to_child_ < 0) throw ExternalProtocolError("external oracle is not running");
  write_all(encode_oracle_request(image));
  return decode_oracle_response(read_line(), num_classes_);
}

// --- spec dispatch --------------------------------------------------------

std::unique_ptr<ClassifierOracle> make_oracle(const std::string& spec,
                                              std::size_t external_num_classes) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("oracle spec '" + spec + "' must be KIND:ARG");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (arg.empty()) throw std::invalid_argument("oracle spec '" + spec + "' has an empty argument");
  if (kind == "linear") return std::make_unique<LinearOracle>(load_linear(arg));
  if (kind == "centroid") return std::make_unique<NearestCentroidOracle>(load_centroids(arg));
  if (kind == "mlp") return std::make_unique<MlpOracle>(load_mlp(arg));
  if (kind == "exec") return std::make_unique<ExternalOracle>(arg, external_num_classes);
  throw std::invalid_argument("unknown oracle kind '" + kind +
                              "' (expected linear, centroid, mlp or exec)");
}

}  // namespace redattack
