#include "segrestore/model_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "text_util.hpp"

namespace segrestore {

namespace {

std::string model_error(const std::filesystem::path& path, std::size_t lineno,
                        const std::string& what) {
  return path.string() + " line " + std::to_string(lineno) + ": " + what;
}

}  // namespace

void save_model(const DenseNetwork<double>& net, const std::filesystem::path& path) {
  validate_network(net);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) {
      throw std::runtime_error("save_model: cannot open for writing: " + tmp.string());
    }
    os << kModelMagic << '\n';
    const auto dims = net.dims();
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (i > 0) os << ' ';
      os << dims[i];
    }
    os << '\n';
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      if (l > 0) os << ' ';
      os << activation_name(net.layers[l].activation);
    }
    os << '\n';
    for (const auto& layer : net.layers) {
      for (Eigen::Index r = 0; r < layer.out_dim(); ++r) {
        for (Eigen::Index c = 0; c < layer.in_dim(); ++c) {
          os << detail::format_g17(layer.weights(r, c)) << ' ';
        }
        os << detail::format_g17(layer.biases(r)) << '\n';
      }
    }
    os.flush();
    if (!os) {
      throw std::runtime_error("save_model: write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

DenseNetwork<double> load_model(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("load_model: cannot open: " + path.string());
  }
  std::string line;
  std::size_t lineno = 0;
  const auto next_line = [&]() -> bool {
    if (!std::getline(is, line)) return false;
    ++lineno;
    detail::strip_cr(line);
    return true;
  };
  const auto fail = [&](const std::string& what) -> void {
    throw std::runtime_error(model_error(path, lineno, what));
  };

  if (!next_line()) {
    lineno = 1;
    fail("empty file; expected '" + std::string(kModelMagic) + "'");
  }
  if (line != kModelMagic) {
    if (line.starts_with("segrestore-model ")) {
      fail("unsupported model version '" + line.substr(17) + "'; expected 'v1'");
    }
    fail("not a segrestore model file");
  }

  if (!next_line()) {
    ++lineno;
    fail("missing node-count line");
  }
  std::vector<int> dims;
  for (std::string_view token : detail::split_ws(line)) {
    int d = 0;
    if (!detail::parse_int(token, d) || d < 1) {
      fail("invalid node count '" + std::string(token) + "'");
    }
    dims.push_back(d);
  }
  if (dims.size() < 2) {
    fail("need at least two node counts");
  }
  const std::size_t num_layers = dims.size() - 1;

  if (!next_line()) {
    ++lineno;
    fail("missing activation line");
  }
  const auto tags = detail::split_ws(line);
  if (tags.size() != num_layers) {
    fail("expected " + std::to_string(num_layers) + " activation tags, got " +
         std::to_string(tags.size()));
  }
  std::vector<Activation> activations;
  for (std::string_view tag : tags) {
    const auto act = parse_activation(tag);
    if (!act) {
      fail("unknown activation '" + std::string(tag) + "'");
    }
    activations.push_back(*act);
  }

  DenseNetwork<double> net;
  net.layers.reserve(num_layers);
  for (std::size_t l = 0; l < num_layers; ++l) {
    const int in = dims[l];
    const int out = dims[l + 1];
    DenseLayer<double> layer;
    layer.weights.resize(out, in);
    layer.biases.resize(out);
    layer.activation = activations[l];
    for (int r = 0; r < out; ++r) {
      if (!next_line()) {
        ++lineno;
        fail("unexpected end of file; expected row " + std::to_string(r + 1) +
             " of layer " + std::to_string(l + 1));
      }
      const auto values = detail::split_ws(line);
      if (values.size() != static_cast<std::size_t>(in) + 1) {
        fail("expected " + std::to_string(in + 1) + " values, got " +
             std::to_string(values.size()));
      }
      for (int c = 0; c < in; ++c) {
        if (!detail::parse_double(values[c], layer.weights(r, c))) {
          fail("invalid number '" + std::string(values[c]) + "'");
        }
      }
      if (!detail::parse_double(values[in], layer.biases(r))) {
        fail("invalid number '" + std::string(values[in]) + "'");
      }
      if (!layer.weights.row(r).allFinite() || !std::isfinite(layer.biases(r))) {
        fail("non-finite parameter value");
      }
    }
    net.layers.push_back(std::move(layer));
  }

  while (next_line()) {
    if (!line.empty()) {
      fail("unexpected trailing content");
    }
  }
  validate_network(net);
  return net;
}

}  // namespace segrestore
