#include "mcode/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mcode/csv.hpp"
#include "mcode/error.hpp"
#include "mcode/kernels.hpp"

namespace mcode {
namespace {

using kernels::RowMatrix;

std::string shortest(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool parse_double(std::string_view text, double& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

bool parse_count(std::string_view text, std::size_t& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const std::string& lookup_word(const std::string& label, const SubstitutionMap& substitutions) {
  auto it = substitutions.find(label);
  return it == substitutions.end() ? label : it->second;
}

}  // namespace

void TsneParams::validate(std::size_t n) const {
  if (n < 4) throw TsneError("t-SNE needs at least 4 points, got " + std::to_string(n));
  if (!(perplexity > 0.0) || !(early_exaggeration > 0.0) || !(learning_rate > 0.0) || !(init_sigma > 0.0)) {
    throw TsneError("perplexity, early exaggeration, learning rate and init sigma must be positive");
  }
  if (exaggeration_iters < 0 || total_iters < 1 || momentum_switch_iter < 0) {
    throw TsneError("iteration counts must be non-negative (total at least 1)");
  }
  const double limit = (static_cast<double>(n) - 1.0) / 3.0;
  if (!(perplexity < limit)) {
    throw TsneError("perplexity " + shortest(perplexity) + " is infeasible for " + std::to_string(n) +
                    " points (must be below " + shortest(limit) + ")");
  }
}

double Embedding2D::kl_after_exaggeration() const {
  if (kl_trace.empty()) return 0.0;
  if (exaggeration_iters <= 0) return kl_trace.front();
  return kl_trace[std::min<std::size_t>(static_cast<std::size_t>(exaggeration_iters), kl_trace.size()) - 1];
}

Eigen::MatrixX2d initial_layout(std::size_t n, std::uint64_t seed, double sigma) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  Eigen::MatrixX2d y(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    y(i, 0) = normal(rng);
    y(i, 1) = normal(rng);
  }
  return y;
}

Eigen::MatrixXd joint_affinities(const DistanceMatrix& distances, double perplexity) {
  const RowMatrix sq = distances.values.array().square().matrix();
  const auto conditional = kernels::parallel::conditional_affinities(sq, perplexity);
  const double n = static_cast<double>(distances.size());
  return (conditional.p + conditional.p.transpose()) / (2.0 * n);
}

Embedding2D tsne(const DistanceMatrix& distances, const TsneParams& params) {
  return tsne(distances, params, initial_layout(distances.size(), params.seed, params.init_sigma));
}

Embedding2D tsne(const DistanceMatrix& distances, const TsneParams& params, const Eigen::MatrixX2d& initial) {
  const std::size_t n = distances.size();
  params.validate(n);
  check_distance_matrix(distances, 1e-9);
  if (initial.rows() != static_cast<Eigen::Index>(n)) {
    throw TsneError("initial layout has " + std::to_string(initial.rows()) + " rows for " + std::to_string(n) +
                    " points");
  }

  const RowMatrix sq = distances.values.array().square().matrix();
  const auto conditional = params.parallel ? kernels::parallel::conditional_affinities(sq, params.perplexity)
                                           : kernels::serial::conditional_affinities(sq, params.perplexity);
  const RowMatrix p = (conditional.p + conditional.p.transpose()) / (2.0 * static_cast<double>(n));

  const auto gradient = params.parallel ? kernels::parallel::tsne_gradient : kernels::serial::tsne_gradient;
  const auto divergence = params.parallel ? kernels::parallel::kl_divergence : kernels::serial::kl_divergence;

  RowMatrix y = initial;
  RowMatrix update = RowMatrix::Zero(y.rows(), 2);
  RowMatrix gains = RowMatrix::Ones(y.rows(), 2);
  RowMatrix grad;

  Embedding2D result;
  result.labels = distances.labels;
  result.exaggeration_iters = params.exaggeration_iters;
  result.kl_trace.reserve(static_cast<std::size_t>(params.total_iters));

  for (int iter = 0; iter < params.total_iters; ++iter) {
    const double exaggeration = iter < params.exaggeration_iters ? params.early_exaggeration : 1.0;
    const double momentum = iter < params.momentum_switch_iter ? params.initial_momentum : params.final_momentum;
    gradient(p, y, exaggeration, grad);

    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      for (Eigen::Index k = 0; k < 2; ++k) {
        // Delta-bar-delta gains: grow while the step keeps direction.
        const bool flip = (grad(i, k) > 0.0) != (update(i, k) > 0.0);
        gains(i, k) = std::max(flip ? gains(i, k) + 0.2 : gains(i, k) * 0.8, 0.01);
        update(i, k) = momentum * update(i, k) - params.learning_rate * gains(i, k) * grad(i, k);
        y(i, k) += update(i, k);
      }
    }
    double mx = 0.0;
    double my = 0.0;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      mx += y(i, 0);
      my += y(i, 1);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      y(i, 0) -= mx;
      y(i, 1) -= my;
    }
    result.kl_trace.push_back(divergence(p, y));
  }
  result.coordinates = y;
  return result;
}

PcaReduction pca_reduce(const Eigen::MatrixXd& vectors, std::size_t target_dims) {
  const auto n = static_cast<std::size_t>(vectors.rows());
  const auto d = static_cast<std::size_t>(vectors.cols());
  if (n == 0 || d == 0) throw Error("Pca", "PCA input is empty");
  if (target_dims == 0 || target_dims > std::min(n, d)) {
    throw Error("Pca", "target dimensionality " + std::to_string(target_dims) + " must be in [1, min(n, d)] = [1, " +
                           std::to_string(std::min(n, d)) + "]");
  }

  PcaReduction out;
  out.mean = vectors.colwise().mean().transpose();
  const Eigen::MatrixXd centered = vectors.rowwise() - out.mean.transpose();
  Eigen::MatrixXd cov;
  if (n > 1) {
    kernels::parallel::covariance(centered, cov);
  } else {
    cov = Eigen::MatrixXd::Zero(vectors.cols(), vectors.cols());
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const auto k = static_cast<Eigen::Index>(target_dims);
  const Eigen::Index dd = vectors.cols();
  out.eigenvalues = solver.eigenvalues().reverse().cwiseMax(0.0);
  out.components.resize(dd, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::VectorXd v = solver.eigenvectors().col(dd - 1 - c);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    out.components.col(c) = v;
  }
  out.reduced = centered * out.components;
  const double total = out.eigenvalues.sum();
  out.explained_variance_ratio =
      total > 0.0 ? Eigen::VectorXd(out.eigenvalues.head(k) / total) : Eigen::VectorXd::Zero(k);
  return out;
}

void WordVectorTable::add(std::string word, std::vector<double> vec) {
  if (word.empty()) throw Error("WordVectors", "empty word");
  if (vec.empty()) throw Error("WordVectors", "word '" + word + "' has no values");
  if (!words_.empty() && vec.size() != dimension_) {
    throw Error("WordVectors", "word '" + word + "' has " + std::to_string(vec.size()) + " values, expected " +
                                   std::to_string(dimension_));
  }
  if (index_.contains(word)) throw Error("WordVectors", "duplicate word '" + word + "'");
  dimension_ = vec.size();
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  vectors_.push_back(std::move(vec));
}

const std::vector<double>* WordVectorTable::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? nullptr : &vectors_[it->second];
}

WordVectorTable read_word_vectors(std::istream& in) {
  WordVectorTable table;
  std::optional<std::size_t> expected_count;
  std::optional<std::size_t> expected_dim;
  std::string raw;
  std::size_t line = 0;
  bool first = true;
  while (std::getline(in, raw)) {
    ++line;
    const auto tokens = split_ws(raw);
    if (tokens.empty()) continue;
    if (first) {
      first = false;
      std::size_t count = 0;
      std::size_t dim = 0;
      if (tokens.size() == 2 && parse_count(tokens[0], count) && parse_count(tokens[1], dim)) {
        if (dim == 0) throw ParseError("WordVectors", line, "header declares dimension 0");
        expected_count = count;
        expected_dim = dim;
        continue;
      }
    }
    std::vector<double> values;
    values.reserve(tokens.size() - 1);
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      double v = 0.0;
      if (!parse_double(tokens[k], v)) {
        throw ParseError("WordVectors", line, "value '" + std::string(tokens[k]) + "' is not a finite number");
      }
      values.push_back(v);
    }
    const std::size_t dim = expected_dim ? *expected_dim : (table.size() ? table.dimension() : values.size());
    if (values.size() != dim) {
      throw ParseError("WordVectors", line, "dimension mismatch: '" + std::string(tokens[0]) + "' has " +
                                                std::to_string(values.size()) + " values, expected " +
                                                std::to_string(dim));
    }
    if (table.find(tokens[0])) {
      throw ParseError("WordVectors", line, "duplicate word '" + std::string(tokens[0]) + "'");
    }
    table.add(std::string(tokens[0]), std::move(values));
  }
  if (expected_count && *expected_count != table.size()) {
    throw ParseError("WordVectors", std::nullopt, "header declares " + std::to_string(*expected_count) +
                                                       " words but the file has " + std::to_string(table.size()));
  }
  return table;
}

WordVectorTable parse_word_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word vectors '" + path.string() + "'");
  return read_word_vectors(in);
}

void write_word_vectors(std::ostream& out, const WordVectorTable& table, bool header) {
  if (header) out << table.size() << ' ' << table.dimension() << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.words()[i];
    for (double v : table.vector(i)) out << ' ' << shortest(v);
    out << '\n';
  }
}

SubstitutionMap read_substitutions(std::istream& in) {
  SubstitutionMap map;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty() || raw.front() == '#') continue;
    const auto tab = raw.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == raw.size()) {
      throw ParseError("Substitutions", line, "expected 'label<TAB>word'");
    }
    if (!map.emplace(raw.substr(0, tab), raw.substr(tab + 1)).second) {
      throw ParseError("Substitutions", line, "duplicate label '" + raw.substr(0, tab) + "'");
    }
  }
  return map;
}

SubstitutionMap load_substitutions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open substitutions '" + path.string() + "'");
  return read_substitutions(in);
}

const SubstitutionMap& default_substitutions() {
  static const SubstitutionMap map = {
      {"press (button)", "press"},
      {"open (jar)", "open"},
      {"close (jar)", "close"},
      {"turn (key, knob)", "turn"},
      {"push (rigid)", "push"},
      {"flip (hand)", "flip"},
      {"flip (turner, spatula)", "flip"},
      {"spread (surface)", "spread"},
      {"wipe (surface)", "wipe"},
      {"open (door)", "open"},
      {"close (door)", "close"},
      {"move (2D)", "move"},
      {"insert (placing)", "insert"},
      {"pick-and-place", "move"},
      {"fasten (screw)", "fasten"},
      {"loosen (screw)", "loosen"},
      {"shake (revolute)", "shake"},
      {"shake (prismatic)", "shake"},
      {"scoop (liquid)", "scoop"},
      {"crack (egg)", "crack"},
      {"squeeze (in hand, elastic)", "squeeze"},
      {"beat (liquid)", "beat"},
      {"mix (liquid)", "mix"},
      {"stir (liquid)", "stir"},
      {"squeeze (in hand)", "squeeze"},
      {"pull apart", "tear"},
      {"peel (hand)", "peel"},
      {"cut (2D)", "cut"},
      {"slice (2D)", "slice"},
      {"spread (brush)", "spread"},
      {"brush (surface)", "brush"},
      {"sweep (surface)", "sweep"},
  };
  return map;
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error("WordVectors", "cosine distance between vectors of different length");
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw Error("WordVectors", "cosine distance of a zero vector");
  return std::clamp(1.0 - dot / std::sqrt(uu * vv), 0.0, 2.0);
}

DistanceMatrix cosine_distance_matrix(const WordVectorTable& table, const std::vector<std::string>& labels,
                                      const SubstitutionMap& substitutions) {
  std::vector<const std::vector<double>*> vecs;
  vecs.reserve(labels.size());
  for (const auto& label : labels) {
    const std::string& word = lookup_word(label, substitutions);
    const auto* v = table.find(word);
    if (!v) {
      throw Error("WordVectors", word == label ? "no vector for '" + label + "'"
                                               : "no vector for '" + label + "' (looked up as '" + word + "')");
    }
    vecs.push_back(v);
  }
  DistanceMatrix m;
  m.labels = labels;
  const auto n = static_cast<Eigen::Index>(labels.size());
  m.values = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = vecs[i] == vecs[j] ? 0.0 : cosine_distance(*vecs[i], *vecs[j]);
      m.values(i, j) = d;
      m.values(j, i) = d;
    }
  }
  return m;
}

DistanceMatrix reduced_cosine_distance_matrix(const WordVectorTable& table, const std::vector<std::string>& labels,
                                              const SubstitutionMap& substitutions, std::size_t max_dims) {
  std::vector<std::string> words;
  for (const auto& label : labels) {
    const std::string& word = lookup_word(label, substitutions);
    if (!table.find(word)) {
      throw Error("WordVectors", word == label ? "no vector for '" + label + "'"
                                               : "no vector for '" + label + "' (looked up as '" + word + "')");
    }
    if (std::find(words.begin(), words.end(), word) == words.end()) words.push_back(word);
  }
  Eigen::MatrixXd data(static_cast<Eigen::Index>(words.size()), static_cast<Eigen::Index>(table.dimension()));
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& v = *table.find(words[i]);
    for (std::size_t k = 0; k < v.size(); ++k) data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v[k];
  }
  const std::size_t dims = std::min({max_dims, words.size(), table.dimension()});
  const auto pca = pca_reduce(data, dims);
  WordVectorTable reduced;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto row = pca.reduced.row(static_cast<Eigen::Index>(i));
    reduced.add(words[i], std::vector<double>(row.begin(), row.end()));
  }
  return cosine_distance_matrix(reduced, labels, substitutions);
}

void write_embedding_csv(std::ostream& out, const Embedding2D& embedding) {
  csv::write_row(out, {"label", "x", "y"});
  for (std::size_t i = 0; i < embedding.labels.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    csv::write_row(out, {embedding.labels[i], csv::fixed(embedding.coordinates(r, 0), 6),
                         csv::fixed(embedding.coordinates(r, 1), 6)});
  }
}

void write_embedding_svg(std::ostream& out, const Embedding2D& embedding) {
  constexpr double kSize = 800.0;
  constexpr double kMargin = 60.0;
  const auto& c = embedding.coordinates;
  Eigen::Vector2d lo = Eigen::Vector2d::Zero();
  Eigen::Vector2d hi = Eigen::Vector2d::Zero();
  if (c.rows() > 0) {
    lo = c.colwise().minCoeff().transpose();
    hi = c.colwise().maxCoeff().transpose();
  }
  const double span = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-12});
  const double scale = (kSize - 2.0 * kMargin) / span;
  const Eigen::Vector2d centre = 0.5 * (lo + hi);

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 800\" width=\"800\" height=\"800\">\n";
  out << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    const double x = kSize / 2.0 + (c(i, 0) - centre.x()) * scale;
    const double y = kSize / 2.0 - (c(i, 1) - centre.y()) * scale;
    out << "<circle cx=\"" << csv::fixed(x, 2) << "\" cy=\"" << csv::fixed(y, 2)
        << "\" r=\"4\" fill=\"black\"/>\n";
    out << "<text x=\"" << csv::fixed(x + 6.0, 2) << "\" y=\"" << csv::fixed(y + 4.0, 2)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(embedding.labels[static_cast<std::size_t>(i)])
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace mcode
