#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "mcode/metrics.hpp"

namespace mcode {

struct TsneParams {
  double perplexity = 12.0;
  double early_exaggeration = 36.0;
  int exaggeration_iters = 250;
  int total_iters = 1000;
  double learning_rate = 200.0;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch_iter = 250;
  double init_sigma = 1e-4;
  std::uint64_t seed = 0;
  // Use the OpenMP kernels. Output is identical either way.
  bool parallel = true;

  // Throws TsneError on non-positive values, or when perplexity is not
  // below (n - 1) / 3.
  void validate(std::size_t n) const;
};

struct Embedding2D {
  std::vector<std::string> labels;
  Eigen::MatrixX2d coordinates;
  // KL(P || Q) against the unexaggerated P, one value per iteration.
  std::vector<double> kl_trace;
  int exaggeration_iters = 0;

  // KL at the last exaggerated iteration (or the first entry if none).
  double kl_after_exaggeration() const;
};

// Gaussian N(0, sigma^2) layout drawn from a 64-bit Mersenne Twister.
Eigen::MatrixX2d initial_layout(std::size_t n, std::uint64_t seed, double sigma);

// Exact t-SNE over a precomputed distance matrix (distances are squared
// inside the Gaussian kernel). Requires n >= 4.
Embedding2D tsne(const DistanceMatrix& distances, const TsneParams& params);
Embedding2D tsne(const DistanceMatrix& distances, const TsneParams& params,
                 const Eigen::MatrixX2d& initial);

// Symmetrized joint affinities P (sum 1) for the given distances.
Eigen::MatrixXd joint_affinities(const DistanceMatrix& distances, double perplexity);

struct PcaReduction {
  Eigen::MatrixXd reduced;      // n x k
  Eigen::MatrixXd components;   // d x k, orthonormal columns
  Eigen::VectorXd mean;         // d
  Eigen::VectorXd eigenvalues;  // all d, descending
  Eigen::VectorXd explained_variance_ratio;  // k
};

// Rows of `vectors` are samples. Requires 1 <= target_dims <= min(d, n).
PcaReduction pca_reduce(const Eigen::MatrixXd& vectors, std::size_t target_dims);

class WordVectorTable {
 public:
  void add(std::string word, std::vector<double> vector);

  std::size_t size() const noexcept { return words_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::vector<double>& vector(std::size_t i) const { return vectors_[i]; }
  const std::vector<double>* find(std::string_view word) const;

  friend bool operator==(const WordVectorTable&, const WordVectorTable&) = default;

 private:
  std::vector<std::string> words_;
  std::vector<std::vector<double>> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dimension_ = 0;
};

// Whitespace-separated "word v1 ... vd" lines with an optional leading
// "count dimension" line. Without the header the dimension comes from the
// first entry.
WordVectorTable read_word_vectors(std::istream& in);
WordVectorTable parse_word_vectors(const std::filesystem::path& path);
void write_word_vectors(std::ostream& out, const WordVectorTable& table, bool header = true);

using SubstitutionMap = std::map<std::string, std::string, std::less<>>;

// "label<TAB>word" lines, '#' comments.
SubstitutionMap read_substitutions(std::istream& in);
SubstitutionMap load_substitutions(const std::filesystem::path& path);
// Word replacements for the built-in registry labels that have no
// single-word vector of their own.
const SubstitutionMap& default_substitutions();

// 1 - cos(u, v), clamped to [0, 2]. Zero vectors throw.
double cosine_distance(std::span<const double> u, std::span<const double> v);

// Each label is looked up as substitutions[label] if present, else as itself.
DistanceMatrix cosine_distance_matrix(const WordVectorTable& table, const std::vector<std::string>& labels,
                                      const SubstitutionMap& substitutions);

// Looks up the labels' words, projects them on their top principal components
// (at most max_dims) and measures cosine distances in the reduced space.
DistanceMatrix reduced_cosine_distance_matrix(const WordVectorTable& table, const std::vector<std::string>& labels,
                                              const SubstitutionMap& substitutions, std::size_t max_dims = 50);

void write_embedding_csv(std::ostream& out, const Embedding2D& embedding);
// 800x800 viewBox scatter with 4px circles and text labels.
void write_embedding_svg(std::ostream& out, const Embedding2D& embedding);

}  // namespace mcode
