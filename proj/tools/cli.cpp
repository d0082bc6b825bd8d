#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcode/codec.hpp"
#include "mcode/csv.hpp"
#include "mcode/embedding.hpp"
#include "mcode/error.hpp"
#include "mcode/metrics.hpp"
#include "mcode/registry.hpp"
#include "mcode/trajectory.hpp"

namespace mcode::cli {
namespace {

struct GlobalOptions {
  std::string registry;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
};

struct MetricOptions {
  std::string metric;
  std::string preset;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> unit;
  std::string alpha_scope = "contact-structural";

  void attach(CLI::App* cmd) {
    cmd->add_option("--metric", metric, "hamming or weighted")->check(CLI::IsMember({"hamming", "weighted"}));
    cmd->add_option("--preset", preset, "weighted preset")->check(CLI::IsMember({"contact", "trajectory"}));
    cmd->add_option("--alpha", alpha, "penalty per differing contact/structural bit");
    cmd->add_option("--beta", beta, "trajectory movement penalty");
    cmd->add_option("--unit", unit, "recurrence and tool bit penalty");
    cmd->add_option("--alpha-scope", alpha_scope, "bits charged alpha")
        ->check(CLI::IsMember({"contact-structural", "contact"}));
  }

  Metric resolve() const {
    const bool has_weights = alpha || beta || unit;
    std::string kind = metric;
    if (kind.empty()) kind = (!preset.empty() || has_weights) ? "weighted" : "hamming";
    if (kind == "hamming") {
      if (!preset.empty() || has_weights) throw Error("Usage", "--preset/--alpha/--beta/--unit need --metric weighted");
      return Metric::hamming();
    }
    if (preset.empty() && !(alpha && beta)) {
      throw Error("Usage", "the weighted metric needs --preset or both --alpha and --beta");
    }
    WeightConfig w = preset == "contact"      ? WeightConfig::contact_priority()
                     : preset == "trajectory" ? WeightConfig::trajectory_priority()
                                              : WeightConfig{};
    if (alpha) w.alpha = *alpha;
    if (beta) w.beta = *beta;
    if (unit) w.unit = *unit;
    w.alpha_scope = alpha_scope == "contact" ? AlphaScope::ContactOnly : AlphaScope::ContactAndStructural;
    return Metric::weighted(w);
  }
};

std::string number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

LabelRegistry registry_from(const GlobalOptions& g) {
  return g.registry.empty() ? builtin_registry() : load_registry(g.registry);
}

// Writes `text` to --out when given, otherwise to `out`.
void emit(const GlobalOptions& g, std::ostream& out, const std::string& text) {
  if (g.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(g.out, std::ios::binary);
  if (!file) throw IoError("cannot write '" + g.out + "'");
  file << text;
  if (!file) throw IoError("failed writing '" + g.out + "'");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write '" + path + "'");
  file << text;
  if (!file) throw IoError("failed writing '" + path + "'");
}

std::string format_or(const GlobalOptions& g, const std::string& fallback,
                      std::initializer_list<std::string_view> allowed) {
  const std::string f = g.format.empty() ? fallback : g.format;
  for (auto a : allowed) {
    if (f == a) return f;
  }
  throw Error("Usage", "--format " + f + " is not supported by this command");
}

std::string trajectory_text(const TrajectoryDescriptor& t) {
  return format_trajectory(t) + " (" + (t.recurrent ? "cyclical" : "acyclical") +
         ", prismatic " + std::to_string(t.prismatic_dof) + "-DOF, revolute " +
         std::to_string(t.revolute_dof) + "-DOF)";
}

nlohmann::json trajectory_json(const TrajectoryDescriptor& t) {
  return {{"bits", format_trajectory(t)},
          {"recurrent", t.recurrent},
          {"prismatic_dof", t.prismatic_dof},
          {"revolute_dof", t.revolute_dof}};
}

std::string decode_text(const MotionCode& c) {
  std::ostringstream s;
  const bool contact = c.is_contact();
  s << "code: " << format_code(c) << '\n';
  s << "bit 0      interaction: " << to_string(c.interaction) << '\n';
  s << "bit 1      engagement: " << (contact ? to_string(c.engagement) : "n/a (non-contact)") << '\n';
  s << "bit 2      contact duration: " << (contact ? to_string(c.duration) : "n/a (non-contact)") << '\n';
  s << "bits 3-4   active deformation: " << describe(c.active_structure) << '\n';
  s << "bits 5-6   passive deformation: " << describe(c.passive_structure) << '\n';
  s << "bits 7-11  active trajectory: " << trajectory_text(c.active_trajectory) << '\n';
  s << "bits 12-16 passive trajectory: " << trajectory_text(c.passive_trajectory) << '\n';
  s << "bit 17     tool: " << to_string(c.tool) << '\n';
  return s.str();
}

std::string decode_json(const MotionCode& c) {
  nlohmann::json j = {
      {"code", format_code(c)},
      {"interaction", to_string(c.interaction)},
      {"engagement", c.is_contact() ? nlohmann::json(to_string(c.engagement)) : nlohmann::json(nullptr)},
      {"contact_duration", c.is_contact() ? nlohmann::json(to_string(c.duration)) : nlohmann::json(nullptr)},
      {"active_deformation", describe(c.active_structure)},
      {"passive_deformation", describe(c.passive_structure)},
      {"active_trajectory", trajectory_json(c.active_trajectory)},
      {"passive_trajectory", trajectory_json(c.passive_trajectory)},
      {"tool", to_string(c.tool)},
  };
  return j.dump(2) + "\n";
}

StructuralOutcome structure_from(const std::string& s) {
  if (s == "temporary") return StructuralOutcome::temporary();
  if (s == "permanent") return StructuralOutcome::permanent_change();
  return StructuralOutcome::none();
}

// A label from the registry, or else a literal 18-bit code.
MotionCode resolve_code(const LabelRegistry& registry, const std::string& arg) {
  if (registry.contains(arg)) return code_for_label(registry, arg);
  if (arg.size() == kCodeLength && arg.find_first_not_of("01") == std::string::npos) return parse_code(arg);
  throw UnknownLabel(arg);
}

std::string matrix_json(const DistanceMatrix& m) {
  nlohmann::json values = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) row.push_back(m.values(i, j));
    values.push_back(row);
  }
  return nlohmann::json{{"labels", m.labels}, {"values", values}}.dump(2) + "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Motion-code toolkit: encode, compare, analyze and embed manipulation motions", "mcode"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--registry", g.registry, "label registry TSV (default: built-in table)");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output path (default: stdout)");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv", "svg", "text"}));

  // decode
  std::string decode_arg;
  auto* decode = app.add_subcommand("decode", "describe each attribute of an 18-bit code");
  decode->add_option("code", decode_arg, "18-bit code")->required();

  // encode
  auto* encode = app.add_subcommand("encode", "build a code from taxonomy answers");
  bool contact = false;
  bool non_contact = false;
  std::string engagement;
  std::string duration;
  std::string active_structure = "none";
  std::string passive_structure = "none";
  TrajectoryDescriptor active_traj;
  TrajectoryDescriptor passive_traj;
  bool tool = false;
  auto* contact_flag = encode->add_flag("--contact", contact, "active and passive objects touch");
  encode->add_flag("--non-contact", non_contact, "no contact (default)")->excludes(contact_flag);
  encode->add_option("--engagement", engagement)->check(CLI::IsMember({"rigid", "soft"}));
  encode->add_option("--duration", duration)->check(CLI::IsMember({"discontinuous", "continuous"}));
  const auto structures = CLI::IsMember({"none", "temporary", "permanent"});
  encode->add_option("--active-structure", active_structure)->check(structures);
  encode->add_option("--passive-structure", passive_structure)->check(structures);
  encode->add_flag("--active-recurrent", active_traj.recurrent);
  encode->add_option("--active-prismatic", active_traj.prismatic_dof)->check(CLI::Range(0, 3));
  encode->add_option("--active-revolute", active_traj.revolute_dof)->check(CLI::Range(0, 3));
  encode->add_flag("--passive-recurrent", passive_traj.recurrent);
  encode->add_option("--passive-prismatic", passive_traj.prismatic_dof)->check(CLI::Range(0, 3));
  encode->add_option("--passive-revolute", passive_traj.revolute_dof)->check(CLI::Range(0, 3));
  encode->add_flag("--tool", tool, "the active object is a hand-held tool");

  // dist
  std::string dist_a;
  std::string dist_b;
  MetricOptions dist_metric;
  auto* dist = app.add_subcommand("dist", "distance between two labels or codes");
  dist->add_option("a", dist_a)->required();
  dist->add_option("b", dist_b)->required();
  dist_metric.attach(dist);

  // matrix
  MetricOptions matrix_metric;
  auto* matrix = app.add_subcommand("matrix", "pairwise distance matrix over the registry");
  matrix_metric.attach(matrix);

  // neighbors
  std::string neighbor_query;
  std::size_t neighbor_k = 5;
  MetricOptions neighbor_metric;
  auto* neighbors = app.add_subcommand("neighbors", "closest registry labels to a label or code");
  neighbors->add_option("query", neighbor_query)->required();
  neighbors->add_option("-k", neighbor_k, "number of neighbors")->check(CLI::PositiveNumber);
  neighbor_metric.attach(neighbors);

  // consolidate
  auto* consolidate_cmd = app.add_subcommand("consolidate", "group labels that share a code");

  // analyze
  std::string trajectory_path;
  AnalysisOptions analysis;
  double rotation_threshold_deg = 30.0;
  auto* analyze = app.add_subcommand("analyze", "derive trajectory bits from a pose recording");
  analyze->add_option("trajectory", trajectory_path, "CSV with header t,x,y,z,qw,qx,qy,qz")->required();
  analyze->add_option("--variance-threshold", analysis.prismatic.variance_threshold)->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--motion-floor", analysis.prismatic.motion_floor)->check(CLI::NonNegativeNumber);
  analyze->add_option("--rotation-threshold", rotation_threshold_deg, "degrees")->check(CLI::NonNegativeNumber);
  analyze->add_option("--min-periods", analysis.recurrence.min_period_count)->check(CLI::PositiveNumber);
  analyze->add_option("--autocorr-threshold", analysis.recurrence.autocorr_threshold);

  // embed
  std::string vectors_path;
  std::string substitutions_path;
  std::size_t pca_dims = 50;
  std::string svg_path;
  std::string csv_path;
  TsneParams tsne_params;
  MetricOptions embed_metric;
  auto* embed = app.add_subcommand("embed", "2-D t-SNE layout of the registry (codes or word vectors)");
  embed->add_option("--vectors", vectors_path, "word vectors in text format (embeds words instead of codes)");
  embed->add_option("--substitutions", substitutions_path, "label<TAB>word replacements for --vectors");
  embed->add_option("--pca-dims", pca_dims, "PCA dimensionality before cosine distances")
      ->check(CLI::PositiveNumber);
  embed->add_option("--perplexity", tsne_params.perplexity);
  embed->add_option("--exaggeration", tsne_params.early_exaggeration);
  embed->add_option("--exaggeration-iters", tsne_params.exaggeration_iters);
  embed->add_option("--iters", tsne_params.total_iters);
  embed->add_option("--learning-rate", tsne_params.learning_rate);
  embed->add_option("--svg", svg_path, "also write an SVG scatter plot");
  embed->add_option("--csv", csv_path, "also write label,x,y CSV");
  embed_metric.attach(embed);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "EUsage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (decode->parsed()) {
      const MotionCode code = parse_code(decode_arg);
      const auto f = format_or(g, "text", {"text", "json"});
      emit(g, out, f == "json" ? decode_json(code) : decode_text(code));
    } else if (encode->parsed()) {
      CodeAnswers answers;
      answers.contact = contact;
      if (engagement == "rigid") answers.engagement = Engagement::Rigid;
      if (engagement == "soft") answers.engagement = Engagement::Soft;
      if (duration == "discontinuous") answers.duration = Duration::Discontinuous;
      if (duration == "continuous") answers.duration = Duration::Continuous;
      answers.active_structure = structure_from(active_structure);
      answers.passive_structure = structure_from(passive_structure);
      answers.active_trajectory = active_traj;
      answers.passive_trajectory = passive_traj;
      answers.tool = tool;
      emit(g, out, format_code(build_code(answers)) + "\n");
    } else if (dist->parsed()) {
      const auto registry = registry_from(g);
      const Metric metric = dist_metric.resolve();
      const double d = metric(resolve_code(registry, dist_a), resolve_code(registry, dist_b));
      emit(g, out, number(d) + "\n");
    } else if (matrix->parsed()) {
      const auto registry = registry_from(g);
      if (registry.empty()) throw Error("Registry", "registry is empty");
      const auto m = distance_matrix(registry, matrix_metric.resolve());
      const auto f = format_or(g, "csv", {"csv", "json"});
      if (f == "json") {
        emit(g, out, matrix_json(m));
      } else {
        std::ostringstream s;
        write_csv(s, m);
        emit(g, out, s.str());
      }
    } else if (neighbors->parsed()) {
      const auto registry = registry_from(g);
      const Metric metric = neighbor_metric.resolve();
      const auto result = registry.contains(neighbor_query)
                              ? nearest(neighbor_query, registry, metric, neighbor_k)
                              : nearest(resolve_code(registry, neighbor_query), registry, metric, neighbor_k);
      const auto f = format_or(g, "text", {"text", "csv", "json"});
      std::ostringstream s;
      if (f == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& n : result) j.push_back({{"label", n.label}, {"distance", n.distance}});
        s << j.dump(2) << '\n';
      } else if (f == "csv") {
        csv::write_row(s, {"rank", "label", "distance"});
        for (std::size_t i = 0; i < result.size(); ++i) {
          csv::write_row(s, {std::to_string(i + 1), result[i].label, csv::fixed(result[i].distance, 6)});
        }
      } else {
        for (std::size_t i = 0; i < result.size(); ++i) {
          s << (i + 1) << '\t' << result[i].label << '\t' << number(result[i].distance) << '\n';
        }
      }
      emit(g, out, s.str());
    } else if (consolidate_cmd->parsed()) {
      const auto registry = registry_from(g);
      const auto groups = consolidate(registry);
      const auto f = format_or(g, "text", {"text", "json"});
      std::ostringstream s;
      if (f == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& group : groups) {
          j.push_back({{"code", format_code(code_for_label(registry, group.front()))}, {"labels", group}});
        }
        s << j.dump(2) << '\n';
      } else {
        for (const auto& group : groups) {
          s << format_code(code_for_label(registry, group.front()));
          for (const auto& label : group) s << '\t' << label;
          s << '\n';
        }
      }
      emit(g, out, s.str());
    } else if (analyze->parsed()) {
      analysis.rotation_threshold = rotation_threshold_deg * std::numbers::pi / 180.0;
      format_or(g, "json", {"json"});
      const auto report = derive_trajectory_substring(load_trajectory(trajectory_path), analysis);
      if (g.out.empty()) {
        out << report_json(report) << '\n';
      } else {
        write_file(g.out, report_json(report) + "\n");
        out << report.substring << '\n';
      }
    } else if (embed->parsed()) {
      tsne_params.seed = g.seed;
      const auto registry = registry_from(g);
      std::vector<std::string> labels;
      for (const auto& e : registry.entries()) labels.push_back(e.label);
      DistanceMatrix distances;
      if (!vectors_path.empty()) {
        const auto table = parse_word_vectors(vectors_path);
        const SubstitutionMap substitutions =
            substitutions_path.empty() ? default_substitutions() : load_substitutions(substitutions_path);
        distances = reduced_cosine_distance_matrix(table, labels, substitutions, pca_dims);
      } else {
        distances = distance_matrix(registry, embed_metric.resolve());
      }
      const auto embedding = tsne(distances, tsne_params);
      const auto f = format_or(g, "csv", {"csv", "svg", "json"});
      std::ostringstream csv_text;
      write_embedding_csv(csv_text, embedding);
      std::ostringstream svg_text;
      write_embedding_svg(svg_text, embedding);
      if (f == "svg") {
        emit(g, out, svg_text.str());
      } else if (f == "json") {
        nlohmann::json points = nlohmann::json::array();
        for (std::size_t i = 0; i < embedding.labels.size(); ++i) {
          const auto r = static_cast<Eigen::Index>(i);
          points.push_back({{"label", embedding.labels[i]},
                            {"x", embedding.coordinates(r, 0)},
                            {"y", embedding.coordinates(r, 1)}});
        }
        nlohmann::json j = {{"points", points},
                            {"kl_after_exaggeration", embedding.kl_after_exaggeration()},
                            {"kl_final", embedding.kl_trace.back()}};
        emit(g, out, j.dump(2) + "\n");
      } else {
        emit(g, out, csv_text.str());
      }
      if (!svg_path.empty()) write_file(svg_path, svg_text.str());
      if (!csv_path.empty()) write_file(csv_path, csv_text.str());
    }
  } catch (const Error& e) {
    err << 'E' << e.category() << ": " << e.what() << '\n';
    return e.category() == "Usage" ? 2 : 1;
  } catch (const std::exception& e) {
    err << "EInternal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mcode::cli
