#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <ranges>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "hosc/clustering.hpp"
#include "hosc/dbscan.hpp"
#include "hosc/evaluation.hpp"
#include "hosc/hypergraph.hpp"
#include "hosc/io.hpp"
#include "hosc/rotation.hpp"
#include "hosc/synthetic.hpp"

namespace hosc::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kInvalidParams = 3, kInternalError = 4 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams:
    case ErrorKind::OverlappingPairs:
    case ErrorKind::IndexOutOfRange:
      return kInvalidParams;
    case ErrorKind::InvariantViolation:
      return kInternalError;
    default:
      return kInputError;
  }
}

/// Pearson correlation; NaN when either side has zero variance.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

/// Up to `max_pairs` distinct unordered pairs (i < j), sampled without
/// replacement and returned in ascending pair order; all pairs when max_pairs covers them.
inline std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n, std::size_t max_pairs, std::uint64_t seed) {
  const std::size_t total = n < 2 ? 0 : n * (n - 1) / 2;
  std::vector<std::size_t> picks;
  if (max_pairs >= total) {
    picks.resize(total);
    for (std::size_t k = 0; k < total; ++k) picks[k] = k;
  } else {
    std::mt19937_64 rng(seed);
    picks.resize(max_pairs);
    const auto all = std::views::iota(std::size_t{0}, total);
    auto end = std::ranges::sample(all, picks.begin(), static_cast<std::ptrdiff_t>(max_pairs), rng);
    picks.erase(end, picks.end());
    std::sort(picks.begin(), picks.end());
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(picks.size());
  std::size_t i = 0, row_start = 0;
  for (auto k : picks) {
    while (k >= row_start + (n - 1 - i)) {
      row_start += n - 1 - i;
      ++i;
    }
    out.emplace_back(i, i + 1 + (k - row_start));
  }
  return out;
}

namespace detail {

struct InputOptions {
  std::string path;
  std::string format = "csv";
  std::string id_column;
  std::string label_column;
};

struct AnnealOptions {
  AnnealConfig cfg;
};

struct HosOptions {
  double delta0 = 4.0;
  std::size_t k0 = 2;
  std::optional<unsigned> d0;
  bool no_rotate = false;
  std::string cardinality = "labels";
};

inline void add_input(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("input", in.path, "Vector file")->required();
  cmd->add_option("--format", in.format, "csv or embedding_text")->check(CLI::IsMember({"csv", "embedding_text"}));
  cmd->add_option("--id-column", in.id_column, "CSV id column (default: 'id' when present)");
  cmd->add_option("--label-column", in.label_column, "CSV label column (default: 'label' when present)");
}

inline void add_anneal(CLI::App* cmd, AnnealConfig& a) {
  cmd->add_option("--anneal-t0", a.initial_temperature, "Initial temperature")->capture_default_str();
  cmd->add_option("--anneal-cooling", a.cooling_factor, "Cooling factor in (0,1)")->capture_default_str();
  cmd->add_option("--anneal-steps", a.steps_per_temperature, "Moves per temperature")->capture_default_str();
  cmd->add_option("--anneal-tmin", a.min_temperature, "Final temperature")->capture_default_str();
  cmd->add_option("--anneal-angle-step", a.angle_step_stddev, "Angle step stddev (rad)")->capture_default_str();
  cmd->add_option("--anneal-restarts", a.restarts, "Independent restarts")->capture_default_str();
}

inline void add_hos(CLI::App* cmd, HosOptions& h, bool with_delta0) {
  if (with_delta0) cmd->add_option("--delta0", h.delta0, "Minimum linear density")->capture_default_str();
  cmd->add_option("--k0", h.k0, "Minimum cluster size (> 1)")->capture_default_str();
  cmd->add_option("--d0", h.d0, "Edge weight threshold (default: least integer above mean edge weight)");
  cmd->add_flag("--no-rotate", h.no_rotate, "Skip the centering rotation");
  cmd->add_option("--cardinality", h.cardinality, "labels or points")
      ->check(CLI::IsMember({"labels", "points"}))
      ->capture_default_str();
}

/// Reads the first non-comment line of a CSV file.
inline std::vector<std::string> csv_header(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::vector<std::string> out;
  while (std::getline(in, line)) {
    if (hosc::detail::skippable(line)) continue;
    for (auto f : hosc::detail::split(line, ',')) out.emplace_back(hosc::detail::unquote(f));
    break;
  }
  return out;
}

inline LoadedVectors load(const InputOptions& in) {
  std::ifstream probe(in.path);
  if (!probe) throw Error(ErrorKind::IoError, "cannot open " + in.path);
  VectorFileSpec spec;
  spec.path = in.path;
  spec.format = in.format == "csv" ? VectorFormat::Csv : VectorFormat::EmbeddingText;
  if (spec.format == VectorFormat::Csv) {
    const auto header = csv_header(in.path);
    auto has = [&](const std::string& name) { return std::find(header.begin(), header.end(), name) != header.end(); };
    if (!in.id_column.empty())
      spec.id_column = in.id_column;
    else if (has("id"))
      spec.id_column = "id";
    if (!in.label_column.empty())
      spec.label_column = in.label_column;
    else if (has("label"))
      spec.label_column = "label";
  }
  return load_vectors(spec);
}

inline HosParams hos_params(const HosOptions& h, const AnnealConfig& anneal, std::uint64_t seed, unsigned threads) {
  HosParams p;
  p.delta0 = h.delta0;
  p.k0 = h.k0;
  p.d0 = h.d0;
  p.rotate = !h.no_rotate;
  p.cardinality = h.cardinality == "points" ? CardinalityMode::Points : CardinalityMode::Labels;
  p.anneal = anneal;
  p.anneal.seed = seed;
  p.threads = threads;
  return p;
}

inline nlohmann::ordered_json anneal_json(const AnnealConfig& a) {
  return {{"initial_temperature", a.initial_temperature}, {"cooling_factor", a.cooling_factor},
          {"steps_per_temperature", a.steps_per_temperature}, {"min_temperature", a.min_temperature},
          {"angle_step_stddev", a.angle_step_stddev}, {"restarts", a.restarts}, {"seed", a.seed}};
}

inline nlohmann::ordered_json hos_json(const HosParams& p) {
  nlohmann::ordered_json j{{"delta0", p.delta0},
                           {"k0", p.k0},
                           {"d0", p.d0 ? nlohmann::ordered_json(*p.d0) : nlohmann::ordered_json()},
                           {"cardinality", p.cardinality == CardinalityMode::Labels ? "labels" : "points"},
                           {"rotate", p.rotate}};
  if (p.rotate) j["anneal"] = anneal_json(p.anneal);
  return j;
}

template <typename Writer>
void write_file(const std::string& path, Writer&& writer) {
  auto os = hosc::detail::open_out(path);
  writer(os);
  if (!os) throw Error(ErrorKind::IoError, "write failed for " + path);
}

inline std::vector<double> make_grid(double from, double to, std::size_t steps, bool log_scale) {
  std::vector<double> grid;
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
    grid.push_back(log_scale ? std::exp(std::log(from) + t * (std::log(to) - std::log(from))) : from + t * (to - from));
  }
  grid.back() = to;
  return grid;
}

}  // namespace detail

/// Runs one CLI invocation. `args` excludes the program name. Human-readable
/// summaries go to `out`, diagnostics to `err`.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperoctant search clustering on the unit sphere", "hosc"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file (flags take precedence)");

  std::uint64_t seed = 42;
  unsigned threads = 1;
  std::string log_level = "info";
  app.add_option("--seed", seed, "Root random seed")->capture_default_str();
  app.add_option("--threads", threads, "Worker thread cap")->capture_default_str();
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}))
      ->capture_default_str();

  AnnealConfig anneal;

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Cluster a vector file");
  detail::InputOptions cluster_in;
  detail::HosOptions cluster_hos;
  std::string cluster_out, cluster_stats;
  detail::add_input(cluster, cluster_in);
  detail::add_hos(cluster, cluster_hos, true);
  detail::add_anneal(cluster, anneal);
  cluster->add_option("--out", cluster_out, "Assignments CSV");
  cluster->add_option("--stats", cluster_stats, "Stats JSON");

  // rotate
  auto* rotate = app.add_subcommand("rotate", "Find (or apply) a centering rotation");
  detail::InputOptions rotate_in;
  std::string plan_out, plan_in, rotate_out;
  detail::add_input(rotate, rotate_in);
  detail::add_anneal(rotate, anneal);
  rotate->add_option("--plan-out", plan_out, "Write the rotation plan JSON");
  rotate->add_option("--apply", plan_in, "Apply an existing plan instead of searching");
  rotate->add_option("--out", rotate_out, "Rotated vectors CSV");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Cluster count as a function of delta0 or eps");
  detail::InputOptions sweep_in;
  detail::HosOptions sweep_hos;
  std::string method = "hos", param, sweep_out;
  double from = 0.0, to = 0.0;
  std::size_t steps = 20, sweep_min_pts = 4;
  bool log_scale = false;
  detail::add_input(sweep, sweep_in);
  sweep->add_option("--method", method, "hos or dbscan")->check(CLI::IsMember({"hos", "dbscan"}))->capture_default_str();
  sweep->add_option("--param", param, "delta0 (hos) or eps (dbscan)")->check(CLI::IsMember({"delta0", "eps"}));
  sweep->add_option("--from", from, "Grid start")->required();
  sweep->add_option("--to", to, "Grid end")->required();
  sweep->add_option("--steps", steps, "Grid size")->capture_default_str();
  sweep->add_flag("--log-scale", log_scale, "Geometric grid");
  sweep->add_option("--min-pts", sweep_min_pts, "DBSCAN core threshold")->capture_default_str();
  sweep->add_option("--out", sweep_out, "Sweep CSV");
  detail::add_hos(sweep, sweep_hos, false);
  detail::add_anneal(sweep, anneal);

  // baseline
  auto* baseline = app.add_subcommand("baseline", "DBSCAN under the angular metric");
  detail::InputOptions base_in;
  DbscanParams dbscan;
  std::string base_out, base_stats;
  detail::add_input(baseline, base_in);
  baseline->add_option("--eps", dbscan.eps, "Neighborhood radius (rad)")->capture_default_str();
  baseline->add_option("--min-pts", dbscan.min_pts, "Core threshold")->capture_default_str();
  baseline->add_option("--out", base_out, "Assignments CSV");
  baseline->add_option("--stats", base_stats, "Stats JSON");

  // correlate
  auto* correlate = app.add_subcommand("correlate", "Angular / Euclidean vs Levenshtein distances on sampled pairs");
  detail::InputOptions corr_in;
  std::size_t n_pairs = 1000;
  std::string corr_out;
  detail::add_input(correlate, corr_in);
  correlate->add_option("--pairs", n_pairs, "Number of sampled pairs")->capture_default_str();
  correlate->add_option("--out", corr_out, "Distance triples CSV");

  // signs
  auto* signs = app.add_subcommand("signs", "Sign matrix of (a cluster of) the points");
  detail::InputOptions signs_in;
  std::string signs_assign, signs_plan, signs_out;
  std::optional<long> signs_cluster;
  detail::add_input(signs, signs_in);
  signs->add_option("--assignments", signs_assign, "Assignments CSV");
  signs->add_option("--cluster", signs_cluster, "Only rows of this cluster id (needs --assignments)");
  signs->add_option("--plan", signs_plan, "Rotate with this plan first");
  signs->add_option("--out", signs_out, "Sign matrix CSV");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a clustering against a labeled corpus");
  std::string eval_assign, eval_corpus, eval_embeddings, eval_stopwords, eval_out, measure;
  EvalConfig eval_cfg;
  evaluate->add_option("assignments", eval_assign, "Assignments CSV")->required();
  evaluate->add_option("corpus", eval_corpus, "JSONL corpus")->required();
  evaluate->add_option("--measure", measure, "coh-cos, coh-pmi, majority or ami")
      ->check(CLI::IsMember({"coh-cos", "coh-pmi", "majority", "ami"}))
      ->required();
  evaluate->add_option("--embeddings", eval_embeddings, "Word embedding text file (coh-cos)");
  evaluate->add_option("--topk", eval_cfg.top_k, "Top words per cluster")->capture_default_str();
  evaluate->add_option("--stopwords", eval_stopwords, "Stopword list");
  evaluate->add_flag("--noise-as-singletons", eval_cfg.noise_as_singletons, "AMI: noise points become singleton clusters");
  evaluate->add_option("--out", eval_out, "Measure report JSON");

  // graph
  auto* graph = app.add_subcommand("graph", "Dump the reduced hyperoctant graph");
  detail::InputOptions graph_in;
  std::optional<unsigned> graph_d0;
  bool graph_default_d0 = false;
  std::string graph_plan, graph_out;
  detail::add_input(graph, graph_in);
  graph->add_option("--d0", graph_d0, "Threshold edges heavier than d0");
  graph->add_flag("--default-d0", graph_default_d0, "Threshold at the default d0");
  graph->add_option("--plan", graph_plan, "Rotate with this plan first");
  graph->add_option("--out", graph_out, "Edge list");

  // generate
  auto* generate = app.add_subcommand("generate", "Write a planted-partition dataset");
  PlantedSpec planted;
  std::string gen_out, gen_corpus;
  generate->add_option("--dim", planted.dim, "Dimension")->capture_default_str();
  generate->add_option("--groups", planted.groups, "Number of groups")->capture_default_str();
  generate->add_option("--per-group", planted.per_group, "Points per group")->capture_default_str();
  generate->add_option("--spread", planted.relative_spread, "Noise relative to 1/sqrt(D)")->capture_default_str();
  generate->add_option("--out", gen_out, "Vectors CSV (id,label,x1..xD)")->required();
  generate->add_option("--corpus-out", gen_corpus, "Matching synthetic JSONL corpus");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidParams;
  }

  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  spdlog::logger log("hosc", sink);
  log.set_pattern("[%l] %v");
  log.set_level(spdlog::level::from_str(log_level));

  try {
    if (*cluster) {
      const auto data = detail::load(cluster_in);
      const HosParams params = detail::hos_params(cluster_hos, anneal, seed, threads);
      params.validate();
      const auto result = run_hos(data.points, params);
      for (const auto& w : result.warnings) log.warn("{}", w);
      const auto& s = result.stats;
      out << "N' (points): " << s.n_points << '\n'
          << "N (occupied hyperoctants): " << s.n_occupied << '\n'
          << "proto-clusters: " << s.proto_cluster_count << " (max resolution " << s.max_resolution << ")\n"
          << "centering: " << s.centering_before << " -> " << s.centering_after << '\n'
          << "d0: " << s.d0_used << '\n'
          << "clusters: " << result.clusters.size() << '\n'
          << "noise: " << result.noise.size() << '\n';
      if (!cluster_out.empty())
        detail::write_file(cluster_out, [&](std::ostream& os) { write_assignments(os, result, data.points.size()); });
      if (!cluster_stats.empty()) {
        auto j = stats_json(result, "hos");
        j["rotation"] = plan_to_json(result.rotation, data.points.dim());
        j["config"] = detail::hos_json(params);
        j["config"]["threads"] = threads;
        j["input"] = {{"path", cluster_in.path}, {"hash", content_hash(cluster_in.path)}};
        detail::write_file(cluster_stats, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
      }
      return kOk;
    }

    if (*rotate) {
      const auto data = detail::load(rotate_in);
      RotationPlan plan;
      PointSet rotated;
      if (!plan_in.empty()) {
        auto in = hosc::detail::open_in(plan_in);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorKind::ParseError, e.what());
        }
        auto [p, dim] = plan_from_json(j);
        if (dim != data.points.dim())
          throw Error(ErrorKind::DimensionMismatch, "plan is for dimension " + std::to_string(dim));
        plan = std::move(p);
        rotated = apply_rotation(plan, data.points);
      } else {
        AnnealConfig cfg = anneal;
        cfg.seed = seed;
        auto outcome = optimize_rotation(data.points, cfg, threads);
        plan = std::move(outcome.plan);
        rotated = std::move(outcome.rotated);
        out << "accepted moves: " << outcome.report.accepted_moves << '\n';
      }
      out << "centering: " << centering_value(data.points) << " -> " << centering_value(rotated) << '\n'
          << "occupied hyperoctants: " << occupied_hyperoctants(data.points) << " -> " << occupied_hyperoctants(rotated)
          << '\n'
          << "pairs: " << plan.size() << '\n';
      if (!plan_out.empty())
        detail::write_file(plan_out, [&](std::ostream& os) { os << plan_to_json(plan, data.points.dim()).dump(2) << '\n'; });
      if (!rotate_out.empty())
        detail::write_file(rotate_out, [&](std::ostream& os) { write_points_csv(os, rotated, data.labels); });
      return kOk;
    }

    if (*sweep) {
      const std::string expected = method == "hos" ? "delta0" : "eps";
      if (!param.empty() && param != expected)
        throw Error(ErrorKind::InvalidParams, "--param " + param + " does not apply to method " + method);
      if (!(from < to)) throw Error(ErrorKind::InvalidParams, "--from must be below --to");
      if (steps < 2) throw Error(ErrorKind::InvalidParams, "--steps must be at least 2");
      if (!(from > 0.0)) throw Error(ErrorKind::InvalidParams, "grid values must be positive");
      if (method == "dbscan" && to > std::numbers::pi) throw Error(ErrorKind::InvalidParams, "eps must not exceed pi");
      const auto grid = detail::make_grid(from, to, steps, log_scale);
      const auto data = detail::load(sweep_in);
      std::vector<SweepRow> rows;
      if (method == "hos") {
        auto params = detail::hos_params(sweep_hos, anneal, seed, threads);
        params.delta0 = grid.front();
        rows = sweep_delta0(data.points, params, grid);
      } else {
        DbscanParams p;
        p.min_pts = sweep_min_pts;
        p.eps = grid.front();
        rows = sweep_eps(data.points, p, grid);
      }
      out << expected << ",clusters,noise\n";
      for (const auto& r : rows) out << r.param << ',' << r.clusters << ',' << r.noise << '\n';
      if (!sweep_out.empty()) detail::write_file(sweep_out, [&](std::ostream& os) { write_sweep(os, rows); });
      return kOk;
    }

    if (*baseline) {
      const auto data = detail::load(base_in);
      const auto result = run_dbscan(data.points, dbscan);
      out << "N' (points): " << data.points.size() << '\n'
          << "clusters: " << result.clusters.size() << '\n'
          << "noise: " << result.noise.size() << '\n';
      if (!base_out.empty())
        detail::write_file(base_out, [&](std::ostream& os) { write_assignments(os, result, data.points.size()); });
      if (!base_stats.empty()) {
        auto j = stats_json(result, "dbscan");
        j["config"] = {{"eps", dbscan.eps}, {"min_pts", dbscan.min_pts}};
        j["input"] = {{"path", base_in.path}, {"hash", content_hash(base_in.path)}};
        detail::write_file(base_stats, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
      }
      return kOk;
    }

    if (*correlate) {
      if (n_pairs < 2) throw Error(ErrorKind::InvalidParams, "--pairs must be at least 2");
      const auto data = detail::load(corr_in);
      const auto& pts = data.points;
      std::vector<SignLabel> labels;
      for (std::size_t i = 0; i < pts.size(); ++i) labels.push_back(SignLabel::of(pts.row(i)));
      std::vector<DistanceTriple> rows;
      std::vector<double> ang, euc, lev;
      for (const auto& [i, j] : sample_pairs(pts.size(), n_pairs, seed)) {
        rows.push_back({angular_distance(pts.row(i), pts.row(j)), euclidean_distance(pts.row(i), pts.row(j)),
                        levenshtein(labels[i], labels[j])});
        ang.push_back(rows.back().angular);
        euc.push_back(rows.back().euclidean);
        lev.push_back(rows.back().levenshtein);
      }
      const double r_ang = pearson(ang, lev);
      const double r_euc = pearson(euc, lev);
      if (std::isnan(r_ang) || std::isnan(r_euc)) log.warn("zero variance in sampled distances; correlation undefined");
      out << "pairs: " << rows.size() << '\n'
          << "pearson(angular, levenshtein): " << r_ang << '\n'
          << "pearson(euclidean, levenshtein): " << r_euc << '\n';
      if (!corr_out.empty()) detail::write_file(corr_out, [&](std::ostream& os) { write_correlation(os, rows); });
      return kOk;
    }

    if (*signs) {
      auto data = detail::load(signs_in);
      PointSet pts = data.points;
      if (!signs_plan.empty()) {
        auto in = hosc::detail::open_in(signs_plan);
        auto [plan, dim] = plan_from_json(nlohmann::json::parse(in));
        if (dim != pts.dim()) throw Error(ErrorKind::DimensionMismatch, "plan is for dimension " + std::to_string(dim));
        pts = apply_rotation(plan, pts);
      }
      std::vector<std::size_t> ids;
      if (signs_cluster) {
        if (signs_assign.empty()) throw Error(ErrorKind::InvalidParams, "--cluster needs --assignments");
        auto in = hosc::detail::open_in(signs_assign);
        const auto a = read_assignments(in);
        if (a.size() != pts.size()) throw Error(ErrorKind::DimensionMismatch, "assignments do not match the input size");
        for (std::size_t i = 0; i < a.size(); ++i)
          if (a[i] == *signs_cluster) ids.push_back(i);
      } else {
        for (std::size_t i = 0; i < pts.size(); ++i) ids.push_back(i);
      }
      std::vector<SignLabel> distinct;
      for (auto id : ids) distinct.push_back(SignLabel::of(pts.row(id)));
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      out << "rows: " << ids.size() << '\n' << "distinct sign rows: " << distinct.size() << '\n';
      if (!signs_out.empty()) detail::write_file(signs_out, [&](std::ostream& os) { write_sign_matrix(os, pts, ids); });
      return kOk;
    }

    if (*evaluate) {
      if (!eval_stopwords.empty()) eval_cfg.stopwords = load_stopwords(eval_stopwords);
      const LabeledCorpus corpus = load_corpus(eval_corpus, eval_cfg.stopwords);
      auto in = hosc::detail::open_in(eval_assign);
      const auto assignments = read_assignments(in);
      if (assignments.size() != corpus.size())
        throw Error(ErrorKind::DegenerateInput, "assignments cover " + std::to_string(assignments.size()) +
                                                    " points but the corpus has " + std::to_string(corpus.size()) + " documents");
      for (std::size_t i = 0; i < assignments.size(); ++i)
        if (!corpus.contains(i)) throw Error(ErrorKind::DegenerateInput, "point id " + std::to_string(i) + " has no document");
      const auto result = result_from_assignments(assignments);

      nlohmann::ordered_json config{{"topk", eval_cfg.top_k},
                                    {"stopwords", eval_stopwords},
                                    {"noise_as_singletons", eval_cfg.noise_as_singletons}};
      nlohmann::ordered_json report;
      if (measure == "coh-cos") {
        if (eval_embeddings.empty()) throw Error(ErrorKind::InvalidParams, "coh-cos needs --embeddings");
        const auto table = load_embedding_table(eval_embeddings);
        report = measure_json(coherence_cosine(result, corpus, table, eval_cfg), config);
      } else if (measure == "coh-pmi") {
        config["pmi_epsilon"] = eval_cfg.pmi_epsilon;
        report = measure_json(coherence_pmi(result, corpus, eval_cfg), config);
      } else if (measure == "majority") {
        const auto m = topic_majority(result, corpus);
        report = measure_json({"majority", m.accuracy, {}}, config);
        report["m"] = m.m;
        report["t"] = m.t;
        report["coverage"] = m.coverage;
        report["predicted"] = m.predicted;
      } else {
        report = measure_json({"ami", adjusted_mutual_information(result, corpus, eval_cfg.noise_as_singletons), {}}, config);
      }
      out << report["measure"].get<std::string>() << ": " << std::setprecision(12) << report["value"].get<double>() << '\n';
      if (report.contains("m")) out << "m/t: " << report["m"] << '/' << report["t"] << '\n';
      if (!eval_out.empty()) detail::write_file(eval_out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
      return kOk;
    }

    if (*graph) {
      const auto data = detail::load(graph_in);
      PointSet pts = data.points;
      if (!graph_plan.empty()) {
        auto in = hosc::detail::open_in(graph_plan);
        auto [plan, dim] = plan_from_json(nlohmann::json::parse(in));
        if (dim != pts.dim()) throw Error(ErrorKind::DimensionMismatch, "plan is for dimension " + std::to_string(dim));
        pts = apply_rotation(plan, pts);
      }
      const auto index = assign_hyperoctants(pts);
      ReducedGraph g = build_reduced_graph(index.labels, threads);
      if (graph_d0)
        g = threshold_graph(g, *graph_d0);
      else if (graph_default_d0)
        g = threshold_graph(g, default_d0(g, true));
      out << "nodes: " << g.nodes.size() << '\n' << "edges: " << g.edges.size() << '\n';
      if (g.d0) out << "d0: " << *g.d0 << '\n';
      if (!graph_out.empty()) detail::write_file(graph_out, [&](std::ostream& os) { write_edge_list(os, g); });
      return kOk;
    }

    if (*generate) {
      planted.seed = seed;
      const auto data = make_planted(planted);
      std::vector<std::string> labels;
      for (auto g : data.truth) labels.push_back("g" + std::to_string(g));
      detail::write_file(gen_out, [&](std::ostream& os) { write_points_csv(os, data.points, labels); });
      if (!gen_corpus.empty()) {
        // Each group draws from its own vocabulary plus a shared one.
        std::mt19937_64 rng(seed ^ 0x5eedULL);
        std::uniform_int_distribution<int> own(0, 9), shared(0, 4);
        detail::write_file(gen_corpus, [&](std::ostream& os) {
          for (std::size_t i = 0; i < data.truth.size(); ++i) {
            std::string text;
            for (int w = 0; w < 8; ++w) text += "g" + std::to_string(data.truth[i]) + "w" + std::to_string(own(rng)) + ' ';
            for (int w = 0; w < 2; ++w) text += "common" + std::to_string(shared(rng)) + ' ';
            os << nlohmann::json{{"id", i}, {"text", text}, {"label", labels[i]}}.dump() << '\n';
          }
        });
      }
      out << "points: " << data.points.size() << '\n' << "dim: " << data.points.dim() << '\n';
      return kOk;
    }
  } catch (const Error& e) {
    log.error("{}", e.what());
    return exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    log.error("ParseError: {}", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    log.error("internal error: {}", e.what());
    return kInternalError;
  }
  return kOk;
}

}  // namespace hosc::cli
