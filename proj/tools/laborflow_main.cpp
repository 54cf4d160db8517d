// Command-line front end: wires ingestion -> analysis -> reports. Every JSON
// report embeds the effective configuration and the build version so runs are
// reproducible from their outputs alone.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "laborflow/community.hpp"
#include "laborflow/complexity.hpp"
#include "laborflow/flows.hpp"
#include "laborflow/io.hpp"
#include "laborflow/markov.hpp"
#include "laborflow/policy.hpp"
#include "laborflow/structure.hpp"
#include "laborflow/synthnet.hpp"

namespace {

namespace fs = std::filesystem;
using laborflow::FlowCounts;
using laborflow::InputError;
using laborflow::NumericError;
using laborflow::TransitionMatrix;
using ordered_json = nlohmann::ordered_json;

std::string default_out_dir() {
  const char* env = std::getenv("LABORFLOW_OUT");
  return env && *env ? env : ".";
}

ordered_json make_report(const std::string& command, const ordered_json& config) {
  ordered_json report;
  report["version"] = LABORFLOW_VERSION;
  report["command"] = command;
  report["config"] = config;
  return report;
}

void write_report(const fs::path& path, const ordered_json& report) {
  laborflow::io::write_text(path, report.dump(2) + "\n");
  std::cout << "wrote " << path.string() << "\n";
}

ordered_json json_or_null(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

std::vector<double> observed_shares_from(const FlowCounts& counts) {
  std::vector<double> shares(counts.size(), 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    shares[j] = static_cast<double>(counts.out_total(j));
    total += shares[j];
  }
  if (total <= 0.0) throw InputError("flow network carries no transitions");
  for (double& s : shares) s /= total;
  return shares;
}

std::vector<double> aligned_values(const FlowCounts& counts,
                                   const std::vector<std::pair<std::string, double>>& rows,
                                   const std::string& what) {
  std::vector<double> values(counts.size(), 0.0);
  std::vector<char> seen(counts.size(), 0);
  for (const auto& [code, value] : rows) {
    const auto idx = counts.index_of(code);
    if (!idx) throw InputError(what + ": unknown occupation '" + code + "'");
    values[*idx] = value;
    seen[*idx] = 1;
  }
  for (std::size_t v = 0; v < counts.size(); ++v)
    if (!seen[v])
      throw InputError(what + ": missing occupation '" + counts.occupations[v].code + "'");
  return values;
}

laborflow::SkillMatrix load_skills(const std::string& skills_path,
                                   const std::string& mapping_path) {
  laborflow::SkillMatrix skills = laborflow::io::read_skills_csv(skills_path);
  if (!mapping_path.empty())
    skills = laborflow::aggregate_skills(skills,
                                         laborflow::io::read_mapping_csv(mapping_path));
  return skills;
}

// Skill matrix restricted and aligned to the flow occupation set.
laborflow::SkillMatrix align_skills(const laborflow::SkillMatrix& skills,
                                    const std::vector<laborflow::Occupation>& occupations) {
  laborflow::SkillMatrix out;
  out.occupations = occupations;
  out.skills = skills.skills;
  out.weights = laborflow::Matrix(occupations.size(), skills.skills.size(), 0.0);
  for (std::size_t v = 0; v < occupations.size(); ++v) {
    const auto idx = skills.index_of(occupations[v].code);
    if (!idx)
      throw InputError("skills file lacks occupation '" + occupations[v].code + "'");
    for (std::size_t k = 0; k < skills.skills.size(); ++k)
      out.weights(v, k) = skills.weights(*idx, k);
    double norm = 0.0;
    for (std::size_t k = 0; k < skills.skills.size(); ++k) norm += out.weights(v, k);
    if (norm <= 0.0) out.zero_rows.push_back(occupations[v].code);
  }
  return out;
}

int run_synth(const std::string& kind, std::size_t n, std::uint64_t seed, int c,
              double p_in, double p_out, double gamma, std::int64_t weight,
              const std::string& base, std::size_t swaps, const fs::path& out) {
  FlowCounts counts;
  if (kind == "planted") {
    counts = laborflow::planted_blocks(n, c, p_in, p_out, seed);
  } else if (kind == "nested") {
    counts = laborflow::nested_flow(n, gamma, seed);
  } else if (kind == "uniform") {
    counts = laborflow::uniform_complete(n, weight);
  } else if (kind == "null") {
    if (base.empty()) throw InputError("--base is required for kind=null");
    bool too_few = false;
    counts = laborflow::degree_preserving_null(laborflow::io::read_flows_csv(base),
                                               swaps, seed, &too_few);
    if (too_few) std::cerr << "warning: too few links to swap; input returned\n";
  } else {
    throw InputError("unknown generator kind '" + kind + "'");
  }
  laborflow::io::write_flows_csv(out, counts);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Occupational mobility network analysis"};
  app.set_version_flag("--version", std::string(LABORFLOW_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir = default_out_dir();
  app.add_option("--out", out_dir, "output directory")->capture_default_str();

  // --- synth ---------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate a synthetic flow network");
  std::string synth_kind = "nested";
  std::size_t synth_n = 30;
  std::uint64_t synth_seed = 1;
  int synth_c = 2;
  double synth_p_in = 0.9, synth_p_out = 0.05, synth_gamma = 64.0;
  std::int64_t synth_weight = 1;
  std::string synth_base;
  std::size_t synth_swaps = 1000;
  std::string synth_file = "flows.csv";
  synth->add_option("--kind", synth_kind, "planted|nested|uniform|null")
      ->capture_default_str();
  synth->add_option("--n", synth_n, "occupation count")->capture_default_str();
  synth->add_option("--seed", synth_seed, "generator seed")->capture_default_str();
  synth->add_option("--communities", synth_c, "planted block count")
      ->capture_default_str();
  synth->add_option("--p-in", synth_p_in, "within-block link probability")
      ->capture_default_str();
  synth->add_option("--p-out", synth_p_out, "cross-block link probability")
      ->capture_default_str();
  synth->add_option("--gamma", synth_gamma, "nested profile steepness")
      ->capture_default_str();
  synth->add_option("--weight", synth_weight, "uniform link weight")
      ->capture_default_str();
  synth->add_option("--base", synth_base, "flows to randomize (kind=null)");
  synth->add_option("--swaps", synth_swaps, "attempted edge swaps (kind=null)")
      ->capture_default_str();
  synth->add_option("--file", synth_file, "output file name")->capture_default_str();

  // --- shared flow/matrix options -------------------------------------------
  std::string flows_path;
  double theta = 0.01;
  auto add_flow_options = [&](CLI::App* cmd) {
    cmd->add_option("--flows", flows_path, "flow CSV (origin,destination,count[,group])")
        ->required();
    cmd->add_option("--theta", theta, "link filter fraction")->capture_default_str();
  };

  // --- ingest ----------------------------------------------------------------
  auto* ingest = app.add_subcommand("ingest", "validate and summarize a flow file");
  add_flow_options(ingest);

  // --- matrix ----------------------------------------------------------------
  auto* matrix_cmd = app.add_subcommand("matrix", "build the transition matrix");
  add_flow_options(matrix_cmd);
  bool strip = false;
  std::string stability_base;
  matrix_cmd->add_flag("--strip-self-loops", strip,
                       "emit the self-loop-excluded matrix");
  matrix_cmd->add_option("--stability-base", stability_base,
                         "group tag used as the regression base year");

  // --- communities -------------------------------------------------------------
  auto* communities_cmd = app.add_subcommand("communities", "BRIM community detection");
  add_flow_options(communities_cmd);
  laborflow::BrimOptions brim_options;
  communities_cmd->add_option("--cmax", brim_options.c_max, "community upper bound")
      ->capture_default_str();
  communities_cmd->add_option("--seeds", brim_options.restarts, "restart count")
      ->capture_default_str();
  communities_cmd->add_option("--seed", brim_options.seed, "restart base seed")
      ->capture_default_str();

  // --- steady-state -------------------------------------------------------------
  auto* steady = app.add_subcommand("steady-state",
                                    "stationary distribution and spectral gap");
  add_flow_options(steady);
  std::string observed_path;
  steady->add_option("--observed", observed_path,
                     "occupation,share CSV (default: shares from the flow file)");

  // --- complexity -----------------------------------------------------------------
  auto* complexity_cmd =
      app.add_subcommand("complexity", "accessibility/transferability and taxonomy");
  add_flow_options(complexity_cmd);
  std::size_t fc_iters = 200;
  double nodf_cutoff = 0.01, bandwidth = 3.0;
  double theta_a_override = 0.0, theta_t_override = 0.0;
  std::string communities_path, compare_labels_path;
  complexity_cmd->add_option("--iters", fc_iters, "fixed-point iterations")
      ->capture_default_str();
  complexity_cmd->add_option("--nodf-cutoff", nodf_cutoff, "binarization cutoff")
      ->capture_default_str();
  complexity_cmd->add_option("--bandwidth", bandwidth, "mean-shift bandwidth (log10)")
      ->capture_default_str();
  complexity_cmd->add_option("--theta-a", theta_a_override,
                             "explicit accessibility threshold");
  complexity_cmd->add_option("--theta-t", theta_t_override,
                             "explicit transferability threshold");
  complexity_cmd->add_option("--communities", communities_path,
                             "membership CSV for per-block nestedness");
  complexity_cmd->add_option("--compare-labels", compare_labels_path,
                             "scores CSV to cross-tabulate taxonomies against");

  // --- diagnostics -----------------------------------------------------------------
  auto* diagnostics_cmd =
      app.add_subcommand("diagnostics", "centralities, skill and size correlations");
  add_flow_options(diagnostics_cmd);
  std::string skills_path, mapping_path, diag_communities_path, sizes_path;
  std::string label_filter;
  std::size_t diag_iters = 200;
  diagnostics_cmd->add_option("--skills", skills_path, "occupation,skill,weight CSV")
      ->required();
  diagnostics_cmd->add_option("--mapping", mapping_path,
                              "source,target aggregation CSV");
  diagnostics_cmd->add_option("--communities", diag_communities_path,
                              "membership CSV")
      ->required();
  diagnostics_cmd->add_option("--sizes", sizes_path, "occupation,size CSV");
  diagnostics_cmd->add_option("--label-filter", label_filter,
                              "restrict correlations to one taxonomy class");
  diagnostics_cmd->add_option("--iters", diag_iters, "fixed-point iterations")
      ->capture_default_str();

  // --- policy -----------------------------------------------------------------------
  auto* policy_cmd = app.add_subcommand("policy", "link-addition retraining strategies");
  add_flow_options(policy_cmd);
  std::string strategy_name = "informed";
  laborflow::PolicyOptions policy_options;
  std::string policy_skills_path, policy_mapping_path;
  policy_cmd->add_option("--strategy", strategy_name, "skills|informed")
      ->capture_default_str();
  policy_cmd->add_option("--delta", policy_options.delta, "injected flow")
      ->capture_default_str();
  policy_cmd->add_option("--steps", policy_options.steps, "random walk steps")
      ->capture_default_str();
  policy_cmd->add_option("--seeds", policy_options.n_seeds, "random walk seeds")
      ->capture_default_str();
  policy_cmd->add_option("--percentile", policy_options.percentile,
                         "similarity percentile threshold")
      ->capture_default_str();
  policy_cmd->add_option("--top-n", policy_options.top_n, "fallback candidate count")
      ->capture_default_str();
  policy_cmd->add_option("--seed0", policy_options.seed0, "walk seed")
      ->capture_default_str();
  policy_cmd->add_option("--iters", policy_options.fc_iterations,
                         "fixed-point iterations for stability scoring")
      ->capture_default_str();
  policy_cmd->add_flag("--with-self-loops", policy_options.with_self_loops,
                       "walk on the matrix without removing self-loops");
  policy_cmd->add_option("--skills", policy_skills_path, "occupation,skill,weight CSV")
      ->required();
  policy_cmd->add_option("--mapping", policy_mapping_path,
                         "source,target aggregation CSV");
  std::vector<std::string> policy_starts;
  policy_cmd->add_option("--start", policy_starts,
                         "restrict coverage walks to these start occupations");

  CLI11_PARSE(app, argc, argv);
  const fs::path out(out_dir);

  try {
    if (*synth) {
      return run_synth(synth_kind, synth_n, synth_seed, synth_c, synth_p_in,
                       synth_p_out, synth_gamma, synth_weight, synth_base,
                       synth_swaps, out / synth_file);
    }

    if (*ingest) {
      const FlowCounts counts = laborflow::io::read_flows_csv(flows_path);
      ordered_json config{{"flows", flows_path}};
      ordered_json report = make_report("ingest", config);
      report["occupations"] = counts.size();
      report["total_transitions"] = counts.total();
      std::int64_t entries = 0, exits = 0;
      for (std::size_t v = 0; v < counts.size(); ++v) {
        entries += counts.entry_counts[v];
        exits += counts.exit_counts[v];
      }
      report["entries"] = entries;
      report["exits"] = exits;
      report["groups"] = ordered_json::array();
      for (const auto& [tag, _] : counts.tags) report["groups"].push_back(tag);
      write_report(out / "ingest.json", report);
      return 0;
    }

    if (*matrix_cmd) {
      const FlowCounts counts = laborflow::io::read_flows_csv(flows_path);
      TransitionMatrix tm = laborflow::build_transition_matrix(counts, theta);
      if (strip) tm = laborflow::strip_self_loops(tm);
      laborflow::io::write_matrix(out / "matrix.csv", out / "matrix.json", tm);
      std::cout << "wrote " << (out / "matrix.csv").string() << "\n";

      if (!stability_base.empty()) {
        std::map<std::string, TransitionMatrix> by_year;
        for (const auto& [tag, split] : counts.tags)
          by_year.emplace(tag, laborflow::build_transition_matrix(split, theta));
        const laborflow::StabilityCoefficients sc =
            laborflow::temporal_stability(by_year, stability_base);
        std::string csv = "year,occupation,alpha,beta,n_points\n";
        for (std::size_t y = 0; y < sc.years.size(); ++y)
          for (std::size_t v = 0; v < sc.occupations.size(); ++v)
            if (sc.cells[y][v])
              csv += sc.years[y] + "," + sc.occupations[v].code + "," +
                     laborflow::io::format_double(sc.cells[y][v]->alpha) + "," +
                     laborflow::io::format_double(sc.cells[y][v]->beta) + "," +
                     std::to_string(sc.cells[y][v]->n_points) + "\n";
        laborflow::io::write_text(out / "stability.csv", csv);
        std::cout << "wrote " << (out / "stability.csv").string() << "\n";
      }
      return 0;
    }

    if (*communities_cmd) {
      const FlowCounts counts = laborflow::io::read_flows_csv(flows_path);
      const laborflow::CommunityAssignment assignment =
          laborflow::brim(counts, brim_options);
      laborflow::io::write_communities_csv(out / "communities.csv", assignment);
      ordered_json config{{"flows", flows_path},
                          {"cmax", brim_options.c_max},
                          {"seeds", brim_options.restarts},
                          {"seed", brim_options.seed}};
      ordered_json report = make_report("communities", config);
      report["modularity"] = assignment.modularity;
      report["n_communities"] = assignment.n_communities;
      ordered_json membership = ordered_json::object();
      for (std::size_t v = 0; v < assignment.occupations.size(); ++v)
        membership[assignment.occupations[v].code] = assignment.membership[v];
      report["membership"] = membership;
      write_report(out / "communities.json", report);
      return 0;
    }

    if (*steady) {
      const FlowCounts counts = laborflow::io::read_flows_csv(flows_path);
      const TransitionMatrix tm = laborflow::build_transition_matrix(counts, theta);
      std::vector<double> observed =
          observed_path.empty()
              ? observed_shares_from(counts)
              : aligned_values(counts, laborflow::io::read_value_csv(observed_path),
                               "observed shares");
      const laborflow::SteadyStateReport ssr =
          laborflow::deviation_report(observed, tm);

      ordered_json config{{"flows", flows_path},
                          {"theta", theta},
                          {"observed", observed_path.empty() ? "derived" : observed_path}};
      ordered_json report = make_report("steady-state", config);
      ordered_json stationary = ordered_json::object();
      ordered_json deviations = ordered_json::object();
      for (std::size_t v = 0; v < counts.size(); ++v) {
        stationary[counts.occupations[v].code] = ssr.stationary[v];
        deviations[counts.occupations[v].code] = json_or_null(ssr.deviations_pct[v]);
      }
      report["stationary"] = stationary;
      report["lambda2"] = ssr.lambda2_modulus;
      report["halftime"] = std::isinf(ssr.halftime) ? ordered_json("inf")
                                                    : ordered_json(ssr.halftime);
      report["deviations"] = deviations;  // percent difference per occupation
      report["share_exceeding_10pct"] = ssr.share_exceeding_10pct;
      report["stationary_converged"] = ssr.stationary_converged;
      report["gap_converged"] = ssr.gap_converged;
      report["closed_classes"] = ssr.closed_classes;
      if (ssr.closed_classes.size() > 1)
        std::cerr << "warning: reducible chain with " << ssr.closed_classes.size()
                  << " closed classes; stationary vector depends on the start\n";
      write_report(out / "steady_state.json", report);
      if (!ssr.stationary_converged || !ssr.gap_converged)
        throw NumericError("power iteration did not converge");
      return 0;
    }

    if (*complexity_cmd) {
      const FlowCounts counts = laborflow::io::read_flows_csv(flows_path);
      const TransitionMatrix included = laborflow::build_transition_matrix(counts, theta);
      const TransitionMatrix stripped = laborflow::strip_self_loops(included);
      const laborflow::AccessTransferScores scores =
          laborflow::fitness_complexity(stripped, fc_iters);

      std::vector<double> a_values, t_values;
      for (std::size_t v = 0; v < counts.size(); ++v) {
        if (scores.accessibility[v]) a_values.push_back(*scores.accessibility[v]);
        if (scores.transferability[v]) t_values.push_back(*scores.transferability[v]);
      }
      double theta_a = theta_a_override, theta_t = theta_t_override;
      std::optional<laborflow::MeanShiftResult> ms_a, ms_t;
      if (theta_a <= 0.0) {
        ms_a = laborflow::mean_shift_1d(a_values, bandwidth);
        if (!ms_a->threshold)
          throw NumericError(
              "mean-shift found a single accessibility mode; pass --theta-a");
        theta_a = *ms_a->threshold;
      }
      if (theta_t <= 0.0) {
        ms_t = laborflow::mean_shift_1d(t_values, bandwidth);
        if (!ms_t->threshold)
          throw NumericError(
              "mean-shift found a single transferability mode; pass --theta-t");
        theta_t = *ms_t->threshold;
      }
      const laborflow::TaxonomyLabels labels =
          laborflow::classify_taxonomy(scores, theta_a, theta_t);
      laborflow::io::write_scores_csv(out / "scores.csv", scores, &labels);
      std::cout << "wrote " << (out / "scores.csv").string() << "\n";

      const laborflow::BinaryGrid binary =
          laborflow::binarize_for_nestedness(stripped, nodf_cutoff);
      ordered_json config{{"flows", flows_path},    {"theta", theta},
                          {"iters", fc_iters},      {"nodf_cutoff", nodf_cutoff},
                          {"bandwidth", bandwidth}, {"theta_a", theta_a},
                          {"theta_t", theta_t}};
      ordered_json report = make_report("complexity", config);
      report["converged"] = scores.converged;
      report["rank_stable_at"] = scores.rank_stable_at;
      report["no_inflow"] = scores.no_inflow;
      report["no_outflow"] = scores.no_outflow;
      ordered_json score_map = ordered_json::object();
      ordered_json label_map = ordered_json::object();
      for (std::size_t v = 0; v < counts.size(); ++v) {
        const std::string& code = counts.occupations[v].code;
        score_map[code] = {{"accessibility", json_or_null(scores.accessibility[v])},
                           {"transferability", json_or_null(scores.transferability[v])}};
        label_map[code] = labels.labels[v]
                              ? ordered_json(laborflow::taxonomy_name(*labels.labels[v]))
                              : ordered_json(nullptr);
      }
      report["scores"] = score_map;
      report["labels"] = label_map;
      report["thresholds"] = {{"theta_A", theta_a},
                              {"theta_A_log10", std::log10(theta_a)},
                              {"theta_T", theta_t},
                              {"theta_T_log10", std::log10(theta_t)}};
      ordered_json class_sizes = ordered_json::object();
      for (int t = 0; t < 4; ++t) {
        int count = 0;
        for (const auto& l : labels.labels)
          if (l && static_cast<int>(*l) == t) ++count;
        class_sizes[laborflow::taxonomy_name(static_cast<laborflow::Taxonomy>(t))] =
            count;
      }
      report["class_sizes"] = class_sizes;
      report["nodf"] = laborflow::nodf(binary);

      if (!communities_path.empty()) {
        const laborflow::CommunityAssignment assignment =
            laborflow::io::read_communities_csv(communities_path, counts);
        const laborflow::PerBlockNodf blocks =
            laborflow::per_block_nodf(binary, assignment);
        ordered_json per_block = ordered_json::array();
        for (const auto& b : blocks.per_community) per_block.push_back(json_or_null(b));
        report["per_block_nodf"] = per_block;
        report["per_block_nodf_mean"] = json_or_null(blocks.mean);
      }
      if (!compare_labels_path.empty()) {
        const laborflow::TaxonomyLabels mine{
            labels.occupations, labels.labels, labels.theta_A, labels.theta_T};
        const laborflow::TaxonomyLabels other =
            laborflow::io::read_labels_csv(compare_labels_path);
        const laborflow::ConfusionMatrix cm = laborflow::taxonomy_confusion(mine, other);
        ordered_json confusion = ordered_json::array();
        for (int a = 0; a < 4; ++a) {
          ordered_json row = ordered_json::array();
          for (int b = 0; b < 4; ++b) row.push_back(cm.counts[a][b]);
          confusion.push_back(row);
        }
        report["confusion"] = confusion;
        report["confusion_total"] = cm.total;
        report["confusion_off_diagonal"] = cm.off_diagonal();
      }
      write_report(out / "complexity.json", report);
      return 0;
    }

    if (*diagnostics_cmd) {
      const FlowCounts counts = laborflow::io::read_flows_csv(flows_path);
      const TransitionMatrix stripped =
          laborflow::strip_self_loops(laborflow::build_transition_matrix(counts, theta));
      const laborflow::CommunityAssignment assignment =
          laborflow::io::read_communities_csv(diag_communities_path, counts);
      const laborflow::SkillMatrix skills =
          align_skills(load_skills(skills_path, mapping_path), counts.occupations);
      const laborflow::AccessTransferScores scores =
          laborflow::fitness_complexity(stripped, diag_iters);
      const std::vector<double> bc = laborflow::betweenness(stripped);
      const laborflow::ClosenessResult cc = laborflow::closeness(stripped);
      const laborflow::InterIntraScores skill_scores =
          laborflow::inter_intra_scores(skills, assignment);

      std::vector<char> filter;
      if (!label_filter.empty()) {
        const auto wanted = laborflow::taxonomy_from_name(label_filter);
        if (!wanted) throw InputError("unknown taxonomy label '" + label_filter + "'");
        // The filter needs thresholds; reuse mean-shift defaults on the scores.
        std::vector<double> a_values, t_values;
        for (std::size_t v = 0; v < counts.size(); ++v) {
          if (scores.accessibility[v]) a_values.push_back(*scores.accessibility[v]);
          if (scores.transferability[v]) t_values.push_back(*scores.transferability[v]);
        }
        const auto ms_a = laborflow::mean_shift_1d(a_values, 3.0);
        const auto ms_t = laborflow::mean_shift_1d(t_values, 3.0);
        if (!ms_a.threshold || !ms_t.threshold)
          throw NumericError("mean-shift thresholds undefined; cannot filter by label");
        const laborflow::TaxonomyLabels labels =
            laborflow::classify_taxonomy(scores, *ms_a.threshold, *ms_t.threshold);
        filter.resize(counts.size(), 0);
        for (std::size_t v = 0; v < counts.size(); ++v)
          filter[v] = labels.labels[v] && *labels.labels[v] == *wanted;
      }

      auto filtered_spearman = [&](auto&& value_of_x, auto&& value_of_y) {
        std::vector<double> xs, ys;
        for (std::size_t v = 0; v < counts.size(); ++v) {
          if (!filter.empty() && !filter[v]) continue;
          const std::optional<double> x = value_of_x(v);
          const std::optional<double> y = value_of_y(v);
          if (x && y) {
            xs.push_back(*x);
            ys.push_back(*y);
          }
        }
        return xs.size() >= 2 ? laborflow::spearman(xs, ys) : std::nullopt;
      };
      auto accessibility = [&](std::size_t v) { return scores.accessibility[v]; };
      auto transferability = [&](std::size_t v) { return scores.transferability[v]; };

      ordered_json config{{"flows", flows_path},
                          {"theta", theta},
                          {"skills", skills_path},
                          {"mapping", mapping_path},
                          {"communities", diag_communities_path},
                          {"sizes", sizes_path},
                          {"label_filter", label_filter},
                          {"iters", diag_iters}};
      ordered_json report = make_report("diagnostics", config);
      report["rho_accessibility_betweenness"] = json_or_null(filtered_spearman(
          accessibility, [&](std::size_t v) { return std::optional<double>(bc[v]); }));
      report["rho_transferability_closeness"] = json_or_null(filtered_spearman(
          transferability,
          [&](std::size_t v) { return std::optional<double>(cc.closeness[v]); }));
      report["rho_accessibility_dp"] = json_or_null(
          filtered_spearman(accessibility, [&](std::size_t v) { return skill_scores.d_p[v]; }));
      report["rho_transferability_dr"] = json_or_null(filtered_spearman(
          transferability, [&](std::size_t v) { return skill_scores.d_r[v]; }));

      if (!sizes_path.empty()) {
        const std::vector<double> sizes = aligned_values(
            counts, laborflow::io::read_value_csv(sizes_path), "sizes");
        const laborflow::SizeCorrelations sc = laborflow::size_correlations(
            scores, sizes, filter.empty() ? nullptr : &filter);
        report["rho_accessibility_size"] = json_or_null(sc.rho_accessibility);
        report["rho_transferability_size"] = json_or_null(sc.rho_transferability);
      }

      const laborflow::InterCommunityShare ics =
          laborflow::inter_community_share(stripped, assignment);
      report["inter_community_share"] = ics.inter_share;
      const std::vector<laborflow::EntryExitShare> shares =
          laborflow::entry_exit_shares(counts, assignment);
      ordered_json boundary = ordered_json::array();
      for (const auto& s : shares)
        boundary.push_back({{"inflow_from_outside", json_or_null(s.inflow_from_outside)},
                            {"outflow_to_outside", json_or_null(s.outflow_to_outside)}});
      report["entry_exit_shares"] = boundary;

      std::string centralities = "occupation,betweenness,closeness,harmonic\n";
      for (std::size_t v = 0; v < counts.size(); ++v)
        centralities += counts.occupations[v].code + "," +
                        laborflow::io::format_double(bc[v]) + "," +
                        laborflow::io::format_double(cc.closeness[v]) + "," +
                        laborflow::io::format_double(cc.harmonic[v]) + "\n";
      laborflow::io::write_text(out / "centralities.csv", centralities);
      write_report(out / "diagnostics.json", report);
      return 0;
    }

    if (*policy_cmd) {
      const FlowCounts counts = laborflow::io::read_flows_csv(flows_path);
      const TransitionMatrix included = laborflow::build_transition_matrix(counts, theta);
      const laborflow::SkillMatrix skills = align_skills(
          load_skills(policy_skills_path, policy_mapping_path), counts.occupations);
      const laborflow::Matrix similarity = laborflow::skill_similarity_matrix(skills);
      for (const std::string& code : policy_starts) {
        const auto idx = counts.index_of(code);
        if (!idx) throw InputError("unknown start occupation '" + code + "'");
        policy_options.start_set.push_back(*idx);
      }

      laborflow::PolicyOutcome outcome;
      if (strategy_name == "skills" || strategy_name == "skills_only") {
        outcome = laborflow::skills_only_strategy(included, similarity, policy_options);
      } else if (strategy_name == "informed") {
        const laborflow::AccessTransferScores scores = laborflow::fitness_complexity(
            laborflow::strip_self_loops(included), policy_options.fc_iterations);
        outcome = laborflow::informed_strategy(included, similarity,
                                               scores.transferability, policy_options);
      } else {
        throw InputError("unknown strategy '" + strategy_name + "'");
      }

      laborflow::io::write_matrix(out / "modified_matrix.csv",
                                  out / "modified_matrix.json", outcome.modified);
      std::string links = "origin,destination,delta\n";
      for (const auto& l : outcome.added_links)
        links += l.origin + "," + l.destination + "," +
                 laborflow::io::format_double(l.delta) + "\n";
      laborflow::io::write_text(out / "added_links.csv", links);
      std::string coverage = "seed,coverage_before,coverage_after\n";
      for (std::size_t s = 0; s < outcome.coverage_before.size(); ++s)
        coverage += std::to_string(s) + "," +
                    laborflow::io::format_double(outcome.coverage_before[s]) + "," +
                    laborflow::io::format_double(outcome.coverage_after[s]) + "\n";
      laborflow::io::write_text(out / "coverage.csv", coverage);

      double mean_before = 0.0, mean_after = 0.0;
      for (double v : outcome.coverage_before) mean_before += v;
      for (double v : outcome.coverage_after) mean_after += v;
      mean_before /= static_cast<double>(outcome.coverage_before.size());
      mean_after /= static_cast<double>(outcome.coverage_after.size());

      ordered_json config{{"flows", flows_path},
                          {"theta", theta},
                          {"strategy", laborflow::strategy_name(outcome.strategy)},
                          {"delta", policy_options.delta},
                          {"steps", policy_options.steps},
                          {"seeds", policy_options.n_seeds},
                          {"percentile", policy_options.percentile},
                          {"top_n", policy_options.top_n},
                          {"seed0", policy_options.seed0},
                          {"with_self_loops", policy_options.with_self_loops},
                          {"iters", policy_options.fc_iterations},
                          {"skills", policy_skills_path},
                          {"mapping", policy_mapping_path},
                          {"starts", policy_starts}};
      ordered_json report = make_report("policy", config);
      report["added_links"] = outcome.added_links.size();
      report["skipped_origins"] = outcome.skipped;
      report["mean_coverage_before"] = mean_before;
      report["mean_coverage_after"] = mean_after;
      report["rho_accessibility"] = json_or_null(outcome.rho_accessibility);
      report["rho_transferability"] = json_or_null(outcome.rho_transferability);
      report["percentile_threshold"] = json_or_null(outcome.percentile_threshold);
      report["coverage_counts_start_nodes"] = true;
      write_report(out / "policy.json", report);
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
