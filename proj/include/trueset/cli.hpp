#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trueset/augment.hpp"
#include "trueset/embed.hpp"
#include "trueset/error.hpp"
#include "trueset/eval.hpp"
#include "trueset/feature_table.hpp"
#include "trueset/manifest.hpp"
#include "trueset/png_io.hpp"
#include "trueset/select.hpp"

namespace trueset::cli {

namespace fs = std::filesystem;

namespace detail {

// Writes to `path`, or stdout when the path is empty or "-".
inline void write_text(const std::string& text, const std::string& path, std::ostream& stdout_) {
  if (path.empty() || path == "-") {
    stdout_ << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("TRUESET_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used, 0);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(std::string("TRUESET_SEED is not an unsigned integer: ") + env);
  }
  return 0;
}

struct PairSource {
  std::string pred_dir;
  std::string gt_manifest;
  std::string split;  // empty: every entry with a mask
  bool invert_masks = false;
  std::size_t jobs = 1;
};

inline std::vector<ScoredPair> load_pairs(const PairSource& src) {
  const DatasetManifest m = load_manifest(src.gt_manifest);
  std::optional<Split> only;
  if (!src.split.empty()) {
    only = parse_split(src.split);
    if (!only) throw Error("unknown split '" + src.split + "'");
  }
  std::vector<const ManifestEntry*> chosen;
  for (const auto& e : m.entries())
    if (e.mask_path && (!only || e.split == *only)) chosen.push_back(&e);
  if (chosen.empty()) throw Error("no ground-truth entries to evaluate");

  std::vector<ScoredPair> pairs(chosen.size());
  parallel_for(chosen.size(), src.jobs, [&](std::size_t i) {
    const ManifestEntry& e = *chosen[i];
    pairs[i].id = e.id;
    pairs[i].prediction = read_probability_map(fs::path(src.pred_dir) / (e.id + ".png"));
    pairs[i].ground_truth = read_mask(m.resolve(*e.mask_path), src.invert_masks);
    if (!pairs[i].prediction.same_shape(pairs[i].ground_truth))
      throw DimensionMismatch("pair '" + e.id + "': prediction and ground truth differ in size");
  });
  return pairs;
}

inline void add_pair_options(CLI::App* cmd, PairSource& src) {
  cmd->add_option("--pred-dir", src.pred_dir, "Directory of <id>.png probability maps")
      ->required();
  cmd->add_option("--gt-manifest,--manifest", src.gt_manifest,
                  "Manifest listing ground-truth masks")
      ->required();
  cmd->add_option("--split", src.split, "Only score entries with this split (train|val|test)");
  cmd->add_flag("--invert-masks", src.invert_masks, "Treat dark mask pixels as cracks");
  cmd->add_option("--jobs", src.jobs, "Worker threads")->capture_default_str();
}

}  // namespace detail

// Returns the process exit code: 0 success, 1 runtime error, 2 usage error.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Dataset curation and evaluation for binary crack segmentation"};
  app.name("trueset");
  app.require_subcommand(1);

  // features
  auto* features = app.add_subcommand("features", "Write a TDF1 feature table for a manifest");
  std::string f_manifest, f_provider = "builtin", f_features, f_out;
  int f_cells = 16, f_bins = 8;
  std::size_t f_jobs = 1;
  features->add_option("--manifest", f_manifest, "Dataset manifest")->required();
  features->add_option("--provider", f_provider, "Feature source")
      ->check(CLI::IsMember({"file", "builtin"}))
      ->capture_default_str();
  features->add_option("--features", f_features, "Input TDF1 table (provider=file)");
  features->add_option("--out", f_out, "Output TDF1 path")->required();
  features->add_option("--cells", f_cells, "Builtin descriptor grid side")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  features->add_option("--hist-bins", f_bins, "Builtin gradient histogram buckets")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  features->add_option("--jobs", f_jobs, "Worker threads")->capture_default_str();

  // select
  auto* select = app.add_subcommand("select", "Select a distribution-representative trueset");
  std::string s_manifest, s_provider, s_features, s_out, s_coords;
  std::size_t s_bins = 10, s_jobs = 1;
  double s_s = 0.5;
  int s_components = 1;
  select->add_option("--manifest", s_manifest, "Dataset manifest")->required();
  select->add_option("--features", s_features, "TDF1 feature table (implies provider=file)");
  select->add_option("--provider", s_provider, "Feature source: file|builtin (default: file "
                                               "when --features is given, else builtin)")
      ->check(CLI::IsMember({"file", "builtin"}));
  select->add_option("--n-bins", s_bins, "Histogram bins")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}))
      ->capture_default_str();
  select->add_option("--s", s_s, "Selection parameter")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  select->add_option("--components", s_components, "PCA components written to the CSV")
      ->check(CLI::Range(1, 2))
      ->capture_default_str();
  select->add_option("--out", s_out, "Output trueset manifest")->required();
  select->add_option("--coords", s_coords,
                     "Coordinate CSV path (default: <out> with .csv extension)");
  select->add_option("--jobs", s_jobs, "Worker threads")->capture_default_str();

  // augment
  auto* augment = app.add_subcommand("augment", "Generate ground-truth augmentations");
  std::string a_mode = "sw", a_trueset, a_out_dir, a_out;
  std::vector<int> a_kernels;
  int a_scale = 4;
  std::size_t a_t0 = 50, a_t1 = 100, a_t2 = 200, a_jobs = 1;
  std::optional<std::uint64_t> a_seed;
  bool a_invert = false;
  augment->add_option("--mode", a_mode, "sw|sl|ss|mix")
      ->check(CLI::IsMember({"sw", "sl", "ss", "mix"}))
      ->capture_default_str();
  augment->add_option("--trueset,--manifest", a_trueset, "Manifest with train/val split")
      ->required();
  augment->add_option("--out-dir", a_out_dir, "Directory for augmented masks")->required();
  augment->add_option("--out", a_out, "Output manifest (default: <out-dir>/manifest.tsv)");
  augment->add_option("--kernels", a_kernels,
                      "Dilation kernel sizes (default 3,5,8; mix: 3,5)")
      ->delimiter(',');
  augment->add_option("--scale", a_scale, "Scale-space upscale factor")->capture_default_str();
  augment->add_option("--t0", a_t0, "Area up to which components are left intact")
      ->capture_default_str();
  augment->add_option("--t1", a_t1, "Area limit for 1-3 masking points")->capture_default_str();
  augment->add_option("--t2", a_t2, "Area limit for 2-5 masking points")->capture_default_str();
  augment->add_option("--seed", a_seed, "Random seed (fallback: TRUESET_SEED, then 0)");
  augment->add_flag("--invert-masks", a_invert, "Treat dark mask pixels as cracks");
  augment->add_option("--jobs", a_jobs, "Worker threads")->capture_default_str();

  // split
  auto* split = app.add_subcommand("split", "Deterministic train/val split of a whole manifest");
  std::string sp_manifest, sp_out;
  double sp_ratio = 0.90;
  split->add_option("--manifest", sp_manifest, "Dataset manifest")->required();
  split->add_option("--ratio", sp_ratio, "Train fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  split->add_option("--out", sp_out, "Output manifest")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score probability maps against ground truth");
  detail::PairSource e_src;
  double e_threshold = 0.5;
  bool e_grid = false;
  std::string e_dataset, e_out;
  detail::add_pair_options(evaluate, e_src);
  evaluate->add_option("--threshold", e_threshold, "Binarisation threshold T (pixel > T)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  evaluate->add_flag("--grid", e_grid, "Search T over 0.00..0.99 (step 0.01) for the best F");
  evaluate->add_option("--dataset", e_dataset, "Dataset name column (default: manifest stem)");
  evaluate->add_option("--out", e_out, "Output CSV (default: stdout)");

  // curves
  auto* curves = app.add_subcommand("curves", "ROC or PR points over the threshold grid");
  detail::PairSource c_src;
  std::string c_kind = "pr", c_out;
  detail::add_pair_options(curves, c_src);
  curves->add_option("--curve", c_kind, "roc|pr")
      ->check(CLI::IsMember({"roc", "pr"}))
      ->capture_default_str();
  curves->add_option("--out", c_out, "Output CSV (default: stdout)");

  // loss
  auto* loss = app.add_subcommand("loss", "Focal + dice loss of probability maps");
  detail::PairSource l_src;
  LossParams l_params;
  std::string l_out;
  detail::add_pair_options(loss, l_src);
  loss->add_option("--alpha", l_params.alpha, "Focal weighting factor")->capture_default_str();
  loss->add_option("--gamma", l_params.gamma, "Focal down-weighting exponent")
      ->capture_default_str();
  loss->add_option("--beta", l_params.beta, "Dice F-beta weight")->capture_default_str();
  loss->add_option("--out", l_out, "Output CSV (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // Prints help for --help, or the error message otherwise.
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (features->parsed()) {
      const DatasetManifest m = load_manifest(f_manifest);
      FeatureProvider provider = FeatureProvider::builtin(f_cells, f_bins);
      if (f_provider == "file") {
        if (f_features.empty()) {
          err << "trueset features: --provider file requires --features\n";
          return 2;
        }
        provider = FeatureProvider::from_file(f_features);
      }
      write_feature_table(features_for(m, provider, f_jobs), f_out);
    } else if (select->parsed()) {
      const DatasetManifest m = load_manifest(s_manifest);
      std::string kind = s_provider.empty() ? (s_features.empty() ? "builtin" : "file") : s_provider;
      FeatureProvider provider = FeatureProvider::builtin();
      if (kind == "file") {
        if (s_features.empty()) {
          err << "trueset select: --provider file requires --features\n";
          return 2;
        }
        provider = FeatureProvider::from_file(s_features);
      }
      const FeatureTable table = features_for(m, provider, s_jobs);
      const SelectionResult r = run_selection(table, s_bins, s_s, s_components);
      save_manifest(split_manifest(m, r.split), s_out);
      const fs::path coords =
          s_coords.empty() ? fs::path(s_out).replace_extension(".csv") : fs::path(s_coords);
      emit_coordinates(r.coords, r.distances, r.bins, s_components, coords);
    } else if (augment->parsed()) {
      const auto mode = *parse_augment_mode(a_mode);
      AugmentSpec spec = AugmentSpec::for_mode(mode);
      if (!a_kernels.empty()) spec.kernels = a_kernels;
      spec.scale = a_scale;
      spec.t0 = a_t0;
      spec.t1 = a_t1;
      spec.t2 = a_t2;
      spec.seed = detail::resolve_seed(a_seed);
      try {
        spec.validate();
      } catch (const Error& e) {
        err << "trueset augment: " << e.what() << '\n';
        return 2;
      }
      const DatasetManifest m = load_manifest(a_trueset);
      fs::create_directories(a_out_dir);
      const DatasetManifest result = build_augmented_manifest(
          split_from_manifest(m), spec, m, a_out_dir, {a_jobs, a_invert});
      save_manifest(result, a_out.empty() ? fs::path(a_out_dir) / "manifest.tsv" : fs::path(a_out));
    } else if (split->parsed()) {
      const DatasetManifest m = load_manifest(sp_manifest);
      save_manifest(split_manifest(m, allset_split(m, sp_ratio)), sp_out);
    } else if (evaluate->parsed()) {
      const auto pairs = detail::load_pairs(e_src);
      const MetricReport report =
          e_grid ? grid_search_threshold(pairs) : evaluate_set(pairs, e_threshold);
      std::ostringstream csv;
      write_metric_header(csv);
      write_metric_row(e_dataset.empty() ? fs::path(e_src.gt_manifest).stem().string() : e_dataset,
                       report, csv);
      detail::write_text(csv.str(), e_out, out);
    } else if (curves->parsed()) {
      const auto pairs = detail::load_pairs(c_src);
      const CurveKind kind = c_kind == "roc" ? CurveKind::roc : CurveKind::pr;
      std::ostringstream csv;
      write_curve(curve_points(pairs, kind), kind, csv);
      detail::write_text(csv.str(), c_out, out);
    } else if (loss->parsed()) {
      const auto pairs = detail::load_pairs(l_src);
      std::ostringstream csv;
      csv << "id,l1,l2,total\n";
      for (const auto& p : pairs) {
        const LossValue v = focal_dice_loss(p.ground_truth, p.prediction, l_params);
        csv << p.id << ',' << format_real(v.focal) << ',' << format_real(v.dice) << ','
            << format_real(v.total) << '\n';
      }
      detail::write_text(csv.str(), l_out, out);
    }
  } catch (const std::exception& e) {
    err << "trueset: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace trueset::cli
