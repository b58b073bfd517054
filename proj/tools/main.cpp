// Command-line surface for the pseudo-label de-noising and VOC evaluation
// toolkit. Every subcommand is a thin shell over the library calls; all
// randomness enters via --seed.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pseudovoc/pseudovoc.hpp"

namespace fs = std::filesystem;
using namespace pseudovoc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

DetectionSet read_dump_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "'");
  return read_dump(in, path.filename().string());
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write '" + path.string() + "'");
}

Dataset load_devkit_split(const fs::path& devkit_dir, const std::string& split) {
  return load_dataset(devkit_dir / "Annotations",
                      devkit_dir / "ImageSets" / "Main" / (split + ".txt"));
}

struct EvalArgs {
  std::string gt_dir;
  std::string split;
  std::string dets;
  double iou_thr = kDefaultIouThreshold;
  std::string mode = "11pt";
  int workers = 1;
  std::string report_path;
};

int cmd_eval(const EvalArgs& args) {
  const Dataset dataset = load_devkit_split(args.gt_dir, args.split);
  const DetectionSet dets = read_dump_file(args.dets);
  const ApReport report =
      evaluate(dets, dataset, args.iou_thr, ap_mode_from_string(args.mode), args.workers);

  const fs::path report_path =
      args.report_path.empty() ? fs::path(args.dets + ".ap.json") : fs::path(args.report_path);
  write_text_file(report_path, report_to_json(report));

  RunManifest manifest;
  manifest.command = "eval";
  manifest.params["gt"] = args.gt_dir;
  manifest.params["split"] = args.split;
  manifest.params["dets"] = args.dets;
  manifest.params["iou"] = args.iou_thr;
  manifest.params["mode"] = args.mode;
  manifest.params["workers"] = args.workers;
  manifest.inputs = {fs::path(args.dets)};
  manifest.outputs = {report_path};
  write_manifest(manifest, report_path.string() + ".manifest.json");

  std::cout << render_table({{fs::path(args.dets).filename().string(), report}});
  std::cout << "mAP = " << format_percent(report.map) << "\n";
  return kExitOk;
}

struct FilterArgs {
  std::string dets;
  std::string gt_dir;
  std::string split;
  double tau = kDefaultScoreThreshold;
  std::optional<double> nms_thr;
  std::string out;
};

int cmd_filter(const FilterArgs& args) {
  const Dataset dataset = load_devkit_split(args.gt_dir, args.split);
  const auto labels = image_level_labels(dataset);

  DetectionSet dets = read_dump_file(args.dets);
  const std::size_t before = dets.items.size();
  dets = threshold_filter(dets, args.tau);
  dets = class_consistency_filter(dets, labels);
  if (args.nms_thr) dets = nms(dets, *args.nms_thr);

  write_text_file(args.out, dump_to_string(dets));
  std::cout << "kept " << dets.items.size() << " of " << before << " detections -> "
            << args.out << "\n";

  RunManifest manifest;
  manifest.command = "filter";
  manifest.params["dets"] = args.dets;
  manifest.params["gt"] = args.gt_dir;
  manifest.params["split"] = args.split;
  manifest.params["tau"] = args.tau;
  if (args.nms_thr) {
    manifest.params["nms"] = *args.nms_thr;
  } else {
    manifest.params["nms"] = nullptr;
  }
  manifest.inputs = {fs::path(args.dets)};
  manifest.outputs = {fs::path(args.out)};
  write_manifest(manifest, args.out + ".manifest.json");
  return kExitOk;
}

struct ExportArgs {
  std::string dets;
  std::string out_dir;
  std::string split_name = "pseudo";
  std::optional<int> max_per_class;
};

int cmd_export(const ExportArgs& args) {
  DetectionSet dets = read_dump_file(args.dets);
  if (args.max_per_class) dets = cap_per_class(dets, *args.max_per_class);

  PseudoLabelParams params;
  params.max_per_class = args.max_per_class;
  const PseudoLabelSet labels = build_pseudo_labels(dets, params);
  export_voc(labels, args.out_dir, args.split_name);
  std::cout << "wrote " << labels.by_image.size() << " annotation files -> "
            << args.out_dir << "\n";

  RunManifest manifest;
  manifest.command = "export";
  manifest.params["dets"] = args.dets;
  manifest.params["out"] = args.out_dir;
  manifest.params["split_name"] = args.split_name;
  if (args.max_per_class) {
    manifest.params["max_per_class"] = *args.max_per_class;
  } else {
    manifest.params["max_per_class"] = nullptr;
  }
  manifest.inputs = {fs::path(args.dets)};
  for (const auto& [image_id, objects] : labels.by_image) {
    manifest.outputs.push_back(fs::path(args.out_dir) / "Annotations" / (image_id + ".xml"));
  }
  manifest.outputs.push_back(fs::path(args.out_dir) / "ImageSets" / "Main" /
                             (args.split_name + ".txt"));
  write_manifest(manifest, fs::path(args.out_dir) / "manifest.json");
  return kExitOk;
}

struct SimulateArgs {
  std::string gt_dir;
  std::string split;
  std::uint64_t seed = 0;
  NoiseParams params;
  std::string out;
};

int cmd_simulate(const SimulateArgs& args) {
  args.params.validate();
  const Dataset dataset = load_devkit_split(args.gt_dir, args.split);
  const DetectionSet dets = corrupt_dataset(dataset, args.params, args.seed);
  write_text_file(args.out, dump_to_string(dets));
  std::cout << "wrote " << dets.items.size() << " detections for "
            << dataset.images.size() << " images -> " << args.out << "\n";

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.params["gt"] = args.gt_dir;
  manifest.params["split"] = args.split;
  manifest.params["seed"] = args.seed;
  manifest.params["jitter"] = args.params.jitter_sigma;
  manifest.params["miss"] = args.params.miss_prob;
  manifest.params["flip"] = args.params.flip_prob;
  manifest.params["spurious"] = args.params.spurious_rate;
  manifest.params["score_tp"] = {args.params.score_tp.lo, args.params.score_tp.hi};
  manifest.params["score_noise"] = {args.params.score_noise.lo, args.params.score_noise.hi};
  manifest.outputs = {fs::path(args.out)};
  write_manifest(manifest, args.out + ".manifest.json");
  return kExitOk;
}

int cmd_compare(const std::vector<std::string>& specs) {
  std::vector<std::pair<std::string, ApReport>> reports;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw Error(ErrorKind::InvalidParams, "--report expects NAME=PATH, got '" + spec + "'");
    }
    const std::string name = spec.substr(0, eq);
    const fs::path path = spec.substr(eq + 1);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    reports.emplace_back(name, report_from_json(buf.str()));
  }
  std::cout << render_table(reports);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"De-noise weak-detector outputs into pseudo-strong VOC labels "
               "and evaluate detection sets under the VOC 2007 protocol"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a detection dump against a split");
  eval_cmd->add_option("--gt", eval_args.gt_dir, "Devkit directory")->required();
  eval_cmd->add_option("--split", eval_args.split, "Split name (train/val/trainval/test)")->required();
  eval_cmd->add_option("--dets", eval_args.dets, "Detection dump path")->required();
  eval_cmd->add_option("--iou", eval_args.iou_thr, "IoU threshold")->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--mode", eval_args.mode, "AP mode: 11pt or area")
      ->check(CLI::IsMember({"11pt", "area"}));
  eval_cmd->add_option("--workers", eval_args.workers, "Per-class worker threads")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--report", eval_args.report_path,
                       "Report output path (default: <dets>.ap.json)");

  FilterArgs filter_args;
  double nms_value = kDefaultNmsIou;
  auto* filter_cmd = app.add_subcommand(
      "filter", "Threshold, then drop detections of classes absent from their image");
  filter_cmd->add_option("--dets", filter_args.dets, "Detection dump path")->required();
  filter_cmd->add_option("--gt", filter_args.gt_dir, "Devkit directory")->required();
  filter_cmd->add_option("--split", filter_args.split, "Split name")->required();
  filter_cmd->add_option("--tau", filter_args.tau, "Score threshold")->check(CLI::Range(0.0, 1.0));
  auto* nms_opt = filter_cmd
                      ->add_option("--nms", nms_value,
                                   "Enable per-image, per-class NMS at this IoU "
                                   "(conventional choice: 0.3)")
                      ->check(CLI::Range(0.0, 1.0));
  filter_cmd->add_option("--out", filter_args.out, "Filtered dump path")->required();

  ExportArgs export_args;
  int max_per_class_value = 0;
  auto* export_cmd =
      app.add_subcommand("export", "Write a filtered dump as VOC pseudo annotations");
  export_cmd->add_option("--dets", export_args.dets, "Filtered dump path")->required();
  export_cmd->add_option("--out", export_args.out_dir, "Output directory")->required();
  export_cmd->add_option("--split-name", export_args.split_name, "Split file name");
  auto* cap_opt = export_cmd->add_option("--max-per-class", max_per_class_value,
                                         "Keep top-N detections per image and class")
                      ->check(CLI::NonNegativeNumber);

  SimulateArgs sim_args;
  std::vector<double> score_tp{1.0, 1.0};
  std::vector<double> score_noise{0.1, 0.9};
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Corrupt ground truth into a synthetic weak-detector dump");
  sim_cmd->add_option("--gt", sim_args.gt_dir, "Devkit directory")->required();
  sim_cmd->add_option("--split", sim_args.split, "Split name")->required();
  sim_cmd->add_option("--seed", sim_args.seed, "Generator seed")->required();
  sim_cmd->add_option("--jitter", sim_args.params.jitter_sigma, "Corner jitter sigma (pixels)");
  sim_cmd->add_option("--miss", sim_args.params.miss_prob, "Object miss probability");
  sim_cmd->add_option("--flip", sim_args.params.flip_prob, "Class flip probability");
  sim_cmd->add_option("--spurious", sim_args.params.spurious_rate,
                      "Expected spurious boxes per image (Poisson)");
  sim_cmd->add_option("--score-tp", score_tp, "Score interval for true boxes: LO HI")
      ->expected(2);
  sim_cmd->add_option("--score-noise", score_noise, "Score interval for noise boxes: LO HI")
      ->expected(2);
  sim_cmd->add_option("--out", sim_args.out, "Output dump path")->required();

  std::vector<std::string> compare_specs;
  auto* compare_cmd = app.add_subcommand("compare", "Render a comparison table of reports");
  compare_cmd->add_option("--report", compare_specs, "NAME=PATH of an ApReport document")
      ->required()
      ->take_all();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (eval_cmd->parsed()) return cmd_eval(eval_args);
    if (filter_cmd->parsed()) {
      if (nms_opt->count() > 0) filter_args.nms_thr = nms_value;
      return cmd_filter(filter_args);
    }
    if (export_cmd->parsed()) {
      if (cap_opt->count() > 0) export_args.max_per_class = max_per_class_value;
      return cmd_export(export_args);
    }
    if (sim_cmd->parsed()) {
      sim_args.params.score_tp = {score_tp[0], score_tp[1]};
      sim_args.params.score_noise = {score_noise[0], score_noise[1]};
      return cmd_simulate(sim_args);
    }
    if (compare_cmd->parsed()) return cmd_compare(compare_specs);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
