// Command-line front end: pair, batch and oracle subcommands.
//
// Exit codes: 0 success, 1 at least one batch job failed, 2 usage or input
// parse error.

#include "boxmetrics/boxmetrics.hpp"
#include "boxmetrics/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

namespace {

using namespace boxmetrics;

constexpr int kExitOk = 0;
constexpr int kExitJobError = 1;
constexpr int kExitUsage = 2;

/// Writes to stdout for "-" and to a file otherwise.
class Output {
public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open output '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

const io::BoxRecord& find_box(const std::vector<io::BoxRecord>& boxes, const std::string& id) {
  for (const auto& b : boxes)
    if (b.id == id) return b;
  throw std::invalid_argument("unknown box id '" + id + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oriented 3D bounding box metrics: IoU, v2v distance, BBD and more"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kVersion));

  std::string box_file, pairs_file, id_a, id_b, cloud_path, output = "-", metrics = "all";
  double tol = kDefaultTol;
  unsigned workers = 1;
  OracleConfig oracle_cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol", tol, "Containment / parameter tolerance")->check(CLI::NonNegativeNumber);
    sub->add_option("--output", output, "Output path, '-' for stdout");
  };

  auto* pair = app.add_subcommand("pair", "Metrics for one pair of boxes");
  pair->add_option("boxes", box_file, "Box file (JSON lines)")->required();
  pair->add_option("a", id_a, "Id of box A")->required();
  pair->add_option("b", id_b, "Id of box B")->required();
  pair->add_option("--cloud", cloud_path, "Point cloud (XYZ text or ascii PLY) for point IoU");
  pair->add_option("--metrics", metrics, "Comma-separated metrics, default all");
  add_common(pair);

  auto* batch = app.add_subcommand("batch", "Metrics for every job of a pairs file");
  batch->add_option("boxes", box_file, "Box file (JSON lines)")->required();
  batch->add_option("pairs", pairs_file, "Pairs file (JSON lines)")->required();
  batch->add_option("--metrics", metrics, "Comma-separated metrics, default all");
  batch->add_option("--workers", workers, "Concurrent jobs")->check(CLI::PositiveNumber);
  add_common(batch);

  auto* oracle = app.add_subcommand("oracle", "Compare exact IoU / v2v with sampling oracles");
  oracle->add_option("boxes", box_file, "Box file (JSON lines)")->required();
  oracle->add_option("a", id_a, "Id of box A")->required();
  oracle->add_option("b", id_b, "Id of box B")->required();
  oracle->add_option("--seed", oracle_cfg.seed, "Monte-Carlo seed");
  oracle->add_option("--samples", oracle_cfg.sample_count, "Monte-Carlo sample count")
      ->check(CLI::PositiveNumber);
  oracle->add_option("--grid", oracle_cfg.grid_res, "Lattice points per face edge")
      ->check(CLI::Range(2, 4096));
  add_common(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  io::RunOptions opt;
  opt.tol = tol;
  opt.workers = workers;
  std::vector<io::BoxRecord> boxes;
  std::unique_ptr<Output> out;
  try {
    opt.metrics = io::MetricSelection::parse(metrics);
    boxes = io::parse_box_file(box_file);
    out = std::make_unique<Output>(output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (*pair) {
    try {
      std::optional<PointCloud> cloud;
      if (!cloud_path.empty()) cloud = io::parse_point_cloud(cloud_path);
      const auto& a = find_box(boxes, id_a);
      const auto& b = find_box(boxes, id_b);
      out->stream() << io::run_pair(a, b, opt, cloud ? &*cloud : nullptr) << "\n";
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
    return kExitOk;
  }

  if (*batch) {
    std::vector<io::PairJob> jobs;
    try {
      jobs = io::parse_pairs_file(pairs_file);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
    const io::BatchResult result = io::run_batch(boxes, jobs, opt);
    for (const auto& line : result.lines) out->stream() << line << "\n";
    return result.exit_code() == 0 ? kExitOk : kExitJobError;
  }

  // oracle
  try {
    const OrientedBox a = io::to_box(find_box(boxes, id_a));
    const OrientedBox b = io::to_box(find_box(boxes, id_b));
    const McEstimate mc = mc_iou(a, b, oracle_cfg);
    out->stream() << "{\"a\":" << io::json_string(id_a) << ",\"b\":" << io::json_string(id_b)
                  << ",\"iou\":" << io::format_number(iou(a, b, tol))
                  << ",\"mc_iou\":" << io::format_number(mc.estimate)
                  << ",\"mc_std_error\":" << io::format_number(mc.std_error)
                  << ",\"v2v\":" << io::format_number(v2v(a, b, tol))
                  << ",\"sampled_v2v\":" << io::format_number(sampled_v2v(a, b, oracle_cfg))
                  << ",\"cell_diagonal\":"
                  << io::format_number(lattice_cell_diagonal(a, b, oracle_cfg.grid_res))
                  << ",\"seed\":" << oracle_cfg.seed << ",\"samples\":" << oracle_cfg.sample_count
                  << ",\"grid\":" << oracle_cfg.grid_res << "}\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
