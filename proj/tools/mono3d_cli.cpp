// mono3d command-line front end: recover 3D boxes from predicted factors,
// run the KITTI-style evaluation, and drive the simulation / gradient
// checking demos. Exit codes: 0 success, 1 assertion or metric failure,
// 2 input error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mono3d/boxes.hpp"
#include "mono3d/camera.hpp"
#include "mono3d/distance.hpp"
#include "mono3d/eval.hpp"
#include "mono3d/kitti_io.hpp"
#include "mono3d/losses.hpp"
#include "mono3d/scoring.hpp"
#include "mono3d/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInputError = 2;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
}

// Image ids = sorted stems of *.txt files in a directory.
std::vector<std::string> image_ids(const fs::path& dir, const std::string& ext) {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      ids.push_back(entry.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<double> parse_bins(const std::string& spec) {
  std::vector<double> edges;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) {
      edges.push_back(std::stod(tok));
    }
  }
  if (edges.empty() || !std::is_sorted(edges.begin(), edges.end())) {
    throw std::runtime_error("--bins must be ascending comma-separated edges");
  }
  return edges;
}

mono3d::Difficulty parse_difficulty(const std::string& s) {
  if (s == "easy") return mono3d::Difficulty::kEasy;
  if (s == "moderate") return mono3d::Difficulty::kModerate;
  if (s == "hard") return mono3d::Difficulty::kHard;
  throw std::runtime_error("unknown difficulty: " + s);
}

json bins_to_json(const std::vector<mono3d::DistanceBin>& bins) {
  json arr = json::array();
  for (const auto& b : bins) {
    json j;
    j["lo"] = b.lo;
    j["hi"] = std::isinf(b.hi) ? json(nullptr) : json(b.hi);
    j["count"] = b.count;
    j["mean_abs_error"] =
        b.mean_abs_error ? json(*b.mean_abs_error) : json(nullptr);
    arr.push_back(j);
  }
  return arr;
}

// ---------------------------------------------------------------- recover

struct RecoverOptions {
  std::string pred_dir;
  std::string calib_dir;
  std::string out_dir;
};

int run_recover(const RecoverOptions& opt) {
  fs::create_directories(opt.out_dir);
  if (!fs::is_directory(opt.pred_dir)) {
    std::cerr << "error: prediction dir not found: " << opt.pred_dir << "\n";
    return kExitInputError;
  }
  const auto ids = image_ids(opt.pred_dir, ".jsonl");
  if (ids.empty()) {
    std::cerr << "warning: no .jsonl prediction files in " << opt.pred_dir << "\n";
    return kExitOk;
  }
  for (const auto& id : ids) {
    const fs::path pred_path = fs::path(opt.pred_dir) / (id + ".jsonl");
    const fs::path calib_path = fs::path(opt.calib_dir) / (id + ".txt");
    if (!fs::exists(calib_path)) {
      std::cerr << "error: missing calibration for image " << id << ": "
                << calib_path.string() << "\n";
      return kExitInputError;
    }

    std::optional<mono3d::ProjectionMatrix> P;
    try {
      P = mono3d::parse_calib_file(read_file(calib_path));
    } catch (const std::exception& e) {
      std::cerr << "error: " << calib_path.string() << ": " << e.what() << "\n";
      return kExitInputError;
    }

    std::vector<mono3d::RecoveredDetection> recovered;
    json sidecar = json::array();
    std::ifstream in(pred_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) {
        continue;
      }
      try {
        const json obj = json::parse(line);
        mono3d::DetectionRecord rec;
        rec.cls = obj.at("cls").get<std::string>();
        rec.score = obj.at("score").get<double>();
        const auto& b = obj.at("box2d");
        rec.box2d = {b.at(0), b.at(1), b.at(2), b.at(3)};
        const auto& t = obj.at("t");
        const auto& size = obj.at("size");
        rec.size = {size.at(0), size.at(1), size.at(2)};  // W H L
        const auto& yaw = obj.at("yaw");
        rec.yaw = {yaw.at(0), yaw.at(1)};
        rec.factors = {rec.size.h, obj.at("h_rec").get<double>()};
        rec.sigma_height = obj.at("sigma_h").get<double>();
        rec.sigma_hrec = obj.at("sigma_hrec").get<double>();
        rec.focal = P->focal_length();

        rec.center_kpt =
            mono3d::denormalize_keypoint(rec.box2d, {t.at(0), t.at(1)});
        const mono3d::CameraPoint center =
            mono3d::recover_center(*P, rec.center_kpt, rec.factors);
        const double theta = mono3d::yaw_decode(rec.yaw);
        const double ry = mono3d::alpha_to_ry(theta, center.x, center.z);
        recovered.push_back({rec, {center, rec.size, ry}});

        json s;
        s["score"] = rec.score;
        s["composite_confidence"] = mono3d::composite_confidence(
            rec.score, rec.focal, rec.factors.height, rec.sigma_hrec);
        s["H"] = rec.factors.height;
        s["h_rec"] = rec.factors.h_rec;
        s["sigma_h"] = rec.sigma_height;
        s["sigma_hrec"] = rec.sigma_hrec;
        sidecar.push_back(s);
      } catch (const std::exception& e) {
        std::cerr << "error: " << pred_path.string() << ":" << line_no << ": "
                  << e.what() << "\n";
        return kExitInputError;
      }
    }
    write_file(fs::path(opt.out_dir) / (id + ".txt"),
               mono3d::write_detections(recovered));
    write_file(fs::path(opt.out_dir) / (id + ".json"), sidecar.dump(2) + "\n");
  }
  return kExitOk;
}

// ------------------------------------------------------------------- eval

struct EvalOptions {
  std::string gt_dir;
  std::string det_dir;
  std::string calib_dir;
  std::string out_dir;
  double iou_thresh = 0.7;
  std::string difficulty = "moderate";
  std::string score_mode = "raw";
  std::string bins = "0,20,40";
  std::string category = "Car";
};

struct LoadedImage {
  std::string id;
  std::vector<mono3d::ObjectLabel> gts;
  std::vector<mono3d::ObjectLabel> dets;
  std::vector<double> keys;                  // ranking key per detection
  std::vector<std::optional<double>> pred_h; // factor H per detection, if known
  std::vector<std::optional<double>> pred_hrec;
  std::optional<double> focal;
};

int run_eval(const EvalOptions& opt) {
  if (!fs::is_directory(opt.gt_dir) || !fs::is_directory(opt.det_dir)) {
    std::cerr << "error: --gt-dir and --det-dir must be directories\n";
    return kExitInputError;
  }
  fs::create_directories(opt.out_dir);
  const auto edges = parse_bins(opt.bins);
  const auto difficulty = parse_difficulty(opt.difficulty);
  const bool composite = opt.score_mode == "composite";

  std::vector<LoadedImage> loaded;
  for (const auto& id : image_ids(opt.gt_dir, ".txt")) {
    LoadedImage img;
    img.id = id;
    try {
      img.gts = mono3d::parse_label_file(read_file(fs::path(opt.gt_dir) / (id + ".txt")));
      const fs::path det_path = fs::path(opt.det_dir) / (id + ".txt");
      if (fs::exists(det_path)) {
        img.dets = mono3d::parse_label_file(read_file(det_path));
      }
      if (!opt.calib_dir.empty()) {
        const fs::path calib_path = fs::path(opt.calib_dir) / (id + ".txt");
        if (fs::exists(calib_path)) {
          img.focal = mono3d::parse_calib_file(read_file(calib_path)).focal_length();
        }
      }
    } catch (const std::exception& e) {
      std::cerr << "error: image " << id << ": " << e.what() << "\n";
      return kExitInputError;
    }

    // Sidecar (written by `recover`) carries composite confidences and the
    // predicted factors; without it, composite mode cannot run.
    json sidecar;
    const fs::path side_path = fs::path(opt.det_dir) / (id + ".json");
    if (fs::exists(side_path)) {
      try {
        sidecar = json::parse(read_file(side_path));
      } catch (const std::exception& e) {
        std::cerr << "error: " << side_path.string() << ": " << e.what() << "\n";
        return kExitInputError;
      }
    }
    for (std::size_t d = 0; d < img.dets.size(); ++d) {
      double key = img.dets[d].score.value_or(0.0);
      std::optional<double> ph, phr;
      if (sidecar.is_array() && d < sidecar.size()) {
        const auto& s = sidecar[d];
        if (composite && s.contains("composite_confidence")) {
          key = s["composite_confidence"].get<double>();
        }
        if (s.contains("H")) ph = s["H"].get<double>();
        if (s.contains("h_rec")) phr = s["h_rec"].get<double>();
      } else if (composite) {
        std::cerr << "error: composite scoring requires a sidecar for image "
                  << id << "\n";
        return kExitInputError;
      }
      img.keys.push_back(key);
      img.pred_h.push_back(ph);
      img.pred_hrec.push_back(phr);
    }
    loaded.push_back(std::move(img));
  }

  // Category filter: requested category only; DontCare regions stay as
  // ignored ground truth.
  std::vector<mono3d::EvalImage> images;
  // Indices back into `loaded` for match bookkeeping.
  std::vector<std::vector<std::size_t>> gt_index(loaded.size());
  std::vector<std::vector<std::size_t>> det_index(loaded.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    mono3d::EvalImage img;
    for (std::size_t g = 0; g < loaded[i].gts.size(); ++g) {
      const auto& gt = loaded[i].gts[g];
      if (gt.category != opt.category && !gt.is_dont_care()) {
        continue;
      }
      img.gts.push_back({gt.box3d(), mono3d::assign_difficulty(gt)});
      gt_index[i].push_back(g);
    }
    for (std::size_t d = 0; d < loaded[i].dets.size(); ++d) {
      if (loaded[i].dets[d].category != opt.category) {
        continue;
      }
      img.dets.push_back({loaded[i].dets[d].box3d(), loaded[i].keys[d]});
      det_index[i].push_back(d);
    }
    images.push_back(std::move(img));
  }

  json report;
  const char* names[3] = {"easy", "moderate", "hard"};
  std::optional<mono3d::ApResult> requested_3d;
  try {
    for (int lvl = 0; lvl < 3; ++lvl) {
      const auto d = static_cast<mono3d::Difficulty>(lvl);
      const auto r3d = mono3d::ap_r40(images, mono3d::iou_3d, opt.iou_thresh, d);
      const auto rbev = mono3d::ap_r40(images, mono3d::bev_iou, opt.iou_thresh, d);
      report["ap_3d"][names[lvl]] = r3d.ap;
      report["ap_bev"][names[lvl]] = rbev.ap;
      if (d == difficulty) {
        requested_3d = r3d;
      }
    }
  } catch (const mono3d::EmptyGroundTruth& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  // TP-derived statistics at the requested difficulty.
  std::vector<std::pair<double, double>> z_pairs;
  std::vector<mono3d::SizeErrorEntry> size_entries;
  std::vector<double> err_h, err_hrec;
  for (const auto& m : requested_3d->matches) {
    const auto& li = loaded[m.image];
    const auto& gt = li.gts[gt_index[m.image][m.gt]];
    const auto& det = li.dets[det_index[m.image][m.det]];
    z_pairs.emplace_back(gt.box3d().center.z, det.box3d().center.z);
    size_entries.push_back({gt.size, det.size, gt.alpha});
    const auto& ph = li.pred_h[det_index[m.image][m.det]];
    const auto& phr = li.pred_hrec[det_index[m.image][m.det]];
    if (ph && phr && li.focal) {
      const auto gt_factors = mono3d::decompose_distance(
          *li.focal, gt.size.h, gt.box3d().center.z);
      err_h.push_back(*ph - gt_factors.height);
      err_hrec.push_back(*phr - gt_factors.h_rec);
    }
  }

  report["distance_bins"] = bins_to_json(mono3d::distance_binned_error(z_pairs, edges));

  const auto table = mono3d::yaw_sector_size_error(size_entries);
  const char* dims[3] = {"length", "width", "height"};
  const char* cols[3] = {"all", "side", "front_back"};
  for (int d = 0; d < 3; ++d) {
    for (int c = 0; c < 3; ++c) {
      const auto& cell = table.cells[d][c];
      report["size_errors"][dims[d]][cols[c]] =
          cell.mean ? json(*cell.mean) : json(nullptr);
    }
  }

  report["pcc"] = nullptr;
  if (err_h.size() >= 2) {
    try {
      report["pcc"] = mono3d::pearson(err_h, err_hrec);
    } catch (const mono3d::DegenerateSequence&) {
      // constant errors; leave null
    }
  }
  report["iou_thresh"] = opt.iou_thresh;
  report["difficulty"] = opt.difficulty;
  report["score_mode"] = opt.score_mode;
  report["category"] = opt.category;

  write_file(fs::path(opt.out_dir) / "report.json", report.dump(2) + "\n");

  std::string csv = "recall,precision\n";
  char buf[64];
  for (const auto& [r, p] : requested_3d->curve.points) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", r, p);
    csv += buf;
  }
  write_file(fs::path(opt.out_dir) / "pr_curve.csv", csv);
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

// --------------------------------------------------------------- simulate

struct SimulateOptions {
  std::uint64_t seed = 42;
  std::size_t n = 1000000;
  std::string bins = "0,20,40";
  std::string out;
};

int run_simulate(const SimulateOptions& opt) {
  mono3d::SceneDistribution dist;
  dist.z_lo = 10.0;
  dist.z_hi = 50.0;
  dist.focal = 700.0;
  dist.height_classes = {{1.5, 0.5}, {3.0, 0.5}};
  dist.seed = opt.seed;

  const auto samples = mono3d::sample_scene(dist, opt.n);
  const auto consistency = mono3d::expectation_consistency_check(samples, dist.focal);

  mono3d::ErrorModel em;
  em.std_height = 0.05;
  em.std_hrec = 0.05;
  em.rho = -0.472;
  const auto robustness = mono3d::self_consistency_experiment(dist, em, opt.n);

  json report;
  report["seed"] = opt.seed;
  report["n"] = opt.n;
  report["shards"] = 1;
  report["consistency"]["mean_z_over_f"] = consistency.mean_z_over_f;
  bool ok = true;
  for (const auto& c : consistency.per_class) {
    json j;
    j["class_index"] = c.class_index;
    j["H"] = c.height;
    j["count"] = c.count;
    j["mean_hrec"] = c.mean_hrec;
    j["residual"] = c.residual;
    j["residual_bound"] = c.residual_bound;
    j["pass"] = c.residual < c.residual_bound;
    ok = ok && c.residual < c.residual_bound;
    report["consistency"]["per_class"].push_back(j);
  }
  report["consistency"]["cross_class_spread"] =
      consistency.cross_class_spread ? json(*consistency.cross_class_spread)
                                     : json(nullptr);

  report["robustness"]["rho"] = em.rho;
  report["robustness"]["rmse_correlated"] = robustness.rmse_correlated;
  report["robustness"]["rmse_independent"] = robustness.rmse_independent;
  report["robustness"]["predicted_rel_std_correlated"] =
      robustness.predicted_rel_std_correlated;
  report["robustness"]["predicted_rel_std_independent"] =
      robustness.predicted_rel_std_independent;
  const bool rob_ok = robustness.rmse_correlated < robustness.rmse_independent;
  report["robustness"]["pass"] = rob_ok;
  ok = ok && rob_ok;

  // sigma-vs-distance demo profile: sigma_hrec grows with Z.
  std::vector<mono3d::SigmaRecord> sig;
  for (std::size_t i = 0; i < std::min<std::size_t>(samples.size(), 10000); ++i) {
    sig.push_back({samples[i].z, 0.05, 0.0005 * samples[i].z});
  }
  const auto edges = parse_bins(opt.bins);
  json sig_bins = json::array();
  for (const auto& b : mono3d::uncertainty_vs_distance_report(sig, edges)) {
    json j;
    j["lo"] = b.lo;
    j["hi"] = std::isinf(b.hi) ? json(nullptr) : json(b.hi);
    j["count"] = b.count;
    j["mean_sigma_h"] =
        b.mean_sigma_height ? json(*b.mean_sigma_height) : json(nullptr);
    j["mean_sigma_hrec"] =
        b.mean_sigma_hrec ? json(*b.mean_sigma_hrec) : json(nullptr);
    sig_bins.push_back(j);
  }
  report["sigma_vs_distance"] = sig_bins;
  report["pass"] = ok;

  const std::string text = report.dump(2) + "\n";
  if (!opt.out.empty()) {
    write_file(opt.out, text);
  }
  std::cout << text;
  return ok ? kExitOk : kExitFailure;
}

// -------------------------------------------------------------- check-grad

int run_check_grad(std::uint64_t seed, std::size_t trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> residual(0.1, 10.0);
  std::uniform_real_distribution<double> sigma_dist(0.1, 10.0);
  std::uniform_real_distribution<double> lambda_dist(0.1, 5.0);
  std::uniform_real_distribution<double> sign(-1.0, 1.0);

  double worst = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const double gt = 0.0;
    const double pred = (sign(rng) >= 0.0 ? 1.0 : -1.0) * residual(rng);
    const double sigma = sigma_dist(rng);
    const double lambda = lambda_dist(rng);

    auto f = [gt, lambda](std::span<const double> x) {
      return mono3d::uncertainty_l1_loss(x[0], gt, x[1], lambda);
    };
    auto g = [gt, lambda](std::span<const double> x) {
      const auto grad = mono3d::uncertainty_l1_grad(x[0], gt, x[1], lambda);
      return std::vector<double>{grad.d_pred, grad.d_sigma};
    };
    const double point[2] = {pred, sigma};
    worst = std::max(worst, mono3d::finite_difference_check(f, g, point, 1e-6));
  }

  json report;
  report["trials"] = trials;
  report["max_relative_error"] = worst;
  report["pass"] = worst < 1e-6;
  std::cout << report.dump(2) << "\n";
  return worst < 1e-6 ? kExitOk : kExitFailure;
}

// ------------------------------------------------------------------ parse

int run_parse(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    std::cerr << "error: not a directory: " << dir << "\n";
    return kExitInputError;
  }
  std::map<std::string, std::size_t> counts;
  std::size_t files = 0;
  for (const auto& id : image_ids(dir, ".txt")) {
    const fs::path path = fs::path(dir) / (id + ".txt");
    try {
      for (const auto& obj : mono3d::parse_label_file(read_file(path))) {
        ++counts[obj.category];
      }
      ++files;
    } catch (const std::exception& e) {
      std::cerr << "error: " << path.string() << ": " << e.what() << "\n";
      return kExitInputError;
    }
  }
  json report;
  report["files"] = files;
  report["categories"] = counts;
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometry-based monocular 3D box recovery and KITTI-style evaluation"};
  app.require_subcommand(1);

  RecoverOptions rec;
  auto* recover = app.add_subcommand(
      "recover", "Recover 3D boxes from predicted distance factors");
  recover->add_option("--pred", rec.pred_dir, "Directory of <id>.jsonl predictions")
      ->required();
  recover->add_option("--calib-dir", rec.calib_dir, "Directory of <id>.txt calibrations")
      ->required();
  recover->add_option("--out", rec.out_dir, "Output directory")->required();

  EvalOptions ev;
  auto* eval = app.add_subcommand("eval", "Evaluate detections against ground truth");
  eval->add_option("--gt-dir", ev.gt_dir)->required();
  eval->add_option("--det-dir", ev.det_dir)->required();
  eval->add_option("--calib-dir", ev.calib_dir);
  eval->add_option("--out", ev.out_dir, "Output directory")->required();
  eval->add_option("--iou", ev.iou_thresh, "IoU threshold (default 0.7)");
  eval->add_option("--difficulty", ev.difficulty, "easy|moderate|hard");
  eval->add_option("--score-mode", ev.score_mode, "raw|composite");
  eval->add_option("--bins", ev.bins, "Distance bin edges, e.g. 0,20,40");
  eval->add_option("--category", ev.category, "Evaluated category (default Car)");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand(
      "simulate", "Monte-Carlo consistency and robustness checks");
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--n", sim.n);
  simulate->add_option("--bins", sim.bins);
  simulate->add_option("--out", sim.out, "Optional JSON report path");

  std::uint64_t cg_seed = 7;
  std::size_t cg_trials = 1000;
  auto* check_grad = app.add_subcommand(
      "check-grad", "Verify analytic loss gradients against finite differences");
  check_grad->add_option("--seed", cg_seed);
  check_grad->add_option("--n", cg_trials);

  std::string parse_dir;
  auto* parse = app.add_subcommand("parse", "Parse a label directory and summarize");
  parse->add_option("dir", parse_dir, "Label directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (recover->parsed()) return run_recover(rec);
    if (eval->parsed()) return run_eval(ev);
    if (simulate->parsed()) return run_simulate(sim);
    if (check_grad->parsed()) return run_check_grad(cg_seed, cg_trials);
    if (parse->parsed()) return run_parse(parse_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
