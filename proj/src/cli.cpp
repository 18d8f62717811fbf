#include "ctbrain/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ctbrain/metrics.hpp"
#include "ctbrain/mhdio.hpp"
#include "ctbrain/phantom.hpp"
#include "ctbrain/pipeline.hpp"

namespace ctbrain {

namespace fs = std::filesystem;

namespace {

/// Usage or validation problem detected after parsing; maps to exit 2.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SegmentArgs {
  std::string input;
  std::string output;
  std::int32_t low = -40;
  std::int32_t high = 160;
  std::int32_t bone = 300;
  std::size_t rays = 8;
  std::size_t min_hits = 7;
  double min_run_mm = 10.0;
  std::size_t passes = 2;
  std::vector<std::string> planes{"xy", "yz"};
  int connectivity = 8;
  bool emit_intermediates = false;
  bool timings = false;
  unsigned threads = 0;
  int overlay_value = 1;
};

struct EvalArgs {
  std::string mask;
  std::string truth;
  bool json = false;
};

struct PhantomArgs {
  std::string output;
  std::string truth;
  std::string spec;
  std::uint64_t seed = 0;
  double rotate_deg = 0.0;
  std::string rotate_axis = "1,-1,1";
  double noise_sigma = -1.0;
  unsigned threads = 0;
};

Vec3 parse_axis(const std::string& text) {
  std::vector<double> v;
  std::stringstream in(text);
  for (std::string tok; std::getline(in, tok, ',');) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("--rotate-axis: malformed component '" + tok + "'");
    }
  }
  if (v.size() != 3) throw UsageError("--rotate-axis: expected x,y,z");
  return {v[0], v[1], v[2]};
}

fs::path stage_path(const fs::path& output, std::size_t stage) {
  fs::path p = output;
  p.replace_extension(".stage" + std::to_string(stage) + output.extension().string());
  return p;
}

SegmentationConfig make_config(const SegmentArgs& a) {
  SegmentationConfig c;
  c.window = {a.low, a.high};
  if (a.rays == 8) {
    c.ray_policy.min_hits = a.min_hits;
    c.ray_policy.bone_threshold = a.bone;
  } else {
    c.ray_policy = RayPolicy::evenly_spaced(a.rays, a.min_hits, a.bone);
  }
  c.erosion_policy = {a.min_run_mm, a.passes};
  c.component_policy.planes.clear();
  for (const auto& p : a.planes) c.component_policy.planes.push_back(parse_plane(p));
  c.component_policy.connectivity = a.connectivity;
  c.emit_intermediates = a.emit_intermediates;
  c.threads = a.threads;
  c.validate();
  return c;
}

int cmd_segment(const SegmentArgs& a, std::ostream& out) {
  const SegmentationConfig config = make_config(a);
  if (a.overlay_value != 1 && a.overlay_value != 255) {
    throw UsageError("--overlay-value must be 1 or 255");
  }
  if (!fs::exists(a.input)) throw UsageError(a.input + ": input not found");

  const HUVolume vol = read_volume(a.input);
  const SegmentationResult result = segment(vol, config);
  const auto on = static_cast<std::uint8_t>(a.overlay_value);
  write_mask(result.final_mask, a.output, on);
  if (a.emit_intermediates) {
    for (std::size_t i = 0; i < result.stage_masks.size(); ++i) {
      write_mask(result.stage_masks[i].second, stage_path(a.output, i + 1), on);
    }
  }
  if (a.timings) {
    out << std::fixed << std::setprecision(1);
    for (const auto& t : result.timings) out << t.stage << " " << t.ms << " ms\n";
    out << "total " << result.total_ms() << " ms\n";
  }
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  for (const auto& p : {a.mask, a.truth}) {
    if (!fs::exists(p)) throw UsageError(p + ": input not found");
  }
  const BinaryMask bm = read_mask(a.mask);
  const BinaryMask gt = read_mask(a.truth);
  const EvalReport report = evaluate(bm, gt);
  if (a.json) {
    out << report.to_json() << "\n";
  } else {
    out << report.summary() << "\n";
  }
  return kExitOk;
}

int cmd_phantom(const PhantomArgs& a, std::ostream& out) {
  PhantomSpec spec = PhantomSpec::standard();
  if (!a.spec.empty()) {
    std::ifstream in(a.spec);
    if (!in) throw UsageError(a.spec + ": input not found");
    std::stringstream buf;
    buf << in.rdbuf();
    spec = phantom_spec_from_json(buf.str());
  }
  if (a.seed != 0 || a.spec.empty()) spec.seed = a.seed;
  if (a.noise_sigma >= 0.0) spec.noise_sigma = a.noise_sigma;
  if (a.rotate_deg != 0.0) spec.rotation = Rotation{a.rotate_deg, parse_axis(a.rotate_axis)};
  spec.validate();

  const Phantom p = generate(spec, a.threads);
  write_volume(p.volume, a.output);
  write_mask(p.truth, a.truth);
  out << "phantom " << spec.dims.nx << "x" << spec.dims.ny << "x" << spec.dims.nz
      << ", ground truth " << count(p.truth) << " voxels\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Intracranial brain extraction from CT head volumes", "ctbrain"};
  app.require_subcommand(1);

  SegmentArgs seg;
  auto* s = app.add_subcommand("segment", "extract the intracranial mask from a MetaImage volume");
  s->add_option("--input", seg.input, "input volume (.mhd, MET_SHORT)")->required();
  s->add_option("--output", seg.output, "output mask (.mhd, MET_UCHAR)")->required();
  s->add_option("--low-thres", seg.low, "lower soft-tissue HU bound (reference value -40)")
      ->capture_default_str();
  s->add_option("--high-thres", seg.high, "upper soft-tissue HU bound (reference value 160)")
      ->capture_default_str();
  s->add_option("--bone-thres", seg.bone, "lowest HU counted as cranial bone (reference value 300)")
      ->capture_default_str();
  s->add_option("--rays", seg.rays, "axial-plane rays per voxel, evenly spaced (reference value 8)")
      ->capture_default_str();
  s->add_option("--min-hits", seg.min_hits, "rays that must reach bone to keep a voxel (reference value 7)")
      ->capture_default_str();
  s->add_option("--min-run-mm", seg.min_run_mm, "shortest in-slice x/y run kept by erosion, mm (reference value 10)")
      ->capture_default_str();
  s->add_option("--erosion-passes", seg.passes, "special erosion passes (reference value 2)")
      ->capture_default_str();
  s->add_option("--planes", seg.planes, "planes for largest-component membership: xy,yz[,xz] (reference value xy,yz)")
      ->delimiter(',')
      ->capture_default_str();
  s->add_option("--connectivity", seg.connectivity, "in-plane connectivity, 4 or 8")
      ->capture_default_str();
  s->add_flag("--emit-intermediates", seg.emit_intermediates,
              "also write <output>.stage1..stage4.mhd");
  s->add_flag("--timings", seg.timings, "print per-stage wall time");
  s->add_option("--threads", seg.threads, "worker threads, 0 = one per hardware thread")
      ->capture_default_str();
  s->add_option("--overlay-value", seg.overlay_value,
                "value written for mask voxels: 1, or 255 for viewers (extension)")
      ->capture_default_str();

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "false negative / false positive rates against ground truth");
  e->add_option("--mask", ev.mask, "segmented mask (.mhd)")->required();
  e->add_option("--truth", ev.truth, "ground-truth mask (.mhd)")->required();
  e->add_flag("--json", ev.json, "print the report as JSON");

  PhantomArgs ph;
  auto* p = app.add_subcommand("phantom", "generate a synthetic CT head with exact ground truth");
  p->add_option("--output", ph.output, "phantom volume (.mhd)")->required();
  p->add_option("--truth", ph.truth, "ground-truth mask (.mhd)")->required();
  p->add_option("--spec", ph.spec, "phantom spec JSON; omitted keys use the standard head");
  p->add_option("--seed", ph.seed, "noise seed")->capture_default_str();
  p->add_option("--rotate-deg", ph.rotate_deg, "rotation angle in degrees about --rotate-axis")
      ->capture_default_str();
  p->add_option("--rotate-axis", ph.rotate_axis, "rotation axis x,y,z")->capture_default_str();
  p->add_option("--noise-sigma", ph.noise_sigma, "additive Gaussian noise, HU (overrides spec)");
  p->add_option("--threads", ph.threads, "worker threads, 0 = one per hardware thread")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s) return cmd_segment(seg, out);
    if (*e) return cmd_eval(ev, out);
    if (*p) return cmd_phantom(ph, out);
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const EmptyGroundTruthError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const ContractError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const SpecError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const MhdError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "internal error: " << ex.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace ctbrain
