#include "ctbrain/metrics.hpp"

#include <cstdio>

#include <json.hpp>

namespace ctbrain {

std::string format_percent(std::size_t num, std::size_t den) {
  if (den == 0) throw EmptyGroundTruthError("percentage with zero denominator");
  // hundredths of a percent = round(10000 * num / den), half-up in integers.
  const unsigned long long scaled = 10000ULL * num;
  const unsigned long long q = (2 * scaled + den) / (2ULL * den);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%llu.%02llu", q / 100, q % 100);
  return buf;
}

double EvalReport::fn_rate() const {
  return 100.0 * static_cast<double>(miss_count) / static_cast<double>(gt_count);
}

double EvalReport::fp_rate() const {
  return 100.0 * static_cast<double>(spurious_count) / static_cast<double>(gt_count);
}

double EvalReport::dice() const {
  const std::size_t overlap = gt_count - miss_count;
  const std::size_t denom = bm_count + gt_count;
  return denom == 0 ? 1.0 : 2.0 * static_cast<double>(overlap) / static_cast<double>(denom);
}

std::string EvalReport::fn_text() const { return format_percent(miss_count, gt_count); }
std::string EvalReport::fp_text() const { return format_percent(spurious_count, gt_count); }

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["fn_rate"] = fn_rate();
  j["fp_rate"] = fp_rate();
  j["gt_count"] = gt_count;
  j["miss_count"] = miss_count;
  j["spurious_count"] = spurious_count;
  j["dice"] = dice();
  return j.dump(2);
}

std::string EvalReport::summary() const {
  char dice_buf[32];
  std::snprintf(dice_buf, sizeof(dice_buf), "%.4f", dice());
  return "FN " + fn_text() + "% FP " + fp_text() + "% (gt " + std::to_string(gt_count) +
         ", missed " + std::to_string(miss_count) + ", spurious " +
         std::to_string(spurious_count) + ", dice " + dice_buf + ")";
}

EvalReport evaluate(const BinaryMask& bm, const BinaryMask& gt) {
  if (bm.dims() != gt.dims()) throw ContractError("evaluate: mask and ground truth dims differ");
  EvalReport r;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const bool b = bm[i] != 0;
    const bool g = gt[i] != 0;
    r.gt_count += g;
    r.bm_count += b;
    r.miss_count += g && !b;
    r.spurious_count += b && !g;
  }
  if (r.gt_count == 0) throw EmptyGroundTruthError("ground truth empty");
  return r;
}

}  // namespace ctbrain
