#ifndef CTBRAIN_METRICS_HPP
#define CTBRAIN_METRICS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

#include "ctbrain/voxelgrid.hpp"

namespace ctbrain {

class EmptyGroundTruthError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/*
 * False negative rate: 100 * |!BM & GT| / |GT|.
 * False positive rate: 100 * |BM & !GT| / |GT|.
 * Both are normalized by the ground-truth size, so FP can exceed 100.
 * Dice is a supplementary overlap score, not part of the FN/FP pair.
 */
struct EvalReport {
  std::size_t gt_count = 0;
  std::size_t miss_count = 0;
  std::size_t spurious_count = 0;
  std::size_t bm_count = 0;

  double fn_rate() const;
  double fp_rate() const;
  double dice() const;

  /// Rates rounded half-up to two decimals from the exact ratio, e.g. "2.31".
  std::string fn_text() const;
  std::string fp_text() const;

  /// {"fn_rate", "fp_rate", "gt_count", "miss_count", "spurious_count", "dice"}.
  std::string to_json() const;
  /// "FN 20.00% FP 30.00% ..." single-line summary.
  std::string summary() const;
};

EvalReport evaluate(const BinaryMask& bm, const BinaryMask& gt);

/// Percentage 100 * num / den rendered with two decimals, rounded half-up.
std::string format_percent(std::size_t num, std::size_t den);

}  // namespace ctbrain

#endif
