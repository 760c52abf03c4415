#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nlfctn/completion.hpp"
#include "nlfctn/fctn.hpp"
#include "nlfctn/nonlocal.hpp"

namespace nlfctn {

struct InpaintConfig {
  std::size_t patch = 8;        ///< p
  std::size_t group_size = 16;  ///< s
  std::optional<std::size_t> interval;  ///< v, defaults to p - 1
  std::size_t overlap = 1;      ///< o

  /// Explicit ranks; when unset, R_{j,k} = min(I_j, I_k, cap).
  std::optional<FctnRank> global_rank;
  std::optional<FctnRank> group_rank;
  std::size_t global_rank_cap = 4;
  std::size_t group_rank_cap = 4;

  PamConfig pam_global{0.01, 100, 1e-4, 0};
  PamConfig pam_group{0.01, 100, 1e-3, 0};
  std::size_t workers = 1;

  std::size_t key_interval() const { return interval.value_or(patch > 1 ? patch - 1 : 1); }
  FctnRank global_rank_for(const Shape& shape) const;
  FctnRank group_rank_for(const Shape& group_shape) const;
  void validate() const;
};

struct GroupStats {
  std::size_t key_index = 0;
  std::size_t iterations = 0;
  bool converged = false;
  bool skipped = false;
  double seconds = 0.0;
};

struct InpaintReport {
  PamTrace stage_a;
  std::vector<GroupStats> groups;
  std::size_t patch_count = 0;
  std::size_t group_count = 0;
  std::size_t skipped_groups = 0;
  Shape group_shape;
  double stage_a_seconds = 0.0;
  double stage_b_seconds = 0.0;
};

/// Global FCTN completion of the whole image, X^0 = P_Omega(t).
DenseTensor stage_a(const DenseTensor& t, const ObservationMask& mask, const InpaintConfig& cfg,
                    PamTrace* trace = nullptr);

/// Groups similar patches of the filled image `f`, completes every group and
/// aggregates them; observed entries are restored from `f` afterwards.
DenseTensor stage_b(const DenseTensor& f, const ObservationMask& mask, const InpaintConfig& cfg,
                    InpaintReport* report = nullptr);

struct InpaintResult {
  DenseTensor x;
  DenseTensor initial;  ///< stage A output
  InpaintReport report;
};

/// Both stages for third- and fourth-order images.
InpaintResult nl_fctn_inpaint(const DenseTensor& t, const ObservationMask& mask, const InpaintConfig& cfg);

}  // namespace nlfctn
