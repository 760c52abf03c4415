#include "nlfctn/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace nlfctn {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Runs job(0..count) on `workers` threads. Each index is processed exactly once
// and jobs write only to their own slot, so results do not depend on scheduling.
template <typename Job>
void parallel_for(std::size_t count, std::size_t workers, Job&& job) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          job(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

FctnRank InpaintConfig::global_rank_for(const Shape& shape) const {
  if (global_rank) {
    if (global_rank->order() != shape.size()) throw std::invalid_argument("global rank order does not match image");
    return *global_rank;
  }
  return FctnRank::capped(shape, global_rank_cap);
}

FctnRank InpaintConfig::group_rank_for(const Shape& group_shape) const {
  if (group_rank) {
    if (group_rank->order() != group_shape.size())
      throw std::invalid_argument("group rank order does not match group tensors");
    return *group_rank;
  }
  return FctnRank::capped(group_shape, group_rank_cap);
}

void InpaintConfig::validate() const {
  if (patch < 1 || group_size < 1) throw std::invalid_argument("patch size and group size must be at least 1");
  if (key_interval() < 1) throw std::invalid_argument("key interval must be at least 1");
  if (overlap >= patch) throw std::invalid_argument("overlap must be smaller than the patch size");
  if (global_rank_cap < 1 || group_rank_cap < 1) throw std::invalid_argument("rank caps must be at least 1");
  pam_global.validate();
  pam_group.validate();
}

DenseTensor stage_a(const DenseTensor& t, const ObservationMask& mask, const InpaintConfig& cfg, PamTrace* trace) {
  cfg.validate();
  CompletionResult r = pam_complete(project_observed(t, mask), mask, cfg.global_rank_for(t.shape()), cfg.pam_global);
  if (trace) *trace = r.trace;
  return std::move(r.x);
}

DenseTensor stage_b(const DenseTensor& f, const ObservationMask& mask, const InpaintConfig& cfg,
                    InpaintReport* report) {
  cfg.validate();
  if (f.shape() != mask.shape()) throw std::invalid_argument("stage_b: mask shape does not match image");
  const auto start = std::chrono::steady_clock::now();

  const PatchGrid grid = build_patch_grid(f.shape(), cfg.patch, cfg.overlap);
  const KeyLattice keys = build_key_lattice(f.shape(), cfg.patch, cfg.key_interval());
  if (cfg.group_size > grid.count())
    throw std::invalid_argument("group size " + std::to_string(cfg.group_size) + " exceeds patch count " +
                                std::to_string(grid.count()));

  Shape group_shape{cfg.patch, cfg.patch};
  group_shape.insert(group_shape.end(), f.shape().begin() + 2, f.shape().end());
  group_shape.push_back(cfg.group_size);
  const FctnRank rank = cfg.group_rank_for(group_shape);

  std::vector<NssGroup> groups(keys.count());
  std::vector<GroupStats> stats(keys.count());
  parallel_for(keys.count(), cfg.workers, [&](std::size_t l) {
    const auto group_start = std::chrono::steady_clock::now();
    const auto members = block_match(f, grid, keys.keys[l], cfg.group_size);
    NssGroup g = form_group(f, mask, members, cfg.patch);
    g.key_index = l;
    GroupStats& st = stats[l];
    st.key_index = l;
    if (g.mask.count_observed() == 0) {
      st.skipped = true;
      g.members.clear();
    } else {
      PamConfig pam = cfg.pam_group;
      pam.seed = cfg.pam_group.seed + l;
      CompletionResult r = pam_complete(g.tensor, g.mask, rank, pam);
      g.tensor = std::move(r.x);
      st.iterations = r.trace.iterations;
      st.converged = r.trace.converged;
    }
    st.seconds = seconds_since(group_start);
    groups[l] = std::move(g);
  });

  // Skipped groups carry no members and contribute nothing.
  std::erase_if(groups, [](const NssGroup& g) { return g.members.empty(); });
  DenseTensor x = aggregate(groups, f.shape(), f);
  for (std::size_t k = 0; k < x.size(); ++k)
    if (mask[k]) x[k] = f[k];

  if (report) {
    report->groups = std::move(stats);
    report->patch_count = grid.count();
    report->group_count = keys.count();
    report->skipped_groups = keys.count() - groups.size();
    report->group_shape = group_shape;
    report->stage_b_seconds = seconds_since(start);
  }
  return x;
}

InpaintResult nl_fctn_inpaint(const DenseTensor& t, const ObservationMask& mask, const InpaintConfig& cfg) {
  if (t.order() != 3 && t.order() != 4)
    throw std::invalid_argument("nl_fctn_inpaint handles third- and fourth-order images, got order " +
                                std::to_string(t.order()));
  InpaintResult result;
  const auto start = std::chrono::steady_clock::now();
  result.initial = stage_a(t, mask, cfg, &result.report.stage_a);
  result.report.stage_a_seconds = seconds_since(start);
  result.x = stage_b(result.initial, mask, cfg, &result.report);
  return result;
}

}  // namespace nlfctn
