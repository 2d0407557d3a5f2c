#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mnclust/likelihood.hpp"
#include "mnclust/model.hpp"
#include "mnclust/stats.hpp"

namespace mnclust {

/// Dataset files. The canonical format is JSON:
///   { "dimension": p,
///     "items": [ { "id": ..., "mean": [p], "covariance": [[p x p]] }, ... ] }
/// Items may carry "precision" instead of "covariance". A flat CSV
/// alternative is accepted on input: header
///   id,mean_1..mean_p,cov_11..cov_pp  (covariance row-major).
/// Files ending in ".csv" are parsed as CSV, everything else as JSON.
Dataset load_dataset(const std::string& path);
void save_dataset_json(const std::string& path, const Dataset& data);
void save_dataset_csv(const std::string& path, const Dataset& data);

/// Assignment files: CSV with header "id,cluster", cluster labels 1-based in
/// canonical order. Loading requires every dataset id exactly once
/// (MissingId / UnknownId / DuplicateId otherwise).
void save_assignment(const std::string& path, const Dataset& data,
                     const Partition& partition);
Partition load_assignment(const std::string& path, const Dataset& data);

/// Per-k curve: CSV with header
///   k,neg_loglik_flat,neg_loglik_normal,chisq,dof,p_value
/// neg_loglik_normal is empty when no normal prior was evaluated. Numbers are
/// written with %.17g so they round-trip through double exactly.
void save_curve(const std::string& path, const SelectionReport& report);

/// Likelihood term breakdown as a small JSON document.
void save_breakdown(const std::string& path, const LikelihoodBreakdown& b);

/// Run provenance written next to every command's outputs.
struct RunManifest {
  std::string command;
  std::string config;  // echo of the effective configuration, JSON text
  std::uint64_t seed = 0;
  std::string input_path;
  std::string output_dir;
  int artifact_version = 1;
  double duration_seconds = 0.0;
};

void save_manifest(const std::string& path, const RunManifest& manifest);

/// %.17g formatting used by every text emitter, exposed for tests.
std::string format_double(double v);

}  // namespace mnclust
