#pragma once

#include <filesystem>
#include <vector>

#include "vcalib/run_config.hpp"

namespace vcalib {

// Vanilla elicitation for every benchmark/mode: single-entry traces plus
// per-benchmark metric reports (CSV + Markdown).
int run_evaluate(const RunConfig& config);

// Multi-turn self-critique: traces plus per-iteration mean/std series CSVs.
int run_self_critique(const RunConfig& config);

// SFT/DPO dataset construction from the seeded training sample. `variants`
// empty means "as configured". Returns 2 when zero examples were emitted.
int run_build_data(const RunConfig& config, std::vector<TrainingVariant> variants);

// Reliability-bin CSVs, iteration-series CSVs, and summary.md from the
// traces already present under run_dir. Idempotent.
int run_report(const std::filesystem::path& run_dir);

}  // namespace vcalib
