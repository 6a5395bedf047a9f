#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vcalib/gateway.hpp"
#include "vcalib/prompts.hpp"
#include "vcalib/types.hpp"

namespace vcalib {

// One vanilla call (iteration 0) followed by `turns` self-critique calls,
// each fed every prior raw response verbatim. Failed parses stay in the
// trace; a transport failure at iteration t truncates the trace at t-1 and
// clears `complete`.
IterationTrace run_multi_turn(const QARecord& record, ElicitationMode mode, int turns,
                              Gateway& gateway, const ModelConfig& config,
                              const PromptLibrary& prompts);

// One trace per record, order-aligned. Cross-record calls may interleave up
// to `parallelism`; within a record iterations stay strictly sequential.
std::vector<IterationTrace> run_cohort(const std::vector<QARecord>& records, ElicitationMode mode,
                                       int turns, Gateway& gateway, const ModelConfig& config,
                                       const PromptLibrary& prompts, int parallelism);

// JSONL persistence, one trace per line; write/read round-trips losslessly.
// `config_hash` is stamped onto every line (empty string to omit).
void write_traces(const std::filesystem::path& path, const std::vector<IterationTrace>& traces,
                  const std::string& config_hash = "");
std::vector<IterationTrace> read_traces(const std::filesystem::path& path);

}  // namespace vcalib
