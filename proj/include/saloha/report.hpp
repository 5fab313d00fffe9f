// SPDX-License-Identifier: Apache-2.0

/**
 * @file report.hpp
 * @brief CSV and text emitters for traces, curves and run summaries.
 *
 * Output is byte-for-byte reproducible: no timestamps, locale-independent
 * number formatting, fixed column order.
 */

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "saloha/mac.hpp"
#include "saloha/simcore.hpp"

namespace saloha {

/// Columns `index,node_id,true_start_ns,slot_index,channel,conflict`.
/// `slot_index` is empty for unslotted records.
std::string conflict_series_csv(std::span<const TransmissionRecord> trace);
void emit_conflict_series(std::span<const TransmissionRecord> trace,
                          const std::filesystem::path& path);

/// Columns `n_nodes,policy,max_dc`, one row per (N, policy) in input order.
std::string dc_curve_csv(std::span<const AccessKind> policies, std::span<const int> n_values,
                         double cap);
void emit_dc_curve(std::span<const AccessKind> policies, std::span<const int> n_values, double cap,
                   const std::filesystem::path& path);

/// Columns `elapsed_s,ppm,error_ms` for elapsed = 0, step, ... <= horizon.
std::string drift_curve_csv(std::span<const double> ppms, Duration horizon, Duration step);
void emit_drift_curve(std::span<const double> ppms, Duration horizon, Duration step,
                      const std::filesystem::path& path);

/// Exact decimal of `value` in units of `unit` with trailing zeros trimmed, e.g. (4812500ms, 1s) -> "4812.5".
std::string exact_decimal(Duration value, Duration unit);

/// Human-readable run report; every figure is derived from `result`.
std::string summary_text(const ScenarioConfig& config, const RunResult& result);

/// Writes `text` to `path`, throwing IoError with the path on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace saloha
