#pragma once

#include <string>
#include <vector>

#include "autoflow/experiment.hpp"

namespace autoflow {

/// Fixed-point with 4 decimals, matching the on-screen tables; negative zero
/// normalizes to "0.0000".
std::string format_fixed(double v, int precision = 4);

struct TextTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    bool right_align_numeric = true;
};

/// Space-aligned table; numeric-looking cells are right-aligned.
std::string render_text_table(const TextTable& t);

/// include_fit_time adds the TT (Sec) column; file artifacts leave it out so
/// repeated runs stay byte-identical.
std::string leaderboard_text(const Leaderboard& b, bool include_fit_time);
std::string leaderboard_csv(const Leaderboard& b);

/// Fold 0..k-1 rows plus Mean and Std.
std::string cv_report_text(const CVReport& r);
std::string cv_report_csv(const CVReport& r);

std::string config_report_text(const std::vector<ConfigReportRow>& rows);

}  // namespace autoflow
