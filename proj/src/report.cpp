#include "autoflow/report.hpp"

#include <algorithm>
#include <cstdio>

namespace autoflow {

std::string format_fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    std::string s = buf;
    if (s.find_first_of("123456789") == std::string::npos && s[0] == '-')
        s.erase(0, 1);  // no negative zero
    return s;
}

namespace {

bool looks_numeric(const std::string& s) {
    if (s.empty()) return false;
    const char c = s[0];
    return (c >= '0' && c <= '9') || c == '-' || c == '.';
}

}  // namespace

std::string render_text_table(const TextTable& t) {
    const std::size_t cols = t.header.size();
    std::vector<std::size_t> width(cols, 0);
    for (std::size_t j = 0; j < cols; ++j) width[j] = t.header[j].size();
    for (const auto& row : t.rows)
        for (std::size_t j = 0; j < cols && j < row.size(); ++j)
            width[j] = std::max(width[j], row[j].size());

    std::string out;
    auto emit = [&](const std::vector<std::string>& row, bool numeric_align) {
        for (std::size_t j = 0; j < cols; ++j) {
            const std::string& cell = j < row.size() ? row[j] : "";
            const bool right = numeric_align && looks_numeric(cell);
            if (j) out += "  ";
            if (right) {
                out += std::string(width[j] - cell.size(), ' ');
                out += cell;
            } else {
                out += cell;
                if (j + 1 < cols) out += std::string(width[j] - cell.size(), ' ');
            }
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out.push_back('\n');
    };
    emit(t.header, false);
    for (const auto& row : t.rows) emit(row, t.right_align_numeric);
    return out;
}

namespace {

std::vector<std::string> metric_cells(const MetricRow& m) {
    return {format_fixed(m.accuracy), format_fixed(m.auc),   format_fixed(m.recall),
            format_fixed(m.precision), format_fixed(m.f1),    format_fixed(m.kappa),
            format_fixed(m.mcc)};
}

}  // namespace

std::string leaderboard_text(const Leaderboard& b, bool include_fit_time) {
    TextTable t;
    t.header = {"", "Model", "Accuracy", "AUC", "Recall", "Prec.", "F1", "Kappa", "MCC"};
    if (include_fit_time) t.header.push_back("TT (Sec)");
    for (const LeaderboardRow& row : b.rows) {
        std::vector<std::string> cells = {std::string(model_id_string(row.id)),
                                          std::string(model_display_name(row.id))};
        for (auto& m : metric_cells(row.mean)) cells.push_back(std::move(m));
        if (include_fit_time) cells.push_back(format_fixed(row.mean.fit_time));
        t.rows.push_back(std::move(cells));
    }
    return render_text_table(t);
}

std::string leaderboard_csv(const Leaderboard& b) {
    std::string out = "id,model,accuracy,auc,recall,precision,f1,kappa,mcc\n";
    for (const LeaderboardRow& row : b.rows) {
        out += std::string(model_id_string(row.id)) + "," +
               std::string(model_display_name(row.id));
        for (const auto& cell : metric_cells(row.mean)) out += "," + cell;
        out += "\n";
    }
    return out;
}

std::string cv_report_text(const CVReport& r) {
    TextTable t;
    t.header = {"Fold", "Accuracy", "AUC", "Recall", "Prec.", "F1", "Kappa", "MCC"};
    for (std::size_t f = 0; f < r.fold_rows.size(); ++f) {
        std::vector<std::string> cells = {std::to_string(f)};
        for (auto& m : metric_cells(r.fold_rows[f])) cells.push_back(std::move(m));
        t.rows.push_back(std::move(cells));
    }
    std::vector<std::string> mean_cells = {"Mean"};
    for (auto& m : metric_cells(r.mean_row)) mean_cells.push_back(std::move(m));
    t.rows.push_back(std::move(mean_cells));
    std::vector<std::string> std_cells = {"Std"};
    for (auto& m : metric_cells(r.std_row)) std_cells.push_back(std::move(m));
    t.rows.push_back(std::move(std_cells));
    return render_text_table(t);
}

std::string cv_report_csv(const CVReport& r) {
    std::string out = "fold,accuracy,auc,recall,precision,f1,kappa,mcc\n";
    auto emit = [&out](const std::string& label, const MetricRow& m) {
        out += label;
        for (const auto& cell : metric_cells(m)) out += "," + cell;
        out += "\n";
    };
    for (std::size_t f = 0; f < r.fold_rows.size(); ++f) emit(std::to_string(f), r.fold_rows[f]);
    emit("mean", r.mean_row);
    emit("std", r.std_row);
    return out;
}

std::string config_report_text(const std::vector<ConfigReportRow>& rows) {
    TextTable t;
    t.header = {"Description", "Value"};
    for (const auto& row : rows) t.rows.push_back({row.description, row.value});
    return render_text_table(t);
}

}  // namespace autoflow
