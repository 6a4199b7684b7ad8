#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "teval/error.hpp"
#include "teval/pipeline.hpp"

namespace teval {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string sig12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string render_ranked(const std::vector<RankedList>& lists) {
    std::string out;
    for (const auto& list : lists) {
        for (const auto& entry : list.entries) {
            out += list.bug_id;
            out += '\t';
            out += std::to_string(list.run_id);
            out += '\t';
            out += std::to_string(entry.rank);
            out += '\t';
            out += entry.record_id;
            out += '\t';
            out += fixed6(entry.score);
            out += '\n';
        }
    }
    return out;
}

std::string render_features(const std::vector<std::pair<std::string, FeatureVector>>& features) {
    std::string out;
    for (const auto& [record_id, fv] : features) {
        out += record_id;
        const auto values = fv.as_array();
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            out += '\t';
            out += std::to_string(static_cast<long long>(values[i]));
        }
        out += '\t';
        out += sig12(fv.test_doc_sim);
        out += '\n';
    }
    return out;
}

ordered_json confusion_json(const ConfusionCounts& c) {
    return ordered_json{{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

ordered_json found_json(const std::vector<KMetric>& found) {
    ordered_json arr = ordered_json::array();
    for (const auto& m : found) {
        arr.push_back(ordered_json{{"k", m.k}, {"count", m.count}, {"fraction", m.fraction}});
    }
    return arr;
}

ordered_json variant_json(const VariantResult& v) {
    ordered_json j;
    j["per_run"] = ordered_json::array();
    for (const auto& run : v.per_run) {
        ordered_json r{{"run", run.run_id}};
        r.update(confusion_json(run.confusion));
        r["bug_found"] = run.bug_found;
        r["precision"] = run.precision;
        r["fpr"] = run.fpr;
        if (!run.found.empty()) r["found"] = found_json(run.found);
        j["per_run"].push_back(std::move(r));
    }
    ordered_json agg{{"tp", v.aggregate.tp},
                     {"fp", v.aggregate.fp},
                     {"tn", v.aggregate.tn},
                     {"fn", v.aggregate.fn},
                     {"bug_found", v.aggregate.bug_found},
                     {"precision", v.aggregate.precision},
                     {"fpr", v.aggregate.fpr}};
    if (!v.aggregate.found.empty()) agg["found"] = found_json(v.aggregate.found);
    j["aggregate"] = std::move(agg);
    j["by_oracle_kind"] = ordered_json::array();
    for (const auto& kind : v.by_kind) {
        ordered_json k{{"kind", std::string(to_string(kind.kind))}};
        k.update(confusion_json(kind.confusion));
        k["bug_found"] = kind.bug_found;
        k["precision"] = kind.precision;
        k["fpr"] = kind.fpr;
        j["by_oracle_kind"].push_back(std::move(k));
    }
    if (!v.per_run_seed.empty()) {
        j["found_per_run_seed"] = ordered_json::array();
        for (const auto& rsf : v.per_run_seed) {
            ordered_json entry{{"run", rsf.run_id}, {"seed", rsf.seed}};
            ordered_json arr = ordered_json::array();
            for (std::size_t ki = 0; ki < rsf.found.size(); ++ki) {
                arr.push_back(ordered_json{{"count", rsf.found[ki].count},
                                           {"fraction", rsf.found[ki].fraction}});
            }
            entry["found"] = std::move(arr);
            j["found_per_run_seed"].push_back(std::move(entry));
        }
    }
    return j;
}

std::string render_json(const EvaluationResult& result) {
    const PipelineConfig& c = result.config;
    ordered_json j;
    j["config"] = ordered_json{{"records", c.records_path.string()},
                               {"outcomes", c.outcomes_path.string()},
                               {"ranking", std::string(to_string(c.ranking))},
                               {"seeds", c.seeds},
                               {"k", c.ks},
                               {"provenance", std::string(to_string(c.provenance))},
                               {"baseline_noexception", c.baseline_noexception}};
    j["corpus"] = ordered_json{{"bugs", result.bug_universe},
                               {"runs", result.run_universe},
                               {"warnings", result.warnings}};
    j["main"] = variant_json(result.main);
    if (result.baseline.has_value()) {
        j["baseline"] = variant_json(*result.baseline);
        j["comparison"] = ordered_json::array();
        for (const auto& row : result.comparison) {
            j["comparison"].push_back(
                ordered_json{{"metric", row.metric},
                             {"mean_main", row.mean_main},
                             {"mean_baseline", row.mean_baseline},
                             {"wilcoxon_w", row.wilcoxon.statistic},
                             {"p_value", row.wilcoxon.p_two_sided},
                             {"effective_n", row.wilcoxon.effective_n},
                             {"exact", row.wilcoxon.exact},
                             {"cliffs_delta", row.effect.delta},
                             {"magnitude", std::string(to_string(row.effect.magnitude))},
                             {"significant", row.significant}});
        }
    }
    return j.dump(2) + "\n";
}

void append_row(std::string& out, const char* fmt, ...)
    __attribute__((format(printf, 2, 3)));

void append_row(std::string& out, const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    out += buf;
}

std::string join_ints(const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(values[i]);
    }
    return out;
}

std::string join_seeds(const std::vector<std::uint64_t>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(values[i]);
    }
    return out;
}

void render_variant_text(std::string& out, const VariantResult& v, const std::string& title) {
    out += title + "\n";
    append_row(out, "  %-6s %8s %8s %8s %8s %10s %11s %11s\n", "run", "tp", "fp", "tn", "fn",
               "bug_found", "precision", "fpr");
    for (const auto& run : v.per_run) {
        append_row(out, "  %-6d %8lld %8lld %8lld %8lld %10lld %11.6f %11.6f\n", run.run_id,
                   run.confusion.tp, run.confusion.fp, run.confusion.tn, run.confusion.fn,
                   run.bug_found, run.precision, run.fpr);
    }
    append_row(out, "  %-6s %8.2f %8.2f %8.2f %8.2f %10.2f %11.6f %11.6f\n", "mean",
               v.aggregate.tp, v.aggregate.fp, v.aggregate.tn, v.aggregate.fn,
               v.aggregate.bug_found, v.aggregate.precision, v.aggregate.fpr);

    if (!v.aggregate.found.empty()) {
        out += "\n  found@K, count / fraction, averaged over ranking seeds\n";
        append_row(out, "  %-6s", "run");
        for (const auto& m : v.aggregate.found) {
            char head[32];
            std::snprintf(head, sizeof head, "@%d", m.k);
            append_row(out, " %18s", head);
        }
        out += "\n";
        for (const auto& run : v.per_run) {
            append_row(out, "  %-6d", run.run_id);
            for (const auto& m : run.found) {
                char cell[48];
                std::snprintf(cell, sizeof cell, "%.2f / %.4f", m.count, m.fraction);
                append_row(out, " %18s", cell);
            }
            out += "\n";
        }
        append_row(out, "  %-6s", "mean");
        for (const auto& m : v.aggregate.found) {
            char cell[48];
            std::snprintf(cell, sizeof cell, "%.2f / %.4f", m.count, m.fraction);
            append_row(out, " %18s", cell);
        }
        out += "\n";
    }

    if (!v.by_kind.empty()) {
        out += "\n  by oracle kind\n";
        append_row(out, "  %-22s %8s %8s %8s %8s %10s %11s %11s\n", "kind", "tp", "fp", "tn",
                   "fn", "bug_found", "precision", "fpr");
        for (const auto& kind : v.by_kind) {
            append_row(out, "  %-22s %8lld %8lld %8lld %8lld %10lld %11.6f %11.6f\n",
                       std::string(to_string(kind.kind)).c_str(), kind.confusion.tp,
                       kind.confusion.fp, kind.confusion.tn, kind.confusion.fn, kind.bug_found,
                       kind.precision, kind.fpr);
        }
    }
}

std::string render_text(const EvaluationResult& result) {
    const PipelineConfig& c = result.config;
    std::string out;
    out += "test oracle evaluation report\n";
    out += "=============================\n\n";
    out += "config\n";
    out += "  records:    " + c.records_path.string() + "\n";
    out += "  outcomes:   " + c.outcomes_path.string() + "\n";
    out += "  ranking:    " + std::string(to_string(c.ranking));
    if (c.ranking != RankingMethod::None) out += " (seeds: " + join_seeds(c.seeds) + ")";
    out += "\n";
    out += "  k:          " + join_ints(c.ks) + "\n";
    out += "  provenance: " + std::string(to_string(c.provenance)) + "\n";
    out += "  baseline:   ";
    out += c.baseline_noexception ? "noexception" : "off";
    out += "\n\n";

    out += "corpus\n";
    out += "  bugs: " + std::to_string(result.bug_universe.size()) + "\n";
    out += "  runs: " + std::to_string(result.run_universe.size()) + "\n";
    if (!result.warnings.empty()) {
        out += "\nwarnings\n";
        for (const auto& w : result.warnings) out += "  - " + w + "\n";
    }
    out += "\n";

    render_variant_text(out, result.main, "results: main");
    if (result.baseline.has_value()) {
        out += "\n";
        render_variant_text(out, *result.baseline, "results: noexception baseline");
        out += "\ncomparison: main vs noexception baseline (per-run paired samples)\n";
        append_row(out, "  %-16s %12s %12s %8s %12s %9s %11s %-12s\n", "metric", "mean_main",
                   "mean_base", "W", "p", "n_eff", "delta", "verdict");
        for (const auto& row : result.comparison) {
            append_row(out, "  %-16s %12.6f %12.6f %8.1f %12.6g %9d %11.6f %s%s\n",
                       row.metric.c_str(), row.mean_main, row.mean_baseline,
                       row.wilcoxon.statistic, row.wilcoxon.p_two_sided, row.wilcoxon.effective_n,
                       row.effect.delta, std::string(to_string(row.effect.magnitude)).c_str(),
                       row.significant ? ", significant" : "");
        }
    }

    out += "\nnotes\n";
    out += "  - precision and fpr fall back to 0 when their denominators are 0\n";
    out += "  - found@K is listed both as a bug count and as a fraction of all bugs\n";
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw DataError("failed while writing " + path.string());
}

}  // namespace

void write_ranked_tsv(const std::vector<RankedList>& lists, const std::filesystem::path& path) {
    write_file(path, render_ranked(lists));
}

void write_features_tsv(const std::vector<std::pair<std::string, FeatureVector>>& features,
                        const std::filesystem::path& path) {
    write_file(path, render_features(features));
}

void write_reports(const EvaluationResult& result, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!std::filesystem::is_directory(out_dir)) {
        throw DataError("cannot create output directory " + out_dir.string());
    }

    std::vector<std::pair<std::filesystem::path, std::string>> files;
    files.emplace_back(out_dir / "report.json", render_json(result));
    files.emplace_back(out_dir / "report.txt", render_text(result));
    if (result.config.ranking != RankingMethod::None) {
        files.emplace_back(out_dir / "ranked.tsv", render_ranked(result.main.consensus));
    }
    if (result.config.dump_features) {
        files.emplace_back(out_dir / "features.tsv", render_features(result.main.features));
    }

    try {
        for (const auto& [path, content] : files) write_file(path, content);
    } catch (...) {
        for (const auto& [path, content] : files) {
            std::error_code remove_ec;
            std::filesystem::remove(path, remove_ec);
        }
        throw;
    }
}

}  // namespace teval
