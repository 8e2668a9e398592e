#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cenprobe/analysis.hpp"
#include "cenprobe/dns_engine.hpp"
#include "cenprobe/types.hpp"

namespace cenprobe {

enum class ReportFormat { json, csv };

/// "json" or "csv"; anything else throws std::invalid_argument.
ReportFormat report_format_from_string(const std::string& s);

/// Everything a finished run reports on. Contains no clock readings: the
/// same verdicts always render to the same bytes.
struct RunReport {
    std::string isp;  // identifier of the network under test
    std::vector<ProbeVerdict> verdicts;
    std::optional<MrfReport> dns;
    std::vector<IpFrequencyRow> ip_frequency;
    std::map<std::string, std::size_t> venn;
    std::optional<OverlapMatrix> technique_overlap;
    std::optional<Blocklist> blocklist;
};

/// Fills the derived sections (venn, overlap, blocklist) from the verdicts
/// already present. `signatures_matched` feeds the blocklist's collateral
/// rule.
void finalize_report(RunReport& report,
                     const std::map<std::string, std::string>& signatures_matched = {});

/// Full report in the requested format. JSON is the versioned schema with
/// stable field order; CSV is the per-technique summary table.
std::string emit_report(const RunReport& report, ReportFormat format);

/// isp,technique,censored_count,untestable_count — one row per technique.
std::string summary_csv(const RunReport& report);

/// ip,count,fraction — plot-ready address frequency table.
std::string frequency_csv(const std::vector<IpFrequencyRow>& rows);

/// domain,technique,verdict,evidence,note,signature,ip — sorted by
/// (domain, technique).
std::string verdicts_csv(const std::vector<ProbeVerdict>& verdicts);

}  // namespace cenprobe
