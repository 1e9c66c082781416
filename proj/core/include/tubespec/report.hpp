#ifndef TUBESPEC_REPORT_HPP
#define TUBESPEC_REPORT_HPP

#include <string>

#include "tubespec/sweep.hpp"

namespace tubespec {

enum class ReportFormat { Csv, Json, PlotScript };

ReportFormat report_format_from_string(const std::string& s);
std::string extension(ReportFormat f);

/// CSV with the fixed column set
///   case,eps,n,lambda,leading,mu,residual,nu,sandwich_ok,orth_fraction,err_lambda,err_mu
/// one header row, 17-significant-digit decimals.  The same bytes every
/// run for identical configs.
std::string csv_string(const SweepReport& report);

/// JSON mirror of the whole report (records, strong-coupling table,
/// warnings, provenance); numeric fields survive a round trip bit-exactly.
std::string json_string(const SweepReport& report);
SweepReport report_from_json(const std::string& text);

/// Self-contained plot script (matplotlib, data inlined): residual vs
/// 1/eps and eps*mu_1 vs inf kappa.
std::string plot_script(const SweepReport& report);

/// Writes the chosen rendering to `path`.  Throws IoError on failure.
void emit_report(const SweepReport& report, ReportFormat format, const std::string& path);

} // namespace tubespec

#endif
