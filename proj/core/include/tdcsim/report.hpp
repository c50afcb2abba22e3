/*
 * Copyright 2026 the tdcsim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TDCSIM_REPORT_HPP
#define TDCSIM_REPORT_HPP

#include <string>

#include "tdcsim/harness.hpp"

namespace tdcsim {

enum class ReportFormat { csv, json, svg };

ReportFormat report_format_from_name(const std::string& name);

/// Renders a sweep report. All three formats derive from the same records:
///   csv   - header "requested_fs,mean_fs,stddev_fs,error_fs" plus one row
///           per point, integers only;
///   json  - full record structure including provenance;
///   svg   - two plot groups, the transfer curve and the error curve.
/// Identical reports render to identical bytes. Throws UsageError on an
/// empty report.
std::string emit_report(const SweepReport& report, ReportFormat format);

/// Parses the csv form back into per-point records (provenance and
/// aggregates are not part of the csv and come back recomputed/empty).
SweepReport parse_report_csv(const std::string& text);

} // namespace tdcsim

#endif
