#ifndef DDFL_RUN_IO_HPP
#define DDFL_RUN_IO_HPP

#include <string>
#include <vector>

#include "ddfl/analysis.hpp"
#include "ddfl/closed_loop.hpp"
#include "ddfl/config.hpp"

namespace ddfl {

// Canonical defaults for every key the run builder understands. Plant gain
// bounds and the parametric-family coefficients are intentionally absent:
// they default from the selected plant and may be overridden per key.
KeyValueConfig default_config();

struct ResolvedRun {
  RunConfig run;
  KeyValueConfig resolved;  // canonical echo written to the manifest
};

// Builds a run from user config overlaid on the defaults. Unknown keys,
// malformed values, unknown plant names and out-of-range parameters all
// throw ConfigError naming the offender. The resolved echo reparses and
// rebuilds to itself (fixpoint), which is what makes manifests replayable.
ResolvedRun build_run(const KeyValueConfig& cfg);

// Sections consumed by the sweep / order / estimator-check subcommands.
std::vector<double> sweep_T_values(const KeyValueConfig& resolved);
std::vector<double> estimator_T_values(const KeyValueConfig& resolved);

struct OrderSettings {
  std::vector<double> T_values;
  GridBox box;
};
OrderSettings order_settings(const KeyValueConfig& resolved);

// Manifest layout: "# ddfl manifest" and "# content-hash: <sha1>" (git blob
// convention over the body) followed by the canonical config body. No
// timestamps or host details: identical configs give identical manifests.
std::string manifest_text(const KeyValueConfig& resolved);

// Refuses to overwrite an existing manifest unless force is set.
void write_manifest(const std::string& path, const KeyValueConfig& resolved,
                    bool force);

// Parses a manifest back into a config, verifying the content hash.
KeyValueConfig read_manifest(const std::string& path);

// Flat key = value rendering of an analysis report.
std::string report_text(const AnalysisReport& rep, double T0,
                        bool T_within_T0);

void ensure_dir(const std::string& dir);

}  // namespace ddfl

#endif  // DDFL_RUN_IO_HPP
