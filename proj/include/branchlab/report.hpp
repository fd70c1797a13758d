#pragma once

// Reports as emitted by the command-line tool: a JSON document plus a flat
// table for CSV and text output, and the file formats read from disk.

#include <string>
#include <vector>

#include "branchlab/confirmation.hpp"
#include "branchlab/decision.hpp"
#include "branchlab/dw_verifier.hpp"
#include "branchlab/io.hpp"

namespace branchlab::io {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Json>> rows;  // scalar cells
};

struct Report {
  Json document = Json::object();
  Table table;
};

enum class Format { Json, Csv, Table };

/// "json", "csv" or "table"; throws ValidationError otherwise.
Format parse_format(const std::string& text);

/// Numbers with 12 significant digits, fields in insertion order. An empty
/// table becomes its header row alone.
std::string emit(const Report& report, Format format);

/// JSON text with every number printed to 12 significant digits.
std::string dump_json(const Json& doc, int indent = 2);

Report stage_report(const dw::StageReport& report);

/// Preference files: a JSON list of tiers (best first), each a list of acts
/// as {state: consequence} objects, or an object {setup, tiers} or
/// {setup, acts, judgments} for relations that need not be total.
decision::PreferenceRelation preferences_from_json(const Json& doc);
Json preferences_to_json(const decision::PreferenceRelation& prefs);

Report extraction_report(const decision::PreferenceRelation& prefs,
                         const decision::Extraction& extraction);

Report book_report(const std::optional<confirm::Book>& book);

/// theories.json: {"true_theory": name, "theories": [{name, prior,
/// likelihoods: "born" | {"<eigenvalue>": p}}]}
void theories_from_json(const Json& doc, confirm::ExperimentSpec& spec);

/// Trajectory table: iteration, outcome_class, caring_mass,
/// credence_<theory>... with per-iteration summaries in the document.
Report confirmation_report(const confirm::ExperimentSpec& spec,
                           const confirm::ExperimentResult& result);

}  // namespace branchlab::io
