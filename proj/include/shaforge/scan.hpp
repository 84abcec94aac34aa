#pragma once

#include <cstdint>
#include <string>

#include "shaforge/pipeline.hpp"

namespace shaforge {

struct ScanOptions {
    unsigned n_min = 0;
    unsigned n_max = 2;
    long p_min = -50;
    long p_max = 50;  // p = 0 is never a grid cell
    AnalysisOptions analysis;
    std::string csv_path;      // result table, written atomically on completion
    std::string journal_path;  // append-only progress log enabling resume; optional
    bool out_json = false;     // emit the table as json instead of csv
    bool halt_on_error = false;  // rethrow analysis failures instead of skipping
    bool quiet = false;
    uint64_t halt_after_classes = 0;  // stop after this many new classes (0 = no limit)
};

struct ScanSummary {
    uint64_t classes_total = 0;
    uint64_t classes_resumed = 0;   // taken from the journal, not recomputed
    uint64_t classes_analyzed = 0;  // analysed in this run
    uint64_t rows = 0;              // rows in the final table
    bool completed = false;         // the whole grid is done and the table written
};

ScanSummary run_scan(const ScanOptions& opts);

}  // namespace shaforge
