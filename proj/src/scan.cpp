#include "shaforge/scan.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <vector>

#include "json.hpp"

#include "shaforge/errors.hpp"
#include "shaforge/family.hpp"
#include "shaforge/util.hpp"

namespace shaforge {

namespace {

struct GridCell {
    unsigned n;
    long p;
};

// n ascending, then |p| ascending with the negative sign first
std::vector<GridCell> grid_cells(const ScanOptions& o) {
    std::vector<GridCell> cells;
    long amax = std::max(std::llabs(o.p_min), std::llabs(o.p_max));
    for (unsigned n = o.n_min; n <= o.n_max; ++n) {
        for (long a = 1; a <= amax; ++a) {
            for (long p : {-a, a}) {
                if (p >= o.p_min && p <= o.p_max) cells.push_back({n, p});
            }
        }
    }
    return cells;
}

std::string with_crc(const std::string& body) {
    char tag[16];
    std::snprintf(tag, sizeof tag, "%08x", crc32(body));
    return body + "|" + tag;
}

// strips and verifies the trailing crc field; empty result means invalid
bool strip_crc(const std::string& line, std::string* body) {
    size_t bar = line.rfind('|');
    if (bar == std::string::npos || line.size() - bar != 9) return false;
    for (size_t i = bar + 1; i < line.size(); ++i) {
        if (!std::isxdigit(static_cast<unsigned char>(line[i]))) return false;
    }
    *body = line.substr(0, bar);
    return std::strtoul(line.c_str() + bar + 1, nullptr, 16) == crc32(*body);
}

std::string header_body(const ScanOptions& o) {
    return "SFJ1|grid=" + std::to_string(o.n_min) + ".." + std::to_string(o.n_max) + "," +
           std::to_string(o.p_min) + ".." + std::to_string(o.p_max) +
           "|k=" + std::to_string(o.analysis.k) +
           "|conductor_only=" + std::string(o.analysis.conductor_only ? "1" : "0") +
           "|max_terms=" + std::to_string(o.analysis.max_terms) + "|v=1";
}

void check_field(const std::string& s) {
    if (s.find_first_of(",;|\n") != std::string::npos)
        throw InternalError("journal field contains a reserved character: " + s);
}

std::string member_record(const MemberOutcome& m, bool conductor_only) {
    bool rounded =
        (m.status == ShaStatus::ok || m.status == ShaStatus::not_a_square) && m.sha != 0;
    std::vector<std::string> f(11);
    f[0] = std::to_string(m.index);
    f[1] = m.arithmetic_done ? m.conductor.get_str() : "";
    f[2] = m.torsion != 0 ? std::to_string(m.torsion) : "";
    f[3] = (m.arithmetic_done && !conductor_only) ? m.c_fin.get_str() : "";
    f[4] = m.c_infty;
    f[5] = m.s_m;
    f[6] = rounded ? m.sha.get_str() : "";
    f[7] = (m.status == ShaStatus::ok && m.sha != 0) ? m.sha_sqrt.get_str() : "";
    f[8] = m.gs;
    f[9] = sha_status_name(m.status);
    char t[32];
    std::snprintf(t, sizeof t, "%.3f", m.seconds);
    f[10] = t;
    std::string out;
    for (size_t i = 0; i < f.size(); ++i) {
        check_field(f[i]);
        if (i) out += ',';
        out += f[i];
    }
    return out;
}

// journal payload for one completed cell
std::string cell_payload(const ScanOptions& opts, const GridCell& cell) {
    std::vector<WeierstrassCurve> curves;
    try {
        curves = family_class(cell.n, mpz_class(cell.p));
    } catch (const DegenerateParameters&) {
        return "D";
    }
    try {
        ClassOutcome cls = analyze_class(curves, opts.analysis);
        std::string payload;
        for (size_t i = 0; i < cls.members.size(); ++i) {
            if (i) payload += ';';
            payload += member_record(cls.members[i], opts.analysis.conductor_only);
        }
        return payload;
    } catch (const Error& e) {
        if (opts.halt_on_error) throw;
        return std::string("X|") + e.kind();
    }
}

struct JournalState {
    bool has_header = false;
    std::vector<std::string> payloads;  // one per completed cell, in cell order
};

// reads the journal and normalizes it: a torn final line (interrupted write)
// is dropped; damage anywhere else is an error
JournalState read_journal(const std::string& path, const std::string& expect_header,
                          size_t max_cells) {
    JournalState st;
    std::string raw;
    try {
        raw = read_file(path);
    } catch (const IoError&) {
        return st;  // nothing recorded yet
    }
    std::vector<std::string> lines;
    size_t start = 0;
    while (start < raw.size()) {
        size_t nl = raw.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(raw.substr(start));
            break;
        }
        lines.push_back(raw.substr(start, nl - start));
        start = nl + 1;
    }

    std::vector<std::string> good;
    for (size_t i = 0; i < lines.size(); ++i) {
        bool last = i + 1 == lines.size();
        bool complete = last ? raw.back() == '\n' : true;
        std::string body;
        bool valid = complete && strip_crc(lines[i], &body);
        if (valid && i == 0) {
            if (body != expect_header)
                throw CheckpointCorrupt("journal was written for different scan options");
            st.has_header = true;
            good.push_back(body);
            continue;
        }
        if (valid) {
            valid = body.rfind("C|", 0) == 0;
            size_t bar = valid ? body.find('|', 2) : std::string::npos;
            valid = valid && bar != std::string::npos &&
                    body.substr(2, bar - 2) == std::to_string(good.size() - 1) &&
                    good.size() <= max_cells;
            if (valid) {
                good.push_back(body);
                st.payloads.push_back(body.substr(bar + 1));
                continue;
            }
        }
        if (!last) throw CheckpointCorrupt("journal line " + std::to_string(i + 1) + " is damaged");
        // torn tail: forget it and restore a clean file below
    }

    std::string content;
    for (const std::string& b : good) content += with_crc(b) + "\n";
    if (content != raw) write_file_atomic(path, content);
    return st;
}

std::string csv_from_payloads(const std::vector<GridCell>& cells,
                              const std::vector<std::string>& payloads, uint64_t* rows) {
    std::string out = "n,p,i,conductor,torsion,c_fin,sha,sha_sqrt,gs,status\n";
    for (size_t c = 0; c < payloads.size(); ++c) {
        const std::string& pl = payloads[c];
        if (pl == "D" || pl.rfind("X|", 0) == 0) continue;
        for (const std::string& rec : split(pl, ';')) {
            auto f = split(rec, ',');
            if (f.size() != 11) throw CheckpointCorrupt("journal member record is malformed");
            out += std::to_string(cells[c].n);
            out += ',';
            out += std::to_string(cells[c].p);
            for (size_t j : {0u, 1u, 2u, 3u, 6u, 7u, 8u, 9u}) {
                out += ',';
                out += f[j];
            }
            out += '\n';
            ++*rows;
        }
    }
    return out;
}

std::string json_from_payloads(const std::vector<GridCell>& cells,
                               const std::vector<std::string>& payloads, uint64_t* rows) {
    nlohmann::json arr = nlohmann::json::array();
    auto put = [](nlohmann::json& j, const char* key, const std::string& v) {
        if (v.empty())
            j[key] = nullptr;
        else
            j[key] = v;
    };
    for (size_t c = 0; c < payloads.size(); ++c) {
        const std::string& pl = payloads[c];
        if (pl == "D" || pl.rfind("X|", 0) == 0) continue;
        for (const std::string& rec : split(pl, ';')) {
            auto f = split(rec, ',');
            if (f.size() != 11) throw CheckpointCorrupt("journal member record is malformed");
            nlohmann::json j;
            j["n"] = cells[c].n;
            j["p"] = cells[c].p;
            j["i"] = std::atoi(f[0].c_str());
            put(j, "conductor", f[1]);
            j["torsion"] = f[2].empty() ? nlohmann::json(nullptr) : nlohmann::json(std::atoi(f[2].c_str()));
            put(j, "c_fin", f[3]);
            put(j, "c_infty", f[4]);
            put(j, "s_m", f[5]);
            put(j, "sha_int", f[6]);
            put(j, "sha_sqrt", f[7]);
            put(j, "gs", f[8]);
            j["status"] = f[9];
            j["timing"] = std::atof(f[10].c_str());
            arr.push_back(std::move(j));
            ++*rows;
        }
    }
    return arr.dump(2) + "\n";
}

}  // namespace

ScanSummary run_scan(const ScanOptions& opts) {
    if (opts.csv_path.empty()) throw InternalError("scan needs an output path");
    ScanSummary sum;
    std::vector<GridCell> cells = grid_cells(opts);
    sum.classes_total = cells.size();

    const std::string header = header_body(opts);
    JournalState state;
    if (!opts.journal_path.empty()) state = read_journal(opts.journal_path, header, cells.size());
    std::vector<std::string> payloads = std::move(state.payloads);
    sum.classes_resumed = payloads.size();

    std::ofstream journal;
    if (!opts.journal_path.empty()) {
        journal.open(opts.journal_path, std::ios::app);
        if (!journal) throw IoError("cannot open journal " + opts.journal_path);
        if (!state.has_header) journal << with_crc(header) << "\n" << std::flush;
    }

    for (size_t idx = payloads.size(); idx < cells.size(); ++idx) {
        if (opts.halt_after_classes != 0 && sum.classes_analyzed >= opts.halt_after_classes)
            break;
        const GridCell& cell = cells[idx];
        if (!opts.quiet) {
            std::cerr << "scan " << (idx + 1) << "/" << cells.size() << " n=" << cell.n
                      << " p=" << cell.p << std::endl;
        }
        std::string payload = cell_payload(opts, cell);
        payloads.push_back(payload);
        ++sum.classes_analyzed;
        if (journal.is_open()) {
            journal << with_crc("C|" + std::to_string(idx) + "|" + payload) << "\n" << std::flush;
        }
    }

    if (payloads.size() == cells.size()) {
        std::string table = opts.out_json ? json_from_payloads(cells, payloads, &sum.rows)
                                          : csv_from_payloads(cells, payloads, &sum.rows);
        write_file_atomic(opts.csv_path, table);
        sum.completed = true;
    }
    return sum;
}

}  // namespace shaforge
