#include "unhap/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace unhap::io {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(trim(cell));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
    if (s.empty()) return false;
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, out);
    return res.ec == std::errc() && res.ptr == end;
}

}  // namespace

void write_events(const fs::path& path, const EventSequence& seq, const Provenance& prov) {
    std::ostringstream out;
    out << "# config_sha256=" << prov.config_sha256 << "\n";
    out << "# seed=" << prov.seed << "\n";
    out << "# horizon=" << format_double(seq.T) << "\n";
    out << "type_id,time,mark,label\n";
    for (int i = 0; i < seq.D(); ++i) {
        for (const auto& e : seq.events[static_cast<std::size_t>(i)]) {
            out << i << ',' << format_double(e.t) << ',' << format_double(e.kappa) << ',';
            if (e.label) out << *e.label;
            out << '\n';
        }
    }
    write_text(path, out.str());
}

EventSequence read_events(const fs::path& path, std::optional<double> horizon, const MarkModel* marks) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open event file '" + path.string() + "'");
    std::optional<double> file_horizon;
    std::vector<std::pair<int, MarkedEvent>> rows;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            const auto eq = t.find('=');
            if (eq != std::string::npos && trim(t.substr(1, eq - 1)) == "horizon") {
                double h = 0;
                if (!parse_number(trim(t.substr(eq + 1)), h))
                    throw ParseError("line " + std::to_string(lineno) + ": malformed horizon comment");
                file_horizon = h;
            }
            continue;
        }
        if (!header_seen) {
            if (t != "type_id,time,mark,label")
                throw ParseError("line " + std::to_string(lineno) + ": expected header 'type_id,time,mark,label'");
            header_seen = true;
            continue;
        }
        const auto cells = split(t, ',');
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (cells.size() != 4) throw ParseError(where + "expected 4 columns, got " + std::to_string(cells.size()));
        int type = 0;
        MarkedEvent e;
        if (!parse_number(cells[0], type) || type < 0) throw ParseError(where + "type_id must be an integer >= 0");
        if (!parse_number(cells[1], e.t) || !std::isfinite(e.t) || e.t < 0)
            throw ParseError(where + "time must be a nonnegative number");
        if (!parse_number(cells[2], e.kappa) || !std::isfinite(e.kappa)) throw ParseError(where + "mark must be a number");
        if (marks && !marks->is_unmarked() && !marks->contains(e.kappa))
            throw ParseError(where + "mark outside the mark set of model '" + marks->name() + "'");
        if (!cells[3].empty()) {
            int label = 0;
            if (!parse_number(cells[3], label) || (label != 0 && label != 1))
                throw ParseError(where + "label must be 0, 1 or empty");
            e.label = label;
        }
        rows.emplace_back(type, e);
    }
    if (!header_seen) throw ParseError("event file '" + path.string() + "' has no header row");
    const std::optional<double> T = horizon ? horizon : file_horizon;
    if (!T) throw ConfigError("event file has no horizon comment and no horizon was configured");
    if (!(*T > 0)) throw ConfigError("horizon must be > 0");

    int D = 1;
    for (const auto& [type, e] : rows) D = std::max(D, type + 1);
    EventSequence seq(*T, D);
    for (auto& [type, e] : rows) {
        if (e.t > *T) throw ParseError("event time " + format_double(e.t) + " lies beyond the horizon");
        seq.events[static_cast<std::size_t>(type)].push_back(e);
    }
    seq.sort_and_separate();
    return seq;
}

json kernel_to_json(const KernelParams& kernel) {
    const auto names = param_names(family(kernel));
    const KernelVector v = to_vector(kernel);
    json j;
    j["family"] = std::string(to_string(family(kernel)));
    for (int p = 0; p < 3; ++p) j[std::string(names[static_cast<std::size_t>(p)])] = v(p);
    j["W"] = support_length(kernel);
    return j;
}

KernelParams kernel_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("kernel must be an object");
    const KernelFamily fam = parse_kernel_family(j.at("family").get<std::string>());
    const auto names = param_names(fam);
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "family" && key != "W" && key != names[0] && key != names[1] && key != names[2])
            throw ConfigError("unknown kernel key '" + key + "'");
    }
    const double W = j.value("W", 1.0);
    const double a = j.at(std::string(names[0])).get<double>();
    const double p1 = j.at(std::string(names[1])).get<double>();
    const double p2 = j.at(std::string(names[2])).get<double>();
    return fam == KernelFamily::TruncatedGaussian ? make_trunc_gauss(a, p1, p2, W) : make_raised_cosine(a, p1, p2, W);
}

json params_to_json(const ModelParams& params) {
    json j;
    j["D"] = params.D();
    j["mu"] = std::vector<double>(params.mu.data(), params.mu.data() + params.mu.size());
    j["mu_tilde"] = std::vector<double>(params.mu_tilde.data(), params.mu_tilde.data() + params.mu_tilde.size());
    json ks = json::array();
    for (const auto& k : params.kernels) ks.push_back(kernel_to_json(k));
    j["kernels"] = ks;
    j["marks"] = params.marks ? params.marks->name() : std::string("unmarked");
    return j;
}

ModelParams params_from_json(const json& j, std::shared_ptr<const MarkModel> marks) {
    try {
        const int D = j.at("D").get<int>();
        const auto mu = j.at("mu").get<std::vector<double>>();
        const auto mut = j.at("mu_tilde").get<std::vector<double>>();
        const auto& ks = j.at("kernels");
        if (D < 1 || mu.size() != static_cast<std::size_t>(D) || mut.size() != static_cast<std::size_t>(D) ||
            ks.size() != static_cast<std::size_t>(D * D))
            throw ConfigError("parameter file dimensions are inconsistent");
        if (!marks) marks = std::make_shared<const MarkModel>(MarkModel::builtin(j.at("marks").get<std::string>()));
        ModelParams p(D, kernel_from_json(ks.at(0)), marks);
        for (int i = 0; i < D; ++i) {
            p.mu(i) = mu[static_cast<std::size_t>(i)];
            p.mu_tilde(i) = mut[static_cast<std::size_t>(i)];
        }
        for (std::size_t k = 0; k < ks.size(); ++k) p.kernels[k] = kernel_from_json(ks[k]);
        return p;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed parameter file: ") + e.what());
    }
}

json metrics_to_json(const MetricsReport& report) {
    json j = json::object();
    if (report.counts) {
        const Confusion& c = *report.counts;
        j["precision"] = c.precision();
        j["recall"] = c.recall();
        j["tp"] = c.tp;
        j["fp"] = c.fp;
        j["fn"] = c.fn;
        j["tn"] = c.tn;
    }
    if (report.param_error_l2) j["param_error_l2"] = *report.param_error_l2;
    if (report.nll) {
        j["nll"] = std::isfinite(report.nll->value) ? json(report.nll->value) : json("inf");
        j["nll_policy"] = report.nll->policy == NllPolicy::Mixture ? "mixture" : "hawkes-only";
        j["nll_normalization"] = "per-event";
        j["nll_zero_intensity_events"] = report.nll->zero_intensity_events;
    }
    j["notices"] = report.notices;
    return j;
}

std::string metrics_to_text(const MetricsReport& report) {
    std::ostringstream out;
    if (report.counts) {
        const Confusion& c = *report.counts;
        out << "precision " << format_double(c.precision()) << "\n";
        out << "recall " << format_double(c.recall()) << "\n";
        out << "tp " << c.tp << "\nfp " << c.fp << "\nfn " << c.fn << "\ntn " << c.tn << "\n";
    }
    if (report.param_error_l2) out << "param_error_l2 " << format_double(*report.param_error_l2) << "\n";
    if (report.nll) {
        out << "nll " << (std::isfinite(report.nll->value) ? format_double(report.nll->value) : "inf") << "\n";
        out << "nll_policy " << (report.nll->policy == NllPolicy::Mixture ? "mixture" : "hawkes-only") << "\n";
        out << "nll_normalization per-event\n";
    }
    for (const auto& n : report.notices) out << "notice " << n << "\n";
    return out.str();
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

json read_json(const fs::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream out;
    for (unsigned int k = 0; k < len; ++k) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
    return out.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text(path)); }

void write_manifest(const fs::path& dir, const std::vector<std::string>& files) {
    std::ostringstream out;
    for (const auto& f : files) out << sha256_file(dir / f) << "  " << f << "\n";
    write_text(dir / "manifest.txt", out.str());
}

}  // namespace unhap::io
