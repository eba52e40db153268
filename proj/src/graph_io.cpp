#include "mlmfit/graph_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mlmfit {

namespace {

bool comment_or_blank(const std::string& line) {
    for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '#' || c == '%';
    }
    return true;  // blank
}

struct LineParser {
    std::unordered_map<std::string, std::uint32_t> ids;
    std::vector<std::string> names;

    std::uint32_t intern(const std::string& tok) {
        auto [it, inserted] = ids.emplace(tok, std::uint32_t(names.size()));
        if (inserted) names.push_back(tok);
        return it->second;
    }

    // Returns false on comment/blank; throws ParseError on malformed line.
    bool parse(const std::string& line, std::size_t lineno,
               std::uint32_t& src, std::uint32_t& dst) {
        if (comment_or_blank(line)) return false;
        std::istringstream ss(line);
        std::string a, b;
        if (!(ss >> a >> b)) {
            std::ostringstream msg;
            msg << "malformed edge at line " << lineno
                << ": expected two whitespace-separated tokens";
            throw ParseError(lineno, msg.str());
        }
        src = intern(a);
        dst = intern(b);
        return true;
    }
};

DegreeHistogram histogram_from_counts(const std::vector<long long>& deg) {
    std::map<long long, long long> freq;
    long long excluded = 0;
    for (long long d : deg) {
        if (d <= 0) { ++excluded; continue; }
        ++freq[d];
    }
    if (freq.empty())
        throw std::invalid_argument("degree_histogram: no nodes with positive degree");
    DegreeHistogram h;
    h.excluded_zero_degree = excluded;
    for (auto [d, c] : freq) {
        h.rows.push_back({d, c});
        h.n += c;
    }
    return h;
}

template <class EdgeVisitor>
DegreeHistogram degrees_from_edges(std::size_t node_count, DegreeMode mode,
                                   bool dedup, bool drop_self_loops,
                                   EdgeVisitor&& for_each_edge) {
    std::vector<long long> deg(node_count, 0);
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for_each_edge([&](std::uint32_t s, std::uint32_t t) {
        if (drop_self_loops && s == t) return;
        if (dedup && !seen.insert({s, t}).second) return;
        if (mode == DegreeMode::In || mode == DegreeMode::Total) ++deg[t];
        if (mode == DegreeMode::Out || mode == DegreeMode::Total) ++deg[s];
    });
    return histogram_from_counts(deg);
}

} // namespace

EdgeList parse_edge_list(std::istream& in) {
    EdgeList e;
    LineParser lp;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::uint32_t s, t;
        if (lp.parse(line, lineno, s, t)) e.edges.emplace_back(s, t);
    }
    e.node_names = std::move(lp.names);
    return e;
}

DegreeMode degree_mode_from_string(const std::string& s) {
    if (s == "in") return DegreeMode::In;
    if (s == "out") return DegreeMode::Out;
    if (s == "total") return DegreeMode::Total;
    throw std::invalid_argument("unknown degree mode: " + s);
}

DegreeHistogram degree_histogram(const EdgeList& e, DegreeMode mode,
                                 bool dedup, bool drop_self_loops) {
    if (e.edges.empty())
        throw std::invalid_argument("degree_histogram: empty graph");
    return degrees_from_edges(e.node_count(), mode, dedup, drop_self_loops,
                              [&](auto&& f) {
                                  for (auto [s, t] : e.edges) f(s, t);
                              });
}

DegreeHistogram degree_histogram_stream(std::istream& in, DegreeMode mode,
                                        bool dedup, bool drop_self_loops) {
    LineParser lp;
    std::vector<long long> deg;
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    std::string line;
    std::size_t lineno = 0, edges = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::uint32_t s, t;
        if (!lp.parse(line, lineno, s, t)) continue;
        ++edges;
        if (deg.size() < lp.names.size()) deg.resize(lp.names.size(), 0);
        if (drop_self_loops && s == t) continue;
        if (dedup && !seen.insert({s, t}).second) continue;
        if (mode == DegreeMode::In || mode == DegreeMode::Total) ++deg[t];
        if (mode == DegreeMode::Out || mode == DegreeMode::Total) ++deg[s];
    }
    if (edges == 0)
        throw std::invalid_argument("degree_histogram: empty graph");
    return histogram_from_counts(deg);
}

DegreeHistogram read_histogram_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line))
        throw ParseError(1, "histogram: empty file");
    ++lineno;
    // tolerate a trailing \r
    std::string header = line;
    while (!header.empty() && (header.back() == '\r' || header.back() == ' '))
        header.pop_back();
    if (header != "degree,count")
        throw ParseError(1, "histogram: expected header \"degree,count\"");
    DegreeHistogram h;
    long long prev = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::istringstream ss(line);
        long long d, c;
        char comma;
        if (!(ss >> d >> comma >> c) || comma != ',') {
            std::ostringstream msg;
            msg << "histogram: malformed row at line " << lineno;
            throw ParseError(lineno, msg.str());
        }
        if (d <= 0 || c <= 0) {
            std::ostringstream msg;
            msg << "histogram: non-positive degree or count at line " << lineno;
            throw ParseError(lineno, msg.str());
        }
        if (d <= prev) {
            std::ostringstream msg;
            msg << "histogram: degrees must be strictly increasing (line "
                << lineno << ")";
            throw ParseError(lineno, msg.str());
        }
        prev = d;
        h.rows.push_back({d, c});
        h.n += c;
    }
    if (h.rows.empty()) throw ParseError(lineno, "histogram: no data rows");
    return h;
}

void write_histogram_csv(const DegreeHistogram& h, std::ostream& out) {
    out << "degree,count\n";
    for (const auto& r : h.rows) out << r.degree << ',' << r.count << '\n';
}

DegreeHistogram load_histogram(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open histogram file: " + path);
    return read_histogram_csv(in);
}

void save_histogram(const DegreeHistogram& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write histogram file: " + path);
    write_histogram_csv(h, out);
}

std::vector<double> expand_sample(const DegreeHistogram& h) {
    std::vector<double> xs;
    xs.reserve(std::size_t(h.n));
    for (const auto& r : h.rows)
        xs.insert(xs.end(), std::size_t(r.count), double(r.degree));
    return xs;
}

} // namespace mlmfit
