#ifndef MLMFIT_GRAPH_IO_HPP
#define MLMFIT_GRAPH_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mlmfit {

struct ParseError : std::runtime_error {
    std::size_t line;
    ParseError(std::size_t line_, const std::string& what_)
        : std::runtime_error(what_), line(line_) {}
};

// Sparse (degree, count) table; degrees strictly increasing, all >= 1.
struct DegreeHistogram {
    struct Row {
        long long degree;
        long long count;
    };
    std::vector<Row> rows;
    long long n = 0;                     // sum of counts
    long long excluded_zero_degree = 0;  // isolated nodes dropped

    long long max_degree() const { return rows.empty() ? 0 : rows.back().degree; }
};

// Edge list with opaque node ids mapped to dense indices.
struct EdgeList {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::vector<std::string> node_names;  // index -> original token
    std::size_t node_count() const { return node_names.size(); }
};

// Lines: two whitespace-separated tokens, '#'/'%' comments, blanks skipped.
// Extra tokens on a line are ignored. Throws ParseError with the line number.
EdgeList parse_edge_list(std::istream& in);

enum class DegreeMode { In, Out, Total };

DegreeMode degree_mode_from_string(const std::string& s);

DegreeHistogram degree_histogram(const EdgeList& e, DegreeMode mode,
                                 bool dedup = false,
                                 bool drop_self_loops = false);

// Single-pass degree extraction; memory proportional to the node count
// (edge count when dedup is requested, which needs the edge set).
DegreeHistogram degree_histogram_stream(std::istream& in, DegreeMode mode,
                                        bool dedup = false,
                                        bool drop_self_loops = false);

// CSV "degree,count". Round-trip exact.
DegreeHistogram load_histogram(const std::string& path);
void save_histogram(const DegreeHistogram& h, const std::string& path);
DegreeHistogram read_histogram_csv(std::istream& in);
void write_histogram_csv(const DegreeHistogram& h, std::ostream& out);

// Node-level expansion: each degree repeated count times (n elements).
std::vector<double> expand_sample(const DegreeHistogram& h);

} // namespace mlmfit

#endif
