#ifndef SCBENCH_INGEST_HPP
#define SCBENCH_INGEST_HPP

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "matrix.hpp"

/**
 * @file ingest.hpp
 * @brief Reading count matrices and annotations, and splitting an aggregate matrix per protocol and replicate.
 *
 * Matrix Market files are read from plain text or gzip (detected from the magic bytes).
 * Annotation tables are comma-separated with a header line; required columns are looked up by name
 * and any extra columns are ignored.
 */

namespace scbench {

/** Layout of the rows and columns of a matrix file. In memory, rows are always cells. */
enum class Orientation {
    cells_by_genes,
    genes_by_cells
};

CountMatrix parse_matrix_market(std::istream& input, Orientation orientation = Orientation::cells_by_genes);

CountMatrix read_matrix_market(const std::filesystem::path& path, Orientation orientation = Orientation::cells_by_genes);

/** Writes `%%MatrixMarket matrix coordinate integer general` with entries in canonical order. */
void write_matrix_market(const CountMatrix& m, std::ostream& output, Orientation orientation = Orientation::cells_by_genes);

void write_matrix_market(const CountMatrix& m, const std::filesystem::path& path, Orientation orientation = Orientation::cells_by_genes);

struct CellAnnotation {
    std::string cell_id;
    std::string method;
    std::string replicate;
    std::optional<std::string> cell_type;

    friend bool operator==(const CellAnnotation&, const CellAnnotation&) = default;
};

struct GeneAnnotation {
    std::string gene_id;
    std::optional<std::string> gene_name;

    friend bool operator==(const GeneAnnotation&, const GeneAnnotation&) = default;
};

/**
 * Split one CSV line into fields. Double-quoted fields may contain commas and `""` escapes.
 */
std::vector<std::string> split_csv_line(const std::string& line);

/** Quote a field if it contains a comma, quote or newline. */
std::string csv_escape(const std::string& field);

std::vector<CellAnnotation> parse_cell_annotations(std::istream& input);
std::vector<CellAnnotation> read_cell_annotations(const std::filesystem::path& path);
void write_cell_annotations(const std::vector<CellAnnotation>& cells, const std::filesystem::path& path);

std::vector<GeneAnnotation> parse_gene_annotations(std::istream& input);
std::vector<GeneAnnotation> read_gene_annotations(const std::filesystem::path& path);
void write_gene_annotations(const std::vector<GeneAnnotation>& genes, const std::filesystem::path& path);

/** Read a plain list of identifiers, one per line (e.g. a barcodes file). */
std::vector<std::string> read_id_list(const std::filesystem::path& path);

/**
 * Result of attaching annotations to a matrix: the matrix carries the annotation ids
 * and `cells[i]` describes row `i`.
 */
struct AnnotatedMatrix {
    CountMatrix matrix;
    std::vector<CellAnnotation> cells;
    std::vector<GeneAnnotation> genes;
};

/**
 * Attach annotations to the rows and columns of `m`.
 *
 * By default the join is positional: `cells[i]` describes row `i` and both lengths must agree.
 * When `row_ids` is given the join is by identifier: row `i` is described by the annotation whose `cell_id`
 * equals `row_ids[i]`, and every row must find one.
 * An empty `genes` keeps the matrix's existing gene ids.
 */
AnnotatedMatrix annotate(
    const CountMatrix& m,
    std::vector<CellAnnotation> cells,
    std::vector<GeneAnnotation> genes,
    const std::optional<std::vector<std::string>>& row_ids = std::nullopt
);

struct SplitKey {
    std::string method;
    std::string replicate;

    auto operator<=>(const SplitKey&) const = default;
};

/**
 * One entry per (method, replicate) pair; iteration is in ascending key order.
 */
struct Split {
    CountMatrix matrix;
    std::vector<CellAnnotation> cells;
};

using SplitMap = std::map<SplitKey, Split>;

/**
 * Partition the cells of `m` by the (method, replicate) of their annotation, keeping every gene.
 * `cells` must be positionally aligned with the rows of `m`.
 */
SplitMap split_by_method_replicate(const CountMatrix& m, const std::vector<CellAnnotation>& cells);

struct SplitSummaryRow {
    std::string sample;
    std::string method;
    std::string replicate;
    std::size_t n_cells;
    std::size_t n_genes;
    std::optional<std::size_t> n_genes_after_filter;
};

struct SplitSummary {
    std::vector<SplitSummaryRow> rows;
};

/**
 * One row per split in (method, replicate) order. Genes remaining after filtering are filled in for keys present in `post_filter_genes`.
 */
SplitSummary summarize_dimensions(
    const std::string& sample,
    const SplitMap& splits,
    const std::optional<std::map<SplitKey, std::size_t>>& post_filter_genes = std::nullopt
);

}

#endif
