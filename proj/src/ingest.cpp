#include "scbench/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <zlib.h>

namespace scbench {

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) {
        throw DataError("cannot open " + path.string());
    }
    unsigned char magic[2] = { 0, 0 };
    probe.read(reinterpret_cast<char*>(magic), 2);
    bool gzipped = probe.gcount() == 2 && magic[0] == 0x1f && magic[1] == 0x8b;
    probe.close();

    if (!gzipped) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    }

    gzFile gz = gzopen(path.string().c_str(), "rb");
    if (gz == nullptr) {
        throw DataError("cannot open " + path.string());
    }
    std::string out;
    char chunk[1 << 16];
    int got;
    while ((got = gzread(gz, chunk, sizeof(chunk))) > 0) {
        out.append(chunk, static_cast<std::size_t>(got));
    }
    int status = 0;
    const char* message = gzerror(gz, &status);
    gzclose(gz);
    if (got < 0 || (status != Z_OK && status != Z_STREAM_END)) {
        throw DataError("gzip error in " + path.string() + ": " + message);
    }
    return out;
}

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string t;
    while (ss >> t) {
        out.push_back(t);
    }
    return out;
}

std::uint64_t parse_index(const std::string& token, std::size_t line_no) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw DataError("line " + std::to_string(line_no) + ": malformed index '" + token + "'");
    }
    return value;
}

std::uint64_t parse_count(const std::string& token, bool real_field, std::size_t line_no) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec == std::errc() && ptr == token.data() + token.size()) {
        return value;
    }
    if (ec == std::errc::result_out_of_range) {
        throw DataError("line " + std::to_string(line_no) + ": count overflows");
    }

    double real = 0;
    auto [rptr, rec] = std::from_chars(token.data(), token.data() + token.size(), real);
    if (rec != std::errc() || rptr != token.data() + token.size() || !std::isfinite(real)) {
        throw DataError("line " + std::to_string(line_no) + ": malformed value '" + token + "'");
    }
    if (real < 0) {
        throw DataError("line " + std::to_string(line_no) + ": negative count " + token);
    }
    if (real != std::floor(real)) {
        throw DataError("line " + std::to_string(line_no) + ": non-integral count " + token);
    }
    if (!real_field) {
        throw DataError("line " + std::to_string(line_no) + ": real value '" + token + "' in an integer matrix");
    }
    if (real > static_cast<double>(std::numeric_limits<Count>::max())) {
        throw DataError("line " + std::to_string(line_no) + ": count overflows");
    }
    return static_cast<std::uint64_t>(real);
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(const std::string& name) const {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - header.begin());
    }
};

CsvTable parse_csv(std::istream& input) {
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(input, line)) {
        strip_cr(line);
        if (first) {
            if (line.rfind("\xEF\xBB\xBF", 0) == 0) {
                line.erase(0, 3);
            }
            table.header = split_csv_line(line);
            for (auto& h : table.header) {
                h.erase(0, h.find_first_not_of(' '));
                h.erase(h.find_last_not_of(' ') + 1);
            }
            first = false;
            continue;
        }
        if (line.empty()) {
            continue;
        }
        table.rows.push_back(split_csv_line(line));
    }
    if (first) {
        throw DataError("CSV input has no header line");
    }
    return table;
}

std::size_t require_column(const CsvTable& table, const std::string& name) {
    auto col = table.column(name);
    if (!col) {
        throw DataError("missing required column '" + name + "'");
    }
    return *col;
}

const std::string& field(const std::vector<std::string>& row, std::size_t col, std::size_t row_no) {
    if (col >= row.size()) {
        throw DataError("row " + std::to_string(row_no) + " has too few fields");
    }
    return row[col];
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

}

CountMatrix parse_matrix_market(std::istream& input, Orientation orientation) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(input, line)) {
        throw DataError("empty Matrix Market input");
    }
    ++line_no;
    strip_cr(line);
    auto head = tokens(line);
    if (head.size() != 5 || head[0] != "%%MatrixMarket" || lowercase(head[1]) != "matrix" || lowercase(head[2]) != "coordinate") {
        throw DataError("malformed Matrix Market header: '" + line + "'");
    }
    std::string field_type = lowercase(head[3]);
    if (field_type != "integer" && field_type != "real") {
        throw DataError("unsupported Matrix Market field '" + head[3] + "'");
    }
    if (lowercase(head[4]) != "general") {
        throw DataError("unsupported Matrix Market symmetry '" + head[4] + "'");
    }
    bool real_field = field_type == "real";

    std::vector<std::string> size_line;
    while (std::getline(input, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty() || line[0] == '%') {
            continue;
        }
        size_line = tokens(line);
        break;
    }
    if (size_line.size() != 3) {
        throw DataError("malformed Matrix Market size line");
    }
    std::uint64_t n_rows = parse_index(size_line[0], line_no);
    std::uint64_t n_cols = parse_index(size_line[1], line_no);
    std::uint64_t declared = parse_index(size_line[2], line_no);

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(declared, 1u << 26)));
    std::uint64_t seen = 0;
    while (std::getline(input, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty() || line[0] == '%') {
            continue;
        }
        auto parts = tokens(line);
        if (parts.empty()) {
            continue;
        }
        if (parts.size() != 3) {
            throw DataError("line " + std::to_string(line_no) + ": expected 'row col value'");
        }
        std::uint64_t r = parse_index(parts[0], line_no);
        std::uint64_t c = parse_index(parts[1], line_no);
        if (r == 0 || c == 0 || r > n_rows || c > n_cols) {
            throw DataError("line " + std::to_string(line_no) + ": coordinate out of range");
        }
        std::uint64_t value = parse_count(parts[2], real_field, line_no);
        ++seen;
        if (orientation == Orientation::cells_by_genes) {
            triplets.push_back({ static_cast<Index>(r - 1), static_cast<Index>(c - 1), value });
        } else {
            triplets.push_back({ static_cast<Index>(c - 1), static_cast<Index>(r - 1), value });
        }
    }
    if (seen != declared) {
        throw DataError("Matrix Market size line declares " + std::to_string(declared) + " entries but " + std::to_string(seen) + " were found");
    }

    std::size_t n_cells = orientation == Orientation::cells_by_genes ? n_rows : n_cols;
    std::size_t n_genes = orientation == Orientation::cells_by_genes ? n_cols : n_rows;
    return from_triplets(std::move(triplets), n_cells, n_genes);
}

CountMatrix read_matrix_market(const std::filesystem::path& path, Orientation orientation) {
    std::istringstream in(slurp(path));
    return parse_matrix_market(in, orientation);
}

void write_matrix_market(const CountMatrix& m, std::ostream& output, Orientation orientation) {
    bool by_cells = orientation == Orientation::cells_by_genes;
    output << "%%MatrixMarket matrix coordinate integer general\n";
    output << (by_cells ? m.n_cells() : m.n_genes()) << ' ' << (by_cells ? m.n_genes() : m.n_cells()) << ' ' << m.nnz() << '\n';
    for (std::size_t g = 0; g < m.n_genes(); ++g) {
        auto cells = m.cells_of(g);
        auto counts = m.counts_of(g);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (by_cells) {
                output << cells[i] + 1 << ' ' << g + 1 << ' ' << counts[i] << '\n';
            } else {
                output << g + 1 << ' ' << cells[i] + 1 << ' ' << counts[i] << '\n';
            }
        }
    }
}

void write_matrix_market(const CountMatrix& m, const std::filesystem::path& path, Orientation orientation) {
    auto out = open_output(path);
    write_matrix_market(m, out, orientation);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(current));
            current.clear();
        } else {
            current += ch;
        }
    }
    if (quoted) {
        throw DataError("unterminated quote in CSV line");
    }
    out.push_back(std::move(current));
    return out;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    out += '"';
    return out;
}

std::vector<CellAnnotation> parse_cell_annotations(std::istream& input) {
    auto table = parse_csv(input);
    std::size_t id_col = require_column(table, "cell_id");
    std::size_t method_col = require_column(table, "method");
    std::size_t replicate_col = require_column(table, "replicate");
    auto type_col = table.column("cell_type");

    std::vector<CellAnnotation> out;
    out.reserve(table.rows.size());
    std::unordered_set<std::string> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        CellAnnotation ann;
        ann.cell_id = field(row, id_col, r + 2);
        ann.method = field(row, method_col, r + 2);
        ann.replicate = field(row, replicate_col, r + 2);
        if (ann.cell_id.empty() || ann.method.empty() || ann.replicate.empty()) {
            throw DataError("row " + std::to_string(r + 2) + ": cell_id, method and replicate must be non-empty");
        }
        if (type_col && *type_col < row.size() && !row[*type_col].empty()) {
            ann.cell_type = row[*type_col];
        }
        if (!seen.insert(ann.cell_id).second) {
            throw DataError("duplicate cell_id '" + ann.cell_id + "'");
        }
        out.push_back(std::move(ann));
    }
    return out;
}

std::vector<CellAnnotation> read_cell_annotations(const std::filesystem::path& path) {
    std::istringstream in(slurp(path));
    return parse_cell_annotations(in);
}

void write_cell_annotations(const std::vector<CellAnnotation>& cells, const std::filesystem::path& path) {
    bool any_type = std::any_of(cells.begin(), cells.end(), [](const CellAnnotation& c) { return c.cell_type.has_value(); });
    auto out = open_output(path);
    out << "cell_id,method,replicate" << (any_type ? ",cell_type" : "") << '\n';
    for (const auto& c : cells) {
        out << csv_escape(c.cell_id) << ',' << csv_escape(c.method) << ',' << csv_escape(c.replicate);
        if (any_type) {
            out << ',' << csv_escape(c.cell_type.value_or(""));
        }
        out << '\n';
    }
}

std::vector<GeneAnnotation> parse_gene_annotations(std::istream& input) {
    auto table = parse_csv(input);
    std::size_t id_col = require_column(table, "gene_id");
    auto name_col = table.column("gene_name");

    std::vector<GeneAnnotation> out;
    out.reserve(table.rows.size());
    std::unordered_set<std::string> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        GeneAnnotation ann;
        ann.gene_id = field(row, id_col, r + 2);
        if (ann.gene_id.empty()) {
            throw DataError("row " + std::to_string(r + 2) + ": empty gene_id");
        }
        if (name_col && *name_col < row.size() && !row[*name_col].empty()) {
            ann.gene_name = row[*name_col];
        }
        if (!seen.insert(ann.gene_id).second) {
            throw DataError("duplicate gene_id '" + ann.gene_id + "'");
        }
        out.push_back(std::move(ann));
    }
    return out;
}

std::vector<GeneAnnotation> read_gene_annotations(const std::filesystem::path& path) {
    std::istringstream in(slurp(path));
    return parse_gene_annotations(in);
}

void write_gene_annotations(const std::vector<GeneAnnotation>& genes, const std::filesystem::path& path) {
    bool any_name = std::any_of(genes.begin(), genes.end(), [](const GeneAnnotation& g) { return g.gene_name.has_value(); });
    auto out = open_output(path);
    out << "gene_id" << (any_name ? ",gene_name" : "") << '\n';
    for (const auto& g : genes) {
        out << csv_escape(g.gene_id);
        if (any_name) {
            out << ',' << csv_escape(g.gene_name.value_or(""));
        }
        out << '\n';
    }
}

std::vector<std::string> read_id_list(const std::filesystem::path& path) {
    std::istringstream in(slurp(path));
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        strip_cr(line);
        auto tab = line.find('\t');
        if (tab != std::string::npos) {
            line.resize(tab);
        }
        if (!line.empty()) {
            out.push_back(line);
        }
    }
    return out;
}

AnnotatedMatrix annotate(
    const CountMatrix& m,
    std::vector<CellAnnotation> cells,
    std::vector<GeneAnnotation> genes,
    const std::optional<std::vector<std::string>>& row_ids)
{
    if (row_ids) {
        if (row_ids->size() != m.n_cells()) {
            throw DataError("row id list has " + std::to_string(row_ids->size()) + " entries for " + std::to_string(m.n_cells()) + " matrix rows");
        }
        std::unordered_map<std::string, std::size_t> lookup;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            lookup.emplace(cells[i].cell_id, i);
        }
        std::vector<CellAnnotation> ordered;
        ordered.reserve(m.n_cells());
        for (const auto& id : *row_ids) {
            auto it = lookup.find(id);
            if (it == lookup.end()) {
                throw DataError("no annotation for matrix cell '" + id + "'");
            }
            ordered.push_back(cells[it->second]);
        }
        cells = std::move(ordered);
    } else if (cells.size() != m.n_cells()) {
        throw DataError("cell annotation has " + std::to_string(cells.size()) + " rows for " + std::to_string(m.n_cells()) + " matrix cells");
    }

    if (genes.empty()) {
        for (const auto& id : m.gene_ids()) {
            genes.push_back({ id, std::nullopt });
        }
    } else if (genes.size() != m.n_genes()) {
        throw DataError("gene annotation has " + std::to_string(genes.size()) + " rows for " + std::to_string(m.n_genes()) + " matrix genes");
    }

    std::vector<std::string> cell_ids, gene_ids;
    cell_ids.reserve(cells.size());
    for (const auto& c : cells) {
        cell_ids.push_back(c.cell_id);
    }
    gene_ids.reserve(genes.size());
    for (const auto& g : genes) {
        gene_ids.push_back(g.gene_id);
    }
    return { m.with_ids(std::move(cell_ids), std::move(gene_ids)), std::move(cells), std::move(genes) };
}

SplitMap split_by_method_replicate(const CountMatrix& m, const std::vector<CellAnnotation>& cells) {
    if (cells.size() != m.n_cells()) {
        throw DataError("cell annotation has " + std::to_string(cells.size()) + " rows for " + std::to_string(m.n_cells()) + " matrix cells");
    }
    std::map<SplitKey, std::vector<bool>> masks;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        auto& mask = masks[SplitKey{ cells[c].method, cells[c].replicate }];
        if (mask.empty()) {
            mask.assign(m.n_cells(), false);
        }
        mask[c] = true;
    }

    std::vector<bool> all_genes(m.n_genes(), true);
    SplitMap out;
    for (const auto& [key, mask] : masks) {
        Split split;
        split.matrix = submatrix(m, mask, all_genes);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (mask[c]) {
                split.cells.push_back(cells[c]);
            }
        }
        out.emplace(key, std::move(split));
    }
    return out;
}

SplitSummary summarize_dimensions(
    const std::string& sample,
    const SplitMap& splits,
    const std::optional<std::map<SplitKey, std::size_t>>& post_filter_genes)
{
    SplitSummary out;
    for (const auto& [key, split] : splits) {
        SplitSummaryRow row{ sample, key.method, key.replicate, split.matrix.n_cells(), split.matrix.n_genes(), std::nullopt };
        if (post_filter_genes) {
            auto it = post_filter_genes->find(key);
            if (it != post_filter_genes->end()) {
                row.n_genes_after_filter = it->second;
            }
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

}
