#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "helpers.hpp"
#include "scbench/ingest.hpp"

using namespace scbench;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "scbench_ingest_tests";
    fs::create_directories(dir);
    return dir / name;
}

}

TEST_CASE("parse a small coordinate file") {
    std::istringstream in(
        "%%MatrixMarket matrix coordinate integer general\n"
        "% comment\n"
        "3 2 3\n"
        "1 1 5\n"
        "2 2 1\n"
        "3 1 2\n");
    auto m = parse_matrix_market(in);
    CHECK(m.n_cells() == 3);
    CHECK(m.n_genes() == 2);
    CHECK(m.at(0, 0) == 5);
    CHECK(m.at(1, 1) == 1);
    CHECK(m.at(2, 0) == 2);
}

TEST_CASE("genes-by-cells orientation transposes") {
    std::istringstream in("%%MatrixMarket matrix coordinate integer general\n2 3 1\n2 3 9\n");
    auto m = parse_matrix_market(in, Orientation::genes_by_cells);
    CHECK(m.n_cells() == 3);
    CHECK(m.n_genes() == 2);
    CHECK(m.at(2, 1) == 9);
}

TEST_CASE("malformed inputs are data errors") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_matrix_market(in);
    };
    const std::string head = "%%MatrixMarket matrix coordinate integer general\n";
    CHECK_THROWS_AS(parse(head + "2 2 2\n1 1 1\n"), DataError);
    CHECK_THROWS_AS(parse(head + "2 2 1\n3 1 1\n"), DataError);
    CHECK_THROWS_AS(parse(head + "2 2 1\n1 1 -1\n"), DataError);
    CHECK_THROWS_AS(parse(head + "2 2 1\n1 1 1.5\n"), DataError);
    CHECK_THROWS_AS(parse(head + "2 2 1\n1 1 4294967296\n"), DataError);
    CHECK_THROWS_AS(parse(head + "2 2 2\n1 1 1\n1 1 2\n"), DataError);
    CHECK_THROWS_AS(parse("%%MatrixMarket matrix array integer general\n1 1\n1\n"), DataError);
    CHECK_THROWS_AS(parse(""), DataError);
    CHECK_NOTHROW(parse("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 3.0\n"));
    CHECK_THROWS_AS(parse("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 3.5\n"), DataError);
}

TEST_CASE("write then read round trip including gzip") {
    std::mt19937_64 gen(5);
    auto m = testing::to_matrix(oracle::random_counts(gen, 20, 15, 0.7), 15);
    for (auto orientation : { Orientation::cells_by_genes, Orientation::genes_by_cells }) {
        std::ostringstream out;
        write_matrix_market(m, out, orientation);
        std::istringstream in(out.str());
        CHECK(parse_matrix_market(in, orientation) == m);

        auto path = scratch("m.mtx.gz");
        gzFile gz = gzopen(path.string().c_str(), "wb");
        gzwrite(gz, out.str().data(), static_cast<unsigned>(out.str().size()));
        gzclose(gz);
        CHECK(read_matrix_market(path, orientation) == m);
    }
}

TEST_CASE("csv helpers") {
    CHECK(split_csv_line("a,\"b,c\",\"d\"\"e\",") == std::vector<std::string>{ "a", "b,c", "d\"e", "" });
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(split_csv_line(csv_escape("x\"y")) == std::vector<std::string>{ "x\"y" });
}

TEST_CASE("cell annotations") {
    std::istringstream ok("replicate,cell_id,method,cell_type\n1,c1,plate,T\n2,c2,droplet,\n");
    auto cells = parse_cell_annotations(ok);
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].cell_id == "c1");
    CHECK(cells[0].method == "plate");
    CHECK(cells[0].cell_type == std::optional<std::string>("T"));
    CHECK_FALSE(cells[1].cell_type.has_value());

    std::istringstream missing("cell_id,method\nc1,plate\n");
    CHECK_THROWS_AS(parse_cell_annotations(missing), DataError);
    std::istringstream dup("cell_id,method,replicate\nc1,p,1\nc1,p,1\n");
    CHECK_THROWS_AS(parse_cell_annotations(dup), DataError);

    auto path = scratch("cells.csv");
    write_cell_annotations(cells, path);
    CHECK(read_cell_annotations(path) == cells);
}

TEST_CASE("annotate joins by position or by id") {
    auto m = from_triplets({ { 0, 0, 1 }, { 1, 1, 2 } }, 2, 2);
    std::vector<CellAnnotation> cells = { { "b", "plate", "1", std::nullopt }, { "a", "drop", "1", std::nullopt } };
    auto positional = annotate(m, cells, {});
    CHECK(positional.matrix.cell_ids() == std::vector<std::string>{ "b", "a" });

    auto by_id = annotate(m, cells, {}, std::vector<std::string>{ "a", "b" });
    CHECK(by_id.matrix.cell_ids() == std::vector<std::string>{ "a", "b" });
    CHECK(by_id.cells[0].method == "drop");

    CHECK_THROWS_AS(annotate(m, { cells[0] }, {}), DataError);
    CHECK_THROWS_AS(annotate(m, cells, {}, std::vector<std::string>{ "a", "zz" }), DataError);
}

TEST_CASE("split by method and replicate") {
    auto m = from_triplets({ { 0, 0, 1 }, { 1, 1, 2 }, { 2, 0, 3 } }, 3, 2, { "x", "y", "z" }, {});
    std::vector<CellAnnotation> cells = {
        { "x", "plate", "1", std::nullopt },
        { "y", "drop", "1", std::nullopt },
        { "z", "plate", "1", std::nullopt },
    };
    auto splits = split_by_method_replicate(m, cells);
    REQUIRE(splits.size() == 2);
    const auto& plate = splits.at({ "plate", "1" });
    CHECK(plate.matrix.cell_ids() == std::vector<std::string>{ "x", "z" });
    CHECK(plate.matrix.n_genes() == 2);
    CHECK(plate.matrix.at(1, 0) == 3);

    auto summary = summarize_dimensions("s", splits);
    REQUIRE(summary.rows.size() == 2);
    CHECK(summary.rows[0].method == "drop");
    CHECK(summary.rows[1].n_cells == 2);
}
