#include <doctest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "prunetrace/io.hpp"

using namespace prunetrace;
namespace fs = std::filesystem;

namespace {

struct TmpDir {
    fs::path path;
    explicit TmpDir(const std::string& name) : path(fs::path("test_tmp") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TmpDir() { fs::remove_all(path); }
    std::string file(const std::string& n) const { return (path / n).string(); }
};

} // namespace

TEST_CASE("indicator PGM round trip") {
    TmpDir tmp("pgm_roundtrip");
    Grid g(7, 5, 0.25, 1.0, -2.0);
    std::mt19937 rng(3);
    IndicatorField a = oracles::random_field(g, rng, 0.5);
    write_pgm(tmp.file("a.pgm"), a);
    IndicatorField back = read_pgm(tmp.file("a.pgm"), 0.25, 1.0, -2.0);
    CHECK(back == a);
}

TEST_CASE("PGM layout: top row first, 255 = material") {
    TmpDir tmp("pgm_layout");
    Grid g(1, 2, 1.0);
    IndicatorField a(g);
    a.set(0, 1, true); // top cell material, bottom void
    write_pgm(tmp.file("a.pgm"), a);
    std::string bytes = read_file(tmp.file("a.pgm"));
    REQUIRE(bytes.size() >= 2);
    CHECK(static_cast<unsigned char>(bytes[bytes.size() - 2]) == 255);
    CHECK(static_cast<unsigned char>(bytes[bytes.size() - 1]) == 0);
}

TEST_CASE("scalar PGM normalization") {
    TmpDir tmp("pgm_scalar");
    Grid g(2, 1, 1.0);
    ScalarField f(g);
    f.set(0, 0, -1.0);
    f.set(1, 0, 3.0);
    write_pgm(tmp.file("f.pgm"), f);
    std::string bytes = read_file(tmp.file("f.pgm"));
    REQUIRE(bytes.size() >= 2);
    CHECK(static_cast<unsigned char>(bytes[bytes.size() - 2]) == 0);
    CHECK(static_cast<unsigned char>(bytes[bytes.size() - 1]) == 255);

    ScalarField constant(g, 4.2);
    write_pgm(tmp.file("c.pgm"), constant);
    bytes = read_file(tmp.file("c.pgm"));
    CHECK(static_cast<unsigned char>(bytes[bytes.size() - 1]) == 0);
    CHECK(static_cast<unsigned char>(bytes[bytes.size() - 2]) == 0);
}

TEST_CASE("PGM reader accepts comments and thresholds at 128") {
    TmpDir tmp("pgm_comments");
    std::string raw = "P5\n# a comment line\n2 1\n255\n";
    raw.push_back(static_cast<char>(200));
    raw.push_back(static_cast<char>(100));
    write_file(tmp.file("c.pgm"), raw);
    IndicatorField f = read_pgm(tmp.file("c.pgm"), 1.0);
    CHECK(f.grid.nx == 2);
    CHECK(f.grid.ny == 1);
    CHECK(f.at(0, 0) == 1);
    CHECK(f.at(1, 0) == 0);

    write_file(tmp.file("bad.pgm"), "P2\n2 1\n255\n1 2\n");
    CHECK_THROWS_AS(read_pgm(tmp.file("bad.pgm"), 1.0), Error);
}

TEST_CASE("CSV writer emits rows top first") {
    TmpDir tmp("csv");
    Grid g(2, 2, 1.0);
    ScalarField f(g);
    f.set(0, 0, 1.0);
    f.set(1, 0, 2.0);
    f.set(0, 1, 3.5);
    f.set(1, 1, 4.0);
    write_csv(tmp.file("f.csv"), f);
    CHECK(read_file(tmp.file("f.csv")) == "3.5,4\n1,2\n");
}

TEST_CASE("format_double is the stable %.10g") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-9) == "-2.5e-09");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333");
}

TEST_CASE("fnv1a matches published vectors") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ull);
}
