#include "prunetrace/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace prunetrace {

static void write_pgm_bytes(const std::string& path, int nx, int ny,
                            const std::vector<std::uint8_t>& topfirst) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path);
    os << "P5\n" << nx << " " << ny << "\n255\n";
    os.write(reinterpret_cast<const char*>(topfirst.data()),
             static_cast<std::streamsize>(topfirst.size()));
    if (!os) throw Error("write failed: " + path);
}

void write_pgm(const std::string& path, const IndicatorField& f) {
    const Grid& g = f.grid;
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(g.cells()));
    std::size_t p = 0;
    for (int j = g.ny - 1; j >= 0; --j)
        for (int i = 0; i < g.nx; ++i) buf[p++] = f.at(i, j) ? 255 : 0;
    write_pgm_bytes(path, g.nx, g.ny, buf);
}

void write_pgm(const std::string& path, const ScalarField& f) {
    const Grid& g = f.grid;
    double lo = f.cells.empty() ? 0.0 : *std::min_element(f.cells.begin(), f.cells.end());
    double hi = f.cells.empty() ? 0.0 : *std::max_element(f.cells.begin(), f.cells.end());
    double span = hi - lo;
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(g.cells()));
    std::size_t p = 0;
    for (int j = g.ny - 1; j >= 0; --j)
        for (int i = 0; i < g.nx; ++i) {
            double v = span > 0.0 ? (f.at(i, j) - lo) / span : 0.0;
            buf[p++] = static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
    write_pgm_bytes(path, g.nx, g.ny, buf);
}

static int next_pgm_token(std::istream& is) {
    // skips whitespace and '#' comments
    while (is) {
        int c = is.peek();
        if (c == '#') {
            std::string line;
            std::getline(is, line);
        } else if (std::isspace(c)) {
            is.get();
        } else {
            break;
        }
    }
    int v = -1;
    is >> v;
    return v;
}

IndicatorField read_pgm(const std::string& path, double h, double ox, double oy) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open: " + path);
    std::string magic;
    is >> magic;
    if (magic != "P5") throw Error("not a binary PGM (P5): " + path);
    int w = next_pgm_token(is);
    int ht = next_pgm_token(is);
    int maxval = next_pgm_token(is);
    if (w < 1 || ht < 1 || maxval < 1 || maxval > 255)
        throw Error("unsupported PGM header: " + path);
    is.get(); // single whitespace after maxval
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(w) * ht);
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!is) throw Error("truncated PGM: " + path);
    IndicatorField f(Grid(w, ht, h, ox, oy));
    std::size_t p = 0;
    for (int j = ht - 1; j >= 0; --j)
        for (int i = 0; i < w; ++i) f.set(i, j, buf[p++] >= 128);
    return f;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_csv(const std::string& path, const ScalarField& f) {
    const Grid& g = f.grid;
    std::ostringstream os;
    for (int j = g.ny - 1; j >= 0; --j) {
        for (int i = 0; i < g.nx; ++i) {
            if (i) os << ',';
            os << format_double(f.at(i, j));
        }
        os << '\n';
    }
    write_file(path, os.str());
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path);
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw Error("write failed: " + path);
}

} // namespace prunetrace
