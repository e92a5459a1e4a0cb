#include "geoprint/mesh_io.hpp"

#include "geoprint/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace geoprint {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Non-empty lines with '#' comments stripped, split into tokens.
std::vector<std::vector<std::string>> token_lines(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        if (!toks.empty()) out.push_back(std::move(toks));
    }
    return out;
}

double to_double(const std::string& s, const fs::path& file) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ParseError(file.string() + ": expected a number, got '" + s + "'");
    return v;
}

long to_long(const std::string& s, const fs::path& file) {
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') throw ParseError(file.string() + ": expected an integer, got '" + s + "'");
    return v;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

TetMesh load_tetgen(const fs::path& path) {
    fs::path stem = path;
    if (path.extension() == ".node" || path.extension() == ".ele") stem.replace_extension();
    fs::path node = fs::path(stem).concat(".node"), ele = fs::path(stem).concat(".ele");
    if (!fs::exists(node)) throw IoError("missing file " + node.string());
    if (!fs::exists(ele)) throw IoError("missing file " + ele.string());

    auto nl = token_lines(read_file(node));
    if (nl.empty() || nl[0].size() < 2) throw ParseError(node.string() + ": missing header");
    long n = to_long(nl[0][0], node);
    if (to_long(nl[0][1], node) != 3) throw ParseError(node.string() + ": dimension must be 3");
    if (n <= 0 || static_cast<long>(nl.size()) < n + 1) throw ParseError(node.string() + ": truncated vertex list");
    long base = 0;
    std::vector<Vec3> verts(n);
    for (long i = 0; i < n; ++i) {
        const auto& l = nl[i + 1];
        if (l.size() < 4) throw ParseError(node.string() + ": vertex line " + std::to_string(i) + " is short");
        long idx = to_long(l[0], node);
        if (i == 0) base = idx;
        if (idx != base + i) throw ParseError(node.string() + ": vertex indices are not consecutive at " + l[0]);
        verts[i] = {to_double(l[1], node), to_double(l[2], node), to_double(l[3], node)};
    }
    if (base != 0 && base != 1) throw ParseError(node.string() + ": first index must be 0 or 1");

    auto el = token_lines(read_file(ele));
    if (el.empty() || el[0].size() < 2) throw ParseError(ele.string() + ": missing header");
    long m = to_long(el[0][0], ele);
    long per = to_long(el[0][1], ele);
    if (per != 4 && per != 10) throw ParseError(ele.string() + ": nodes per tet must be 4 or 10");
    if (m <= 0 || static_cast<long>(el.size()) < m + 1) throw ParseError(ele.string() + ": truncated tet list");
    std::vector<std::array<int, 4>> tets(m);
    for (long i = 0; i < m; ++i) {
        const auto& l = el[i + 1];
        if (static_cast<long>(l.size()) < 1 + per) throw ParseError(ele.string() + ": tet line " + std::to_string(i) + " is short");
        for (int k = 0; k < 4; ++k) tets[i][k] = static_cast<int>(to_long(l[1 + k], ele) - base);
    }
    return TetMesh::build(std::move(verts), std::move(tets));
}

TetMesh load_medit(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("missing file " + path.string());
    std::vector<std::string> tok;
    for (auto& l : token_lines(read_file(path)))
        for (auto& t : l) tok.push_back(std::move(t));
    std::vector<Vec3> verts;
    std::vector<std::array<int, 4>> tets;
    bool have_v = false, have_t = false;
    size_t i = 0;
    auto need = [&](size_t k) {
        if (i + k > tok.size()) throw ParseError(path.string() + ": unexpected end of file");
    };
    while (i < tok.size()) {
        std::string key = lower(tok[i++]);
        if (key == "dimension") {
            need(1);
            if (to_long(tok[i++], path) != 3) throw ParseError(path.string() + ": dimension must be 3");
        } else if (key == "vertices") {
            need(1);
            long n = to_long(tok[i++], path);
            need(4 * static_cast<size_t>(n));
            verts.resize(n);
            for (long v = 0; v < n; ++v, i += 4)
                verts[v] = {to_double(tok[i], path), to_double(tok[i + 1], path), to_double(tok[i + 2], path)};
            have_v = true;
        } else if (key == "tetrahedra") {
            need(1);
            long n = to_long(tok[i++], path);
            need(5 * static_cast<size_t>(n));
            tets.resize(n);
            for (long t = 0; t < n; ++t, i += 5)
                for (int k = 0; k < 4; ++k) tets[t][k] = static_cast<int>(to_long(tok[i + k], path) - 1);
            have_t = true;
        } else if (key == "end") {
            break;
        }
        // other sections: their numeric payload is skipped token by token
    }
    if (!have_v) throw ParseError(path.string() + ": no Vertices section");
    if (!have_t) throw ParseError(path.string() + ": no Tetrahedra section");
    return TetMesh::build(std::move(verts), std::move(tets));
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

MeshFormat parse_mesh_format(const std::string& name) {
    std::string n = lower(name);
    if (n == "tetgen" || n == "tetgen-node-ele" || n == "node" || n == "ele") return MeshFormat::TetGen;
    if (n == "medit" || n == "medit-mesh" || n == "mesh") return MeshFormat::Medit;
    throw ParseError("unknown mesh format '" + name + "'");
}

MeshFormat guess_mesh_format(const fs::path& path) {
    return path.extension() == ".mesh" ? MeshFormat::Medit : MeshFormat::TetGen;
}

TetMesh load_mesh(const fs::path& path, MeshFormat format) {
    return format == MeshFormat::TetGen ? load_tetgen(path) : load_medit(path);
}

TetMesh load_mesh(const fs::path& path) { return load_mesh(path, guess_mesh_format(path)); }

void save_mesh(const TetMesh& mesh, const fs::path& path, MeshFormat format) {
    std::string s;
    if (format == MeshFormat::Medit) {
        s += "MeshVersionFormatted 2\nDimension 3\nVertices\n" + std::to_string(mesh.num_vertices()) + "\n";
        for (const auto& p : mesh.vertices()) s += fmt(p.x()) + " " + fmt(p.y()) + " " + fmt(p.z()) + " 0\n";
        s += "Tetrahedra\n" + std::to_string(mesh.num_tets()) + "\n";
        for (const auto& t : mesh.tets())
            s += std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " + std::to_string(t[2] + 1) + " " +
                 std::to_string(t[3] + 1) + " 0\n";
        s += "End\n";
        write_text(path, s);
        return;
    }
    fs::path stem = path;
    if (path.extension() == ".node" || path.extension() == ".ele") stem.replace_extension();
    s = std::to_string(mesh.num_vertices()) + " 3 0 0\n";
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const auto& p = mesh.vertex(v);
        s += std::to_string(v) + " " + fmt(p.x()) + " " + fmt(p.y()) + " " + fmt(p.z()) + "\n";
    }
    write_text(fs::path(stem).concat(".node"), s);
    s = std::to_string(mesh.num_tets()) + " 4 0\n";
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const auto& T = mesh.tet(t);
        s += std::to_string(t) + " " + std::to_string(T[0]) + " " + std::to_string(T[1]) + " " + std::to_string(T[2]) +
             " " + std::to_string(T[3]) + "\n";
    }
    write_text(fs::path(stem).concat(".ele"), s);
}

}  // namespace geoprint
