#include "relmech/csvio.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace relmech {

namespace {

// Shortest round-trip decimal form; stable across runs by construction.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f) throw Error("cannot open for writing: " + path);
    return f;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
    out << "t,body,x1,x2,x3,v1,v2,v3\n";
    for (const SystemState& s : tr.samples) {
        for (std::size_t b = 0; b < s.size(); ++b) {
            out << fmt(s.time) << ',' << b;
            for (int c = 0; c < 3; ++c) out << ',' << fmt(s.positions[b][c]);
            for (int c = 0; c < 3; ++c) out << ',' << fmt(s.velocities[b][c]);
            out << '\n';
        }
    }
}

void write_trajectory_csv(const std::string& path, const Trajectory& tr) {
    auto f = open_out(path);
    write_trajectory_csv(f, tr);
}

void write_trajectory_jsonl(std::ostream& out, const Trajectory& tr) {
    for (const SystemState& s : tr.samples) {
        for (std::size_t b = 0; b < s.size(); ++b) {
            out << "{\"t\":" << fmt(s.time) << ",\"body\":" << b << ",\"x\":[";
            for (int c = 0; c < 3; ++c) out << (c ? "," : "") << fmt(s.positions[b][c]);
            out << "],\"v\":[";
            for (int c = 0; c < 3; ++c) out << (c ? "," : "") << fmt(s.velocities[b][c]);
            out << "]}\n";
        }
    }
}

void write_trajectory_jsonl(const std::string& path, const Trajectory& tr) {
    auto f = open_out(path);
    write_trajectory_jsonl(f, tr);
}

void write_bucket_sweep_csv(std::ostream& out, const std::vector<BucketSweepRow>& rows) {
    out << "I0,Omega_b,Omega,G_eff\n";
    for (const BucketSweepRow& r : rows)
        out << fmt(r.I0) << ',' << fmt(r.Omega_b) << ',' << fmt(r.Omega) << ',' << fmt(r.G_eff)
            << '\n';
}

void write_bucket_sweep_csv(const std::string& path, const std::vector<BucketSweepRow>& rows) {
    auto f = open_out(path);
    write_bucket_sweep_csv(f, rows);
}

ExpectationRow expectation_row(const QuantumModel& m, const Wavefunction& psi,
                               HamiltonianMode mode) {
    ExpectationRow r;
    r.t = psi.time;
    r.x1 = m.expectation_position(psi.amplitudes, 0);
    r.x2 = m.expectation_position(psi.amplitudes, 1);
    r.p1 = m.expectation_applied(psi.amplitudes, m.momentum(psi.amplitudes, 0, 0));
    r.p2 = m.expectation_applied(psi.amplitudes, m.momentum(psi.amplitudes, 0, 1));
    r.P1 = m.expectation_applied(psi.amplitudes, m.canonical_momentum(psi.amplitudes, 0, 0));
    r.P2 = m.expectation_applied(psi.amplitudes, m.canonical_momentum(psi.amplitudes, 0, 1));
    r.norm = m.inner(psi.amplitudes, psi.amplitudes).real();
    r.energy = m.expectation_applied(psi.amplitudes, m.hamiltonian(psi.amplitudes, mode));
    return r;
}

void write_expectation_csv(std::ostream& out, const std::vector<ExpectationRow>& rows) {
    out << "t,<x1>,<x2>,<p1>,<p2>,<P1>,<P2>,norm,energy\n";
    for (const ExpectationRow& r : rows) {
        out << fmt(r.t) << ',' << fmt(r.x1) << ',' << fmt(r.x2) << ',' << fmt(r.p1) << ','
            << fmt(r.p2) << ',' << fmt(r.P1) << ',' << fmt(r.P2) << ',' << fmt(r.norm) << ','
            << fmt(r.energy) << '\n';
    }
}

void write_expectation_csv(const std::string& path, const std::vector<ExpectationRow>& rows) {
    auto f = open_out(path);
    write_expectation_csv(f, rows);
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

}  // namespace

void write_wavefunction(const std::string& path, const QuantumModel& m, const Wavefunction& psi) {
    if (psi.amplitudes.size() != m.size()) throw InvalidState("field size mismatch");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    f.write("RMWF", 4);
    put_u32(f, 1);                                     // version
    put_u32(f, 2);                                     // dims
    put_u32(f, static_cast<std::uint32_t>(m.n()));     // points per axis
    put_f64(f, m.h());
    put_f64(f, psi.time);
    for (const cdouble& v : psi.amplitudes) {
        put_f64(f, v.real());
        put_f64(f, v.imag());
    }
    if (!f) throw Error("short write: " + path);
}

WavefunctionSnapshot read_wavefunction(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "RMWF", 4) != 0)
        throw ParseError(path + ": not a wavefunction snapshot (bad magic)");
    WavefunctionSnapshot snap;
    snap.version = get_u32(f);
    if (snap.version != 1) throw ParseError(path + ": unsupported snapshot version");
    snap.dims = get_u32(f);
    snap.n_axis = get_u32(f);
    snap.h = get_f64(f);
    snap.time = get_f64(f);
    if (snap.dims != 2 || snap.n_axis == 0 || snap.n_axis > 1u << 14)
        throw ParseError(path + ": implausible snapshot header");
    const std::size_t cells = static_cast<std::size_t>(snap.n_axis) * snap.n_axis;
    snap.amplitudes.resize(cells);
    for (std::size_t g = 0; g < cells; ++g) {
        const double re = get_f64(f);
        const double im = get_f64(f);
        snap.amplitudes[g] = cdouble(re, im);
    }
    if (!f) throw ParseError(path + ": truncated snapshot payload");
    return snap;
}

void write_wavefunction_slice_csv(std::ostream& out, const WavefunctionSnapshot& snap, int axis,
                                  int index) {
    const int n = static_cast<int>(snap.n_axis);
    if (axis != 0 && axis != 1) throw InvalidState("axis must be 0 or 1");
    if (index < 0 || index >= n) throw InvalidState("slice index out of range");
    out << "coord,re,im,abs2\n";
    const double half = 0.5 * snap.h * n;
    for (int q = 0; q < n; ++q) {
        const std::size_t g = axis == 0 ? static_cast<std::size_t>(index) * n + q
                                        : static_cast<std::size_t>(q) * n + index;
        const double coord = (q + 0.5) * snap.h - half;
        const cdouble v = snap.amplitudes[g];
        out << fmt(coord) << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << ','
            << fmt(std::norm(v)) << '\n';
    }
}

void write_wavefunction_slice_csv(const std::string& path, const WavefunctionSnapshot& snap,
                                  int axis, int index) {
    auto f = open_out(path);
    write_wavefunction_slice_csv(f, snap, axis, index);
}

}  // namespace relmech
