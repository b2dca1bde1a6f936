#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "relmech/bucket.hpp"
#include "relmech/dynamics.hpp"
#include "relmech/quantum.hpp"

namespace relmech {

// All writers format floating-point values with "%.17g" (shortest exact
// round-trip for doubles) and never emit locale-dependent separators, so a
// given input produces byte-identical files on every run.

// Trajectory table, one row per body per sample:
//   t,body,x1,x2,x3,v1,v2,v3
// `body` is the integer body index (labels may contain delimiters).
void write_trajectory_csv(std::ostream& out, const Trajectory& tr);
void write_trajectory_csv(const std::string& path, const Trajectory& tr);

// Same rows as JSON lines: {"t":...,"body":i,"x":[...],"v":[...]}
void write_trajectory_jsonl(std::ostream& out, const Trajectory& tr);
void write_trajectory_jsonl(const std::string& path, const Trajectory& tr);

// Shell-inertia sweep table: I0,Omega_b,Omega,G_eff
void write_bucket_sweep_csv(std::ostream& out, const std::vector<BucketSweepRow>& rows);
void write_bucket_sweep_csv(const std::string& path, const std::vector<BucketSweepRow>& rows);

// Expectation-value time series of an evolving wavefunction:
//   t,<x1>,<x2>,<p1>,<p2>,<P1>,<P2>,norm,energy
// x is the relative coordinate; p/P are the plain and canonical momenta of
// the first body (the chain-rule sign makes those the relative-coordinate
// momenta); energy is <psi|H psi> in the operating mode of the run.
struct ExpectationRow {
    double t = 0.0;
    double x1 = 0.0, x2 = 0.0;
    double p1 = 0.0, p2 = 0.0;
    double P1 = 0.0, P2 = 0.0;
    double norm = 0.0;
    double energy = 0.0;
};
ExpectationRow expectation_row(const QuantumModel& m, const Wavefunction& psi,
                               HamiltonianMode mode);
void write_expectation_csv(std::ostream& out, const std::vector<ExpectationRow>& rows);
void write_expectation_csv(const std::string& path, const std::vector<ExpectationRow>& rows);

// Wavefunction snapshot file: little-endian binary with layout
//   magic "RMWF" | u32 version=1 | u32 dims | u32 n_axis | f64 h | f64 time
// followed by dims*n_axis^2 ... (dims=2: n_axis^2) cells of interleaved
// (re, im) f64 pairs in row-major order (x-major, y contiguous).
struct WavefunctionSnapshot {
    std::uint32_t version = 1;
    std::uint32_t dims = 2;
    std::uint32_t n_axis = 0;
    double h = 0.0;
    double time = 0.0;
    CField amplitudes;
};

void write_wavefunction(const std::string& path, const QuantumModel& m, const Wavefunction& psi);
WavefunctionSnapshot read_wavefunction(const std::string& path);

// One grid line of |psi| for plotting: axis 0 fixes x = index (varying y),
// axis 1 fixes y = index. Columns: coord,re,im,abs2
void write_wavefunction_slice_csv(std::ostream& out, const WavefunctionSnapshot& snap, int axis,
                                  int index);
void write_wavefunction_slice_csv(const std::string& path, const WavefunctionSnapshot& snap,
                                  int axis, int index);

}  // namespace relmech
