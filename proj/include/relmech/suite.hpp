#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace relmech {

// One named structural check. `value` is the measured figure and `bound`
// the threshold it was compared against; the direction of the comparison
// is baked into `pass` (some checks want small values, others large).
struct PropertyResult {
    std::string name;  // "group/property"
    bool pass = false;
    double value = 0.0;
    double bound = 0.0;
    std::string note;  // optional fixed-form context
};

// Deterministic battery of structural invariants across every module:
// frame-form equivalences, gauge invariance, conservation along
// trajectories, shell-coupling limits, operator hermiticity/unitarity,
// and output determinism. Same seed => byte-identical results.
std::vector<PropertyResult> run_invariant_suite(std::uint64_t seed);

// Heavier pinned operator diagnostics on fine grids: commutator residual
// batteries, ordering contrasts, the operating-mode difference slope, and
// the stiff-background limit. Complements the invariant suite.
std::vector<PropertyResult> run_quantum_checks(std::uint64_t seed);

bool all_pass(const std::vector<PropertyResult>& results);

// Fixed-format report (no timing, no addresses, stable float formatting):
// repeated runs on identical inputs produce identical bytes.
void print_property_report(std::ostream& out, const std::vector<PropertyResult>& results);

// CSV export with header: check,value,bound,pass
void write_property_csv(std::ostream& out, const std::vector<PropertyResult>& results);
void write_property_csv(const std::string& path, const std::vector<PropertyResult>& results);

}  // namespace relmech
