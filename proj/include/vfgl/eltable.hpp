#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vfgl/strip.hpp"

namespace vfgl {

// Reference-function table: E(L) rows with their brackets, plus the constants
// needed for the closed-form surrogate near the critical length.
class ELTable {
public:
    ELTable() = default;
    ELTable(double lambda0, double u0_l4_fourth)
        : lambda0_(lambda0), u0_l4_fourth_(u0_l4_fourth) {}

    void add_row(const ELRow& row);
    const std::vector<ELRow>& rows() const { return rows_; }

    double lambda0() const { return lambda0_; }
    double critical_length() const { return std::pow(lambda0_, -1.5); }

    // Allow the asymptotic closed form to stand in for E(L) between the last
    // tabulated L and the critical length (flagged in reports).
    void enable_surrogate(bool on) { surrogate_ = on; }
    bool surrogate_enabled() const { return surrogate_; }

    // Monotone interpolation of E(L), clamped to 0 at and above the critical
    // length.  Throws when L is below the covered range (and no row applies).
    double lookup(double L) const;
    bool covers(double L) const;

    // Closed-form model -(L^{2/3}/2)(L^{-2/3}-lambda0)^2 / ||u0||_4^4.
    double surrogate_value(double L) const;

    void save_csv(const std::string& path) const;
    static ELTable load_csv(const std::string& path);

private:
    double lambda0_ = 0.0;
    double u0_l4_fourth_ = 0.0;
    bool surrogate_ = false;
    std::vector<ELRow> rows_; // kept sorted by L
};

} // namespace vfgl
