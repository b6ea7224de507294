#include "vfgl/eltable.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vfgl/errors.hpp"

namespace vfgl {

void ELTable::add_row(const ELRow& row) {
    // Row sanity: the bracket and the sign/monotonicity constraints.
    if (row.E > 1e-12) throw std::invalid_argument("ELTable: E(L) must be nonpositive");
    if (row.E < row.lower - 1e-6 * std::max(1.0, std::abs(row.lower))) {
        throw std::invalid_argument("ELTable: estimate below the periodic lower bound");
    }
    rows_.push_back(row);
    std::sort(rows_.begin(), rows_.end(),
              [](const ELRow& a, const ELRow& b) { return a.L < b.L; });
    for (size_t i = 1; i < rows_.size(); ++i) {
        if (rows_[i].E < rows_[i - 1].E - 1e-9) {
            throw std::invalid_argument("ELTable: E must be nondecreasing in L");
        }
    }
}

bool ELTable::covers(double L) const {
    if (L >= critical_length()) return true;
    if (!rows_.empty() && L >= rows_.front().L && L <= rows_.back().L) return true;
    if (surrogate_ && (rows_.empty() || L > rows_.back().L)) return true;
    return false;
}

double ELTable::surrogate_value(double L) const {
    if (u0_l4_fourth_ <= 0.0) throw std::logic_error("ELTable: surrogate constants missing");
    const double b = std::pow(L, -2.0 / 3.0);
    if (b <= lambda0_) return 0.0;
    return -0.5 * std::pow(L, 2.0 / 3.0) * (b - lambda0_) * (b - lambda0_) / u0_l4_fourth_;
}

double ELTable::lookup(double L) const {
    if (!(L > 0.0)) throw std::invalid_argument("ELTable: L must be positive");
    if (L >= critical_length()) return 0.0;
    if (!rows_.empty() && L >= rows_.front().L && L <= rows_.back().L) {
        // Piecewise-linear between rows (monotone by the add_row invariant).
        auto it = std::lower_bound(rows_.begin(), rows_.end(), L,
                                   [](const ELRow& r, double x) { return r.L < x; });
        if (it == rows_.begin()) return it->E;
        const ELRow& hi = *it;
        const ELRow& lo = *(it - 1);
        const double t = (L - lo.L) / (hi.L - lo.L);
        return lo.E + t * (hi.E - lo.E);
    }
    if (surrogate_ && (rows_.empty() || L > rows_.back().L)) {
        return surrogate_value(L);
    }
    throw NumericalError("ELTable: L = " + std::to_string(L) +
                         " outside the covered range below the critical length");
}

void ELTable::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("ELTable: cannot open " + path);
    out << "L,b,E,lower,slack_coeff,fit_residual\n";
    char buf[256];
    for (const auto& r : rows_) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.L, r.b, r.E,
                      r.lower, r.slack_coeff, r.fit_residual);
        out << buf;
    }
    out << "# lambda0," << lambda0_ << ",u0_l4_fourth," << u0_l4_fourth_ << "\n";
}

ELTable ELTable::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ELTable: cannot open " + path);
    std::string line;
    std::getline(in, line); // header
    ELTable table;
    std::vector<ELRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::stringstream ss(line.substr(1));
            std::string key;
            std::getline(ss, key, ',');
            std::string l0, k2, u44;
            std::getline(ss, l0, ',');
            std::getline(ss, k2, ',');
            std::getline(ss, u44, ',');
            table.lambda0_ = std::stod(l0);
            table.u0_l4_fourth_ = std::stod(u44);
            continue;
        }
        std::stringstream ss(line);
        std::string tok;
        ELRow r;
        std::getline(ss, tok, ',');
        r.L = std::stod(tok);
        std::getline(ss, tok, ',');
        r.b = std::stod(tok);
        std::getline(ss, tok, ',');
        r.E = std::stod(tok);
        std::getline(ss, tok, ',');
        r.lower = std::stod(tok);
        std::getline(ss, tok, ',');
        r.slack_coeff = std::stod(tok);
        std::getline(ss, tok, ',');
        r.fit_residual = std::stod(tok);
        rows.push_back(r);
    }
    for (const auto& r : rows) table.add_row(r);
    return table;
}

} // namespace vfgl
