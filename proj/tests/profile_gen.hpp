#pragma once

// Random admissible polynomial (p, q) profiles for the parametrization tests:
// degree <= 5, coefficients drawn in [-0.5, 0.5], then adjusted/rescaled until
// pq_validate accepts them on the working interval.

#include <crflat/pq.hpp>

#include <charconv>
#include <random>
#include <string>
#include <vector>

namespace testgen {

inline std::string poly_text(const std::vector<double>& c) {
    // c[k] multiplies v^k, k >= 1
    std::string s;
    char buf[40];
    for (std::size_t k = 1; k < c.size(); ++k) {
        if (c[k] == 0) continue;
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, c[k]);
        (void)ec;
        if (!s.empty()) s += " + ";
        s += "(" + std::string(buf, p) + ")*v^" + std::to_string(k);
    }
    return s.empty() ? "0*v" : s;
}

inline crflat::pq_profile random_profile(std::mt19937_64& rng,
                                         std::array<double, 2> interval = {-0.25, 0.25}) {
    std::uniform_real_distribution<double> d(-0.5, 0.5);
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<double> pc(6, 0.0), qc(6, 0.0);
        for (int k = 1; k <= 5; ++k) {
            pc[std::size_t(k)] = d(rng);
            qc[std::size_t(k)] = d(rng);
        }
        // keep the quadratic part of p and the linear part of q dominant
        pc[2] = (pc[2] < 0 ? -1 : 1) * (0.25 + std::abs(pc[2]) / 2);
        qc[1] = 0.5 + std::abs(qc[1]) / 2;
        for (int shrink = 0; shrink < 12; ++shrink) {
            crflat::pq_profile prof =
                crflat::make_pq_profile(poly_text(pc), poly_text(qc), interval);
            if (crflat::pq_validate(prof).ok) return prof;
            for (int k = 3; k <= 5; ++k) {
                pc[std::size_t(k)] *= 0.5;
                qc[std::size_t(k)] *= 0.5;
            }
            qc[2] *= 0.5;
        }
    }
    throw std::runtime_error("could not generate an admissible profile");
}

} // namespace testgen
